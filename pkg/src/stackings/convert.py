"""Constructive conversions between certificate kinds.

Arrows: gs -> bs -> is -> gs, is -> bs, tbs <-> tis, tis -> is,
staggered -> tis, and the slope projection order on planar periodic balls.
Every conversion validates its input with the target-independent checker
and raises :class:`ConversionError` when it cannot produce a certificate.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .complex import Side, TwoComplex
from .cover import CoverData, invariant_closure, lift_stacking
from .dualgraph import build_dual, direct_dual, is_acyclic, reachability_order
from .groups import FreeAbelianGroup, Group
from .orders import (
    NoLeftOrder,
    OrderError,
    Relation,
    embed_in_rationals,
    is_partial_order,
    is_total,
    linear_extension,
    preorder_closure,
    strict_closure,
)
from .stacking import Stacking, check_good, check_stacking
from .structures import (
    BislimStructure,
    InvariantStaggering,
    ISStructure,
    StaggeredStructure,
    TISStructure,
    check_bislim,
    check_is,
    check_staggered,
    check_tbs,
    check_tis,
)


class ConversionError(ValueError):
    pass


class NotGood(ConversionError):
    pass


class HorizonError(ConversionError):
    """The conversion needs cells outside the cover ball."""


class DescentAmbiguity(ConversionError):
    pass


def _require(report, what: str) -> None:
    if not report.ok:
        first = report.violations[0]
        raise ConversionError(f"input is not a valid {what}: [{first.tag}] {first.message}")


# -- good stacking -> bislim --------------------------------------------------


def _extreme_positions(q: TwoComplex, s: Stacking, pick: Callable[[str], Side | None]) -> dict[str, int]:
    """Per quotient face, the least (edge, position) whose side is extremal."""
    out = {}
    for f, w in q.faces.items():
        cands = [(l.edge, i) for i, l in enumerate(w) if pick(l.edge) == Side(f, i)]
        if cands:
            out[f] = min(cands)[1]
    return out


def gs_to_bs(s: Stacking, cover: CoverData, torsion_mode: bool = False) -> BislimStructure:
    """Order faces of the ball by directed-dual reachability, give each edge
    the position of the face lowest over it, and pick r+ where r is lowest
    and r- where r is highest."""
    q = cover.quotient
    _require(check_stacking(q, s), "stacking")
    good = check_good(q, s)
    if not good.ok:
        raise NotGood(good.violations[0].message)
    ball = cover.ball
    lifted = lift_stacking(s, cover).stacking
    directed = direct_dual(build_dual(ball, torsion_mode), lifted)
    ok, cycle = is_acyclic(directed)
    if not ok:
        raise ConversionError(f"directed dual of the ball has a cycle {cycle}; the stacking certificate is unsound")
    faces = invariant_closure(reachability_order(directed), cover)
    if not is_partial_order(faces):
        raise ConversionError("translates of the reachability order create a cycle")
    low = {}
    for e in ball.edges:
        qlow = s.lowest(cover.proj_edge[e])
        if qlow is None:
            continue
        side = cover.lift_side(e, qlow)
        if side is not None:
            low[e] = side.face
    pairs = {(a, b) for a in low for b in low if low[a] == low[b] or (low[a], low[b]) in faces.pairs}
    preorder = Relation(frozenset(low), frozenset(pairs))
    plus_pos = _extreme_positions(q, s, s.lowest)
    minus_pos = _extreme_positions(q, s, s.highest)
    plus = {r: w[plus_pos[cover.proj_face[r]]].edge for r, w in ball.faces.items()}
    minus = {r: w[minus_pos[cover.proj_face[r]]].edge for r, w in ball.faces.items()}
    return BislimStructure(cover, preorder, plus, minus)


# -- bislim <-> invariant staggering -----------------------------------------


def bs_to_is(b: BislimStructure, torsion_mode: bool = False) -> ISStructure:
    """E+ = {r+}, E- = {r-}; both edge orders and the face order are read
    off the strict order among r+ cells."""
    _require(check_bislim(b, torsion_mode), "bislim structure")
    strict = strict_closure(b.preorder)
    eplus = set(b.plus.values()) & strict.ground
    plus_order = invariant_closure(strict.restrict(eplus), b.cover)
    faces = sorted(f for f in b.plus if b.plus[f] in eplus)
    face_pairs = {(x, y) for x in faces for y in faces if (b.plus[x], b.plus[y]) in plus_order.pairs}
    minus_faces = [f for f in faces if f in b.minus]
    minus_pairs = {
        (b.minus[x], b.minus[y])
        for x in minus_faces
        for y in minus_faces
        if (b.plus[x], b.plus[y]) in plus_order.pairs
    }
    eminus = frozenset(b.minus[f] for f in minus_faces)
    return ISStructure(
        b.cover,
        Relation(frozenset(faces), frozenset(face_pairs)),
        plus_order,
        Relation(eminus, frozenset(minus_pairs)),
    )


def _equivariant_choice(st: InvariantStaggering, face: str, cands: set[str]) -> str:
    w = st.cover.ball.faces[face]
    pos = {l.edge: i for i, l in reversed(list(enumerate(w)))}
    return min(cands, key=lambda e: (st.cover.proj_edge[e], pos[e]))


def _choices(st: InvariantStaggering) -> tuple[dict[str, str], dict[str, str]]:
    plus, minus = {}, {}
    for f in st.cover.ball.faces:
        mx, mn = st.max_plus(f), st.min_minus(f)
        if mx:
            plus[f] = _equivariant_choice(st, f, mx)
        if mn:
            minus[f] = _equivariant_choice(st, f, mn)
    return plus, minus


def is_to_bs(i: ISStructure, torsion_mode: bool = False) -> BislimStructure:
    """r+ and r- are the least members of Max+(r) and Min-(r) by projected
    edge id, so translates get translated choices."""
    _require(check_is(i, torsion_mode), "invariant staggering")
    plus, minus = _choices(i)
    for f in i.cover.interior_faces():
        if f not in plus or f not in minus:
            raise ConversionError(f"face {f} has an empty Max+ or Min-")
    return BislimStructure(i.cover, preorder_closure(i.plus_order), plus, minus)


# -- invariant staggering -> good stacking ------------------------------------


def _heights(i: InvariantStaggering) -> dict[Side, Fraction]:
    """Unit-spaced levels from a linear extension of the face order, each
    face spread over a band of width 1/4 with its Max+ side at the bottom
    and its Min- side at the top."""
    try:
        chain = linear_extension(i.face_order)
    except OrderError as exc:
        raise ConversionError(f"face order is cyclic: {exc}") from exc
    level = embed_in_rationals(chain)
    plus, minus = _choices(i)
    ball = i.cover.ball
    out: dict[Side, Fraction] = {}
    for f in chain:
        w = ball.faces[f]
        n = len(w)
        first = [p for p, l in enumerate(w) if plus.get(f) == l.edge][:1]
        last = [p for p, l in enumerate(w) if minus.get(f) == l.edge and p not in first][:1]
        middle = [p for p in range(n) if p not in first and p not in last]
        for k, p in enumerate(first + middle + last):
            out[Side(f, p)] = level[f] + Fraction(k, 4 * n)
    return out


def _read_off(ball: TwoComplex, h: Mapping[Side, Fraction], edges, vertices) -> tuple[dict, dict]:
    sides = {}
    for e in edges:
        over = ball.sides_over(e)
        if any(s not in h for s in over):
            raise HorizonError(f"a face over {e} is outside the 2-cell order")
        sides[e] = tuple(sorted(over, key=h.__getitem__))
    corners = {}
    for v in vertices:
        at = ball.corners_at(v)
        if any(Side(c.face, c.pos) not in h for c in at):
            raise HorizonError(f"a face at {v} is outside the 2-cell order")
        corners[v] = tuple(sorted(at, key=lambda c: h[Side(c.face, c.pos)]))
    return sides, corners


def _by_address(cover: CoverData, cells: list[str]) -> list[str]:
    return sorted(cells, key=lambda x: (len(cover.address.get(x, ())), x))


def is_to_gs(i: ISStructure, torsion_mode: bool = False) -> Stacking:
    """A good stacking of the quotient built from face levels in the ball.

    Away from simply connected quotients, each quotient edge reads its side
    order off every interior lift; disagreement between lifts is reported
    as :class:`DescentAmbiguity` rather than resolved by guessing.
    """
    _require(check_is(i, torsion_mode), "invariant staggering")
    cover = i.cover
    q, ball = cover.quotient, cover.ball
    h = _heights(i)
    if cover.simply_connected_quotient:
        sides, corners = _read_off(ball, h, ball.edges, ball.vertices)
        result = Stacking(
            {cover.proj_edge[e]: tuple(cover.project_side(s) for s in seq) for e, seq in sides.items()},
            {cover.proj_vertex[v]: tuple(cover.project_corner(c) for c in seq) for v, seq in corners.items()},
        )
    else:
        side_order, corner_order = {}, {}
        for qe in sorted(q.edges):
            lifts = _by_address(cover, [e for e in cover.lifts_of_edge(qe) if e not in cover.frontier])
            if not q.sides_over(qe):
                side_order[qe] = ()
                continue
            if not lifts:
                raise HorizonError(f"no interior lift of edge {qe} in the ball")
            seen = None
            for e in lifts:
                sides, _ = _read_off(ball, h, [e], [])
                proj = tuple(cover.project_side(s) for s in sides[e])
                if seen is None:
                    seen = proj
                elif proj != seen:
                    raise DescentAmbiguity(f"lifts {lifts[0]} and {e} of {qe} order their sides differently")
            side_order[qe] = seen
        for qv in sorted(q.vertices):
            lifts = _by_address(cover, [v for v in cover.lifts_of_vertex(qv) if v not in cover.frontier])
            if not q.corners_at(qv):
                corner_order[qv] = ()
                continue
            if not lifts:
                raise HorizonError(f"no interior lift of vertex {qv} in the ball")
            _, corners = _read_off(ball, h, [], [lifts[0]])
            corner_order[qv] = tuple(cover.project_corner(c) for c in corners[lifts[0]])
        result = Stacking(side_order, corner_order)
    bad = check_stacking(q, result)
    if not bad.ok:
        raise DescentAmbiguity("descended orders are not a stacking: " + bad.violations[0].message)
    good = check_good(q, result)
    if not good.ok:
        raise ConversionError("descended stacking is not good: " + good.violations[0].message)
    return result


# -- totally ordered variants -------------------------------------------------


def tbs_to_tis(b: BislimStructure) -> TISStructure:
    """Compare faces, r+ cells and r- cells by the strict order of r+."""
    _require(check_bislim(b), "bislim structure")
    if not check_tbs(b):
        raise ConversionError("the order on r+ cells is not total")
    ground = b.preorder.ground
    faces = sorted(f for f in b.plus if b.plus[f] in ground)
    less = lambda x, y: b.strict(b.plus[x], b.plus[y])
    face_pairs = {(x, y) for x in faces for y in faces if less(x, y)}
    eplus = frozenset(b.plus[f] for f in faces)
    plus_pairs = {(x, y) for x in eplus for y in eplus if b.strict(x, y)}
    mfaces = [f for f in faces if f in b.minus]
    minus_pairs = {(b.minus[x], b.minus[y]) for x in mfaces for y in mfaces if less(x, y)}
    return TISStructure(
        b.cover,
        Relation(frozenset(faces), frozenset(face_pairs)),
        Relation(eplus, frozenset(plus_pairs)),
        Relation(frozenset(b.minus[f] for f in mfaces), frozenset(minus_pairs)),
    )


def tis_to_tbs(t: TISStructure) -> BislimStructure:
    """r+ = max+(r), r- = min-(r), preorder = the + order made reflexive."""
    _require(check_tis(t), "totally ordered invariant staggering")
    plus, minus = _choices(t)
    return BislimStructure(t.cover, preorder_closure(t.plus_order), plus, minus)


def tis_to_is(t: TISStructure) -> ISStructure:
    _require(check_tis(t), "totally ordered invariant staggering")
    out = ISStructure(t.cover, t.face_order, t.plus_order, t.minus_order)
    _require(check_is(out), "invariant staggering (re-verified)")
    return out


# -- staggered -> TIS ---------------------------------------------------------


def staggered_to_tis(s: StaggeredStructure, cover: CoverData, group: Group | None = None) -> TISStructure:
    """Faces ordered by quotient staggering across orbits and by the left
    order on deck addresses within an orbit; edges over E likewise."""
    _require(check_staggered(s), "staggering")
    if s.complex != cover.quotient:
        raise ConversionError("staggering is not on the quotient of the cover")
    group = group or cover.group
    trivial = cover.simply_connected_quotient
    if not trivial and group is None:
        raise ConversionError("a left-order oracle is needed for a nontrivial deck group")
    if not trivial:
        try:
            group.compare((), ())
        except NoLeftOrder as exc:
            raise ConversionError(f"no left order exists: {exc}") from exc
    face_rank = {f: i for i, f in enumerate(s.face_order)}
    edge_rank = {e: i for i, e in enumerate(s.edge_order)}

    def address(x: str):
        if trivial:
            return ()
        if x not in cover.address:
            raise ConversionError(f"cell {x} has no deck address")
        return cover.address[x]

    def cmp(rank, proj):
        def inner(x, y):
            rx, ry = rank[proj[x]], rank[proj[y]]
            if rx != ry:
                return -1 if rx < ry else 1
            if x == y:
                return 0
            return int(group.compare(address(x), address(y))) if not trivial else (x > y) - (x < y)

        return inner

    try:
        faces = sorted(cover.ball.faces, key=functools.cmp_to_key(cmp(face_rank, cover.proj_face)))
        edges = [e for e in cover.ball.edges if cover.proj_edge[e] in edge_rank]
        edges = sorted(edges, key=functools.cmp_to_key(cmp(edge_rank, cover.proj_edge)))
    except NoLeftOrder as exc:
        raise ConversionError(f"no left order exists: {exc}") from exc
    eorder = Relation.from_chain(edges)
    return TISStructure(cover, Relation.from_chain(faces), eorder, eorder)


# -- slope projection ---------------------------------------------------------

Point = tuple[Fraction, Fraction]


def planar_coordinates(cover: CoverData, face_points: Mapping[str, Point] | None = None) -> dict[str, Point]:
    """Coordinates for a ball whose deck group is free abelian of rank 2.

    Vertices sit at their group element, edges at their midpoint, faces at
    the barycenter of their corners unless ``face_points`` gives an offset
    from the face's base vertex for that quotient face.
    """
    g = cover.group
    if not isinstance(g, FreeAbelianGroup) or g.rank != 2:
        raise ConversionError("planar coordinates need a free abelian deck group of rank 2")
    ball = cover.ball
    pos: dict[str, Point] = {}
    for v in ball.vertices:
        x, y = g.normal_form(cover.address[v])
        pos[v] = (Fraction(x), Fraction(y))
    for e, (s, t) in ball.edges.items():
        pos[e] = ((pos[s][0] + pos[t][0]) / 2, (pos[s][1] + pos[t][1]) / 2)
    for f, w in ball.faces.items():
        base = pos[ball.start(w[0])]
        qf = cover.proj_face[f]
        if face_points and qf in face_points:
            dx, dy = face_points[qf]
            pos[f] = (base[0] + Fraction(dx), base[1] + Fraction(dy))
        else:
            vs = [pos[v] for v in ball.face_vertices(f)]
            pos[f] = (sum(p[0] for p in vs) / len(vs), sum(p[1] for p in vs) / len(vs))
    return pos


def _check_embedding(cover: CoverData, pos: Mapping[str, Point]) -> None:
    for gen, m in cover.deck.items():
        shift = None
        for sort in ("vertices", "edges", "faces"):
            for a, b in m.of(sort).items():
                d = (pos[b][0] - pos[a][0], pos[b][1] - pos[a][1])
                if shift is None:
                    shift = d
                elif d != shift:
                    raise ConversionError(f"inconsistent embedding data: {gen} moves {a} by {d}, expected {shift}")


def parse_slope(text: str) -> tuple[int, int]:
    p, _, q = text.partition("/")
    try:
        return int(p), int(q or 1)
    except ValueError as exc:
        raise ValueError(f"slope must look like p/q, got {text!r}") from exc


def slope_projection_order(
    cover: CoverData,
    slope: tuple[int, int],
    coordinates: Mapping[str, Point] | None = None,
) -> InvariantStaggering:
    """Order cells by projecting their points onto the line of slope p/q.

    Equal projections stay incomparable.  The result is a TIS structure when
    every interior comparison is strict, otherwise an IS structure.
    """
    p, q = slope
    if (p, q) == (0, 0):
        raise ConversionError("slope direction must be nonzero")
    pos = dict(coordinates) if coordinates is not None else planar_coordinates(cover)
    missing = [c for c in list(cover.ball.edges) + list(cover.ball.faces) if c not in pos]
    if missing:
        raise ConversionError(f"no coordinates for {missing[0]}")
    _check_embedding(cover, pos)
    value = lambda c: q * pos[c][0] + p * pos[c][1]
    faces = Relation.from_key(cover.ball.faces, value)
    edges = Relation.from_key(cover.ball.edges, value)
    window_faces = set(cover.interior_faces())
    window_edges = set().union(*(cover.ball.face_edges(f) for f in window_faces)) if window_faces else set()
    total = is_total(faces, window_faces) and is_total(edges, window_edges)
    cls = TISStructure if total else ISStructure
    return cls(cover, faces, edges, edges)


# -- routing ------------------------------------------------------------------

KINDS = ("gs", "bs", "tbs", "is", "tis", "staggered")

ARROWS: frozenset[tuple[str, str]] = frozenset(
    {
        ("gs", "bs"),
        ("bs", "is"),
        ("is", "bs"),
        ("is", "gs"),
        ("bs", "tbs"),
        ("tbs", "bs"),
        ("tbs", "tis"),
        ("tis", "tbs"),
        ("tis", "is"),
        ("staggered", "tis"),
    }
)


def find_route(src: str, dst: str) -> list[str]:
    """Shortest chain of kinds from ``src`` to ``dst`` (breadth first, arrows in sorted order)."""
    for k in (src, dst):
        if k not in KINDS:
            raise ValueError(f"unknown certificate kind {k!r}")
    prev = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            break
        for a, b in sorted(ARROWS):
            if a == x and b not in prev:
                prev[b] = x
                queue.append(b)
    if dst not in prev:
        raise ValueError(f"no conversion from {src} to {dst}")
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


@dataclass
class Certificate:
    """A certificate tagged with its kind, as the CLI passes them around."""

    kind: str
    value: object
    cover: CoverData | None = None
    # the complex a good stacking lives on, when no cover is attached
    complex: TwoComplex | None = None

    def base_complex(self) -> TwoComplex | None:
        if self.kind == "staggered":
            return self.value.complex
        if self.complex is not None:
            return self.complex
        return self.cover.quotient if self.cover is not None else None


def apply_arrow(cert: Certificate, dst: str, torsion_mode: bool = False) -> Certificate:
    src, v, cover = cert.kind, cert.value, cert.cover
    if (src, dst) == ("gs", "bs"):
        if cover is None:
            raise ConversionError("gs -> bs needs a cover")
        return Certificate("bs", gs_to_bs(v, cover, torsion_mode), cover)
    if (src, dst) == ("bs", "is"):
        return Certificate("is", bs_to_is(v, torsion_mode), v.cover)
    if (src, dst) == ("is", "bs"):
        return Certificate("bs", is_to_bs(v, torsion_mode), v.cover)
    if (src, dst) == ("is", "gs"):
        return Certificate("gs", is_to_gs(v, torsion_mode), v.cover)
    if (src, dst) == ("bs", "tbs"):
        _require(check_bislim(v), "bislim structure")
        if not check_tbs(v):
            raise ConversionError("the order on r+ cells is not total")
        return Certificate("tbs", v, v.cover)
    if (src, dst) == ("tbs", "bs"):
        return Certificate("bs", v, v.cover)
    if (src, dst) == ("tbs", "tis"):
        return Certificate("tis", tbs_to_tis(v), v.cover)
    if (src, dst) == ("tis", "tbs"):
        return Certificate("tbs", tis_to_tbs(v), v.cover)
    if (src, dst) == ("tis", "is"):
        return Certificate("is", tis_to_is(v), v.cover)
    if (src, dst) == ("staggered", "tis"):
        if cover is None:
            raise ConversionError("staggered -> tis needs a cover")
        return Certificate("tis", staggered_to_tis(v, cover), cover)
    raise ConversionError(f"no arrow {src} -> {dst}")


def convert(cert: Certificate, dst: str, torsion_mode: bool = False) -> Certificate:
    route = find_route(cert.kind, dst)
    for nxt in route[1:]:
        carried = cert.cover
        cert = apply_arrow(cert, nxt, torsion_mode)
        if cert.cover is None:
            cert.cover = carried
    return cert
