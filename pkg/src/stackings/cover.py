"""Finite balls in covering complexes.

Universal covers are infinite, so everything here works on a finite ball
together with partial deck maps.  Cells of the ball whose neighbourhood in
the cover is not completely present form the *frontier*; checks quantify
only over the rest and report what they had to skip as horizon items.

Ball faces keep the boundary indexing of the quotient face they cover, so
``Side(f, i)`` in the ball projects to ``Side(proj(f), i)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .complex import Corner, Letter, Side, TwoComplex, validate
from .groups import Group, GroupWord
from .orders import Relation, transitive_closure
from .report import Report
from .stacking import Stacking


class CoverError(ValueError):
    pass


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: Mapping[str, GroupWord]

    def complex(self, basepoint: str = "v") -> TwoComplex:
        return TwoComplex.presentation(self.generators, self.relators, basepoint)


@dataclass(frozen=True)
class DeckMap:
    vertices: Mapping[str, str] = field(default_factory=dict)
    edges: Mapping[str, str] = field(default_factory=dict)
    faces: Mapping[str, str] = field(default_factory=dict)

    def inverse(self) -> "DeckMap":
        return DeckMap(
            {b: a for a, b in self.vertices.items()},
            {b: a for a, b in self.edges.items()},
            {b: a for a, b in self.faces.items()},
        )

    def of(self, sort: str) -> Mapping[str, str]:
        return getattr(self, sort)


SORTS = ("vertices", "edges", "faces")


@dataclass(eq=False)
class CoverData:
    ball: TwoComplex
    quotient: TwoComplex
    proj_vertex: Mapping[str, str]
    proj_edge: Mapping[str, str]
    proj_face: Mapping[str, str]
    deck: Mapping[str, DeckMap] = field(default_factory=dict)
    frontier: frozenset[str] = frozenset()
    simply_connected_quotient: bool = False
    address: Mapping[str, GroupWord] = field(default_factory=dict)
    group: Group | None = None

    def __post_init__(self):
        self._inverse = {g: m.inverse() for g, m in self.deck.items()}
        self._side_lifts: dict[str, dict[Side, Side]] = {e: {} for e in self.ball.edges}
        for s in self.ball.all_sides():
            self._side_lifts[self.ball.letter(s).edge][self.project_side(s)] = s

    # -- projection -------------------------------------------------------

    def project_side(self, s: Side) -> Side:
        return Side(self.proj_face[s.face], s.pos)

    def project_corner(self, c: Corner) -> Corner:
        return Corner(self.proj_face[c.face], c.pos)

    def lift_side(self, ball_edge: str, quotient_side: Side) -> Side | None:
        """The side over ``ball_edge`` covering ``quotient_side``, if it is in the ball."""
        return self._side_lifts[ball_edge].get(quotient_side)

    def lifts_of_edge(self, q_edge: str) -> list[str]:
        return sorted(e for e, q in self.proj_edge.items() if q == q_edge)

    def lifts_of_vertex(self, q_vertex: str) -> list[str]:
        return sorted(v for v, q in self.proj_vertex.items() if q == q_vertex)

    def lifts_of_face(self, q_face: str) -> list[str]:
        return sorted(f for f, q in self.proj_face.items() if q == q_face)

    # -- frontier ---------------------------------------------------------

    def is_frontier(self, cell: str) -> bool:
        return cell in self.frontier

    def interior_faces(self) -> list[str]:
        return sorted(f for f in self.ball.faces if f not in self.frontier)

    def interior_edges(self) -> list[str]:
        return sorted(e for e in self.ball.edges if e not in self.frontier)

    def interior_vertices(self) -> list[str]:
        return sorted(v for v in self.ball.vertices if v not in self.frontier)

    # -- deck action ------------------------------------------------------

    def sort_of(self, cell: str) -> str:
        if cell in self.ball.faces:
            return "faces"
        if cell in self.ball.edges:
            return "edges"
        return "vertices"

    def deck_maps(self) -> list[tuple[str, DeckMap]]:
        """Every generator map followed by its inverse."""
        out = []
        for g in sorted(self.deck):
            out.append((g, self.deck[g]))
            out.append((g + "^-1", self._inverse[g]))
        return out


def _edge_ends(complex: TwoComplex) -> dict[str, int]:
    count = {v: 0 for v in complex.vertices}
    for s, t in complex.edges.values():
        count[s] += 1
        count[t] += 1
    return count


def compute_frontier(ball: TwoComplex, quotient: TwoComplex, pv, pe, pf) -> frozenset[str]:
    out = set()
    q_ends = _edge_ends(quotient)
    b_ends = _edge_ends(ball)
    for v in ball.vertices:
        if len(ball.corners_at(v)) < len(quotient.corners_at(pv[v])) or b_ends[v] < q_ends[pv[v]]:
            out.add(v)
    for e in ball.edges:
        if len(ball.sides_over(e)) < len(quotient.sides_over(pe[e])):
            out.add(e)
    for f in ball.faces:
        if any(l.edge in out for l in ball.faces[f]):
            out.add(f)
    return frozenset(out)


def check_cover(cover: CoverData) -> Report:
    """Covering invariants: projections respect boundaries, are injective on
    stars of interior cells, and deck maps commute with projection."""
    report = Report()
    b, q = cover.ball, cover.quotient
    for e, (s, t) in b.edges.items():
        qe = cover.proj_edge.get(e)
        if qe is None or q.edges[qe] != (cover.proj_vertex[s], cover.proj_vertex[t]):
            report.add("cover.projection", f"edge {e} does not project onto an edge with matching ends", e)
    for f, w in b.faces.items():
        qf = cover.proj_face.get(f)
        qw = q.faces.get(qf, ()) if qf else ()
        if len(qw) != len(w) or any(cover.proj_edge.get(l.edge) != m.edge or l.dir != m.dir for l, m in zip(w, qw)):
            report.add("cover.projection", f"face {f} boundary does not project letterwise onto {qf}", f)
    for v in cover.interior_vertices():
        proj = [cover.project_corner(c) for c in b.corners_at(v)]
        if sorted(proj) != sorted(q.corners_at(cover.proj_vertex[v])):
            report.add("cover.local", f"star of {v} does not map bijectively onto its image", v)
    for e in cover.interior_edges():
        proj = [cover.project_side(s) for s in b.sides_over(e)]
        if sorted(proj) != sorted(q.sides_over(cover.proj_edge[e])):
            report.add("cover.local", f"sides over {e} do not map bijectively onto their image", e)
    for g, m in cover.deck.items():
        for sort, proj in (("vertices", cover.proj_vertex), ("edges", cover.proj_edge), ("faces", cover.proj_face)):
            mp = m.of(sort)
            if len(set(mp.values())) != len(mp):
                report.add("cover.deck", f"deck map {g} is not injective on {sort}", g)
            for a, ga in mp.items():
                if proj.get(a) != proj.get(ga):
                    report.add("cover.deck", f"deck map {g} moves {a} to a cell over a different quotient cell", a)
        for f, gf in m.faces.items():
            w, gw = b.faces[f], b.faces[gf]
            for l, gl in zip(w, gw):
                if l.edge in m.edges and (m.edges[l.edge] != gl.edge or l.dir != gl.dir):
                    report.add("cover.deck", f"deck map {g} does not carry the boundary of {f} to that of {gf}", f)
                    break
    if cover.simply_connected_quotient:
        if cover.frontier:
            report.add("cover.trivial", "simply connected quotient but nonempty frontier")
        if len(set(cover.proj_face.values())) != len(b.faces) or len(b.faces) != len(q.faces):
            report.add("cover.trivial", "simply connected quotient but projection is not a bijection")
    report.checked = len(b.edges) + len(b.faces)
    return report


def identity_cover(complex: TwoComplex) -> CoverData:
    """The cover of a complex declared simply connected: the complex itself."""
    ident = lambda xs: {x: x for x in xs}
    return CoverData(
        complex,
        complex,
        ident(complex.vertices),
        ident(complex.edges),
        ident(complex.faces),
        simply_connected_quotient=True,
    )


def build_cayley_ball(presentation: Presentation, radius: int, group: Group, basepoint: str = "v") -> CoverData:
    """The radius ball around the identity in the Cayley 2-complex.

    Vertices are group elements of word length at most ``radius``; faces are
    relator loops whose every vertex lies in the ball.
    """
    if radius < 0:
        raise CoverError("radius must be non-negative")
    quotient = presentation.complex(basepoint)
    bad = validate(quotient)
    if not bad.ok:
        raise CoverError("presentation complex is invalid: " + "; ".join(v.message for v in bad.violations))
    if set(group.generators) != set(presentation.generators):
        raise CoverError("oracle generators differ from the presentation's")
    group.check_relators(presentation.relators)

    trivial = group.is_trivial
    rep: dict = {}
    order: list = []
    start = group.normal_form(())
    rep[start] = ()
    order.append(start)
    frontier_q = deque([(start, 0)])
    letters = [(x, e) for x in presentation.generators for e in (1, -1)]
    while frontier_q:
        key, d = frontier_q.popleft()
        if d == radius:
            continue
        for x, e in letters:
            w = rep[key] + ((x, e),)
            k = group.normal_form(w)
            if k not in rep:
                rep[k] = w
                order.append(k)
                frontier_q.append((k, d + 1))

    def vid(k) -> str:
        return basepoint if trivial else group.format(k)

    def eid(x: str, k) -> str:
        return x if trivial else f"{x}@{vid(k)}"

    def fid(r: str, k) -> str:
        return r if trivial else f"{r}@{vid(k)}"

    def mul(k, letter) -> object:
        return group.normal_form(rep[k] + (letter,))

    edges = []
    for k in order:
        for x in presentation.generators:
            h = mul(k, (x, 1))
            if h in rep:
                edges.append((eid(x, k), vid(k), vid(h)))
    edge_ids = {e for e, _, _ in edges}
    faces = []
    for k in order:
        for r, w in presentation.relators.items():
            cur, out = k, []
            for x, e in w:
                nxt = mul(cur, (x, e))
                if nxt not in rep:
                    break
                tail = cur if e > 0 else nxt
                if eid(x, tail) not in edge_ids:
                    break
                out.append(Letter(eid(x, tail), e))
                cur = nxt
            else:
                faces.append((fid(r, k), out))
    ball = TwoComplex.build([vid(k) for k in order], edges, faces)

    pv = {vid(k): basepoint for k in order}
    pe = {e: e.split("@", 1)[0] for e in edge_ids}
    pf = {f: f.split("@", 1)[0] for f, _ in faces}
    key_of = {vid(k): k for k in order}
    deck = {}
    if not trivial:
        for y in presentation.generators:
            vm, em, fm = {}, {}, {}
            for k in order:
                h = group.normal_form(((y, 1),) + rep[k])
                if h not in rep:
                    continue
                vm[vid(k)] = vid(h)
            for e in edge_ids:
                x, v = e.split("@", 1)
                if v in vm and eid(x, key_of[vm[v]]) in edge_ids:
                    em[e] = eid(x, key_of[vm[v]])
            for f, _ in faces:
                r, v = f.split("@", 1)
                if v in vm and fid(r, key_of[vm[v]]) in ball.faces:
                    fm[f] = fid(r, key_of[vm[v]])
            deck[y] = DeckMap(vm, em, fm)
    address: dict[str, GroupWord] = {}
    for k in order:
        address[vid(k)] = rep[k]
    for e in edge_ids:
        address[e] = rep[key_of[ball.edges[e][0]]]
    for f, _ in faces:
        address[f] = rep[key_of[f.split("@", 1)[1]]] if not trivial else ()
    frontier = compute_frontier(ball, quotient, pv, pe, pf)
    cover = CoverData(ball, quotient, pv, pe, pf, deck, frontier, trivial, address, group)
    bad = check_cover(cover)
    if not bad.ok:
        raise CoverError("; ".join(v.message for v in bad.violations))
    return cover


# -- invariance ---------------------------------------------------------------


def check_invariance(data: Relation | Mapping[str, str], cover: CoverData, tag: str = "invariance") -> Report:
    """Compare every order pair (or assignment entry) with its deck translates.

    Translates that leave the ball, or leave the ground set the data is
    defined on, are horizon items rather than violations.
    """
    report = Report()
    maps = cover.deck_maps()
    if isinstance(data, Relation):
        if not data.ground:
            return report
        sort = cover.sort_of(next(iter(sorted(data.ground))))
        for g, m in maps:
            mp = m.of(sort)
            for a, b in sorted(data.pairs):
                if a not in mp or b not in mp:
                    continue
                ga, gb = mp[a], mp[b]
                if ga not in data.ground or gb not in data.ground:
                    report.horizon.append(f"{tag}: translate of ({a}, {b}) by {g} leaves the ordered set")
                    continue
                report.checked += 1
                if (ga, gb) not in data.pairs:
                    report.add(tag, f"({a}, {b}) holds but its {g}-translate ({ga}, {gb}) does not", a, b)
        return report
    for g, m in maps:
        for f in sorted(data):
            if f not in m.faces:
                continue
            gf = m.faces[f]
            if gf not in data:
                report.horizon.append(f"{tag}: {g}-translate of {f} has no assignment")
                continue
            if data[f] not in m.edges:
                report.horizon.append(f"{tag}: {g}-translate of {data[f]} leaves the ball")
                continue
            report.checked += 1
            if m.edges[data[f]] != data[gf]:
                report.add(tag, f"{f} -> {data[f]} but {gf} -> {data[gf]}, expected {m.edges[data[f]]}", f, gf)
    return report


def invariant_closure(rel: Relation, cover: CoverData) -> Relation:
    """Smallest transitive relation containing ``rel`` that is closed under
    deck translation inside the ground set."""
    if not cover.deck or not rel.ground:
        return transitive_closure(rel)
    sort = cover.sort_of(next(iter(sorted(rel.ground))))
    maps = [m.of(sort) for _, m in cover.deck_maps()]
    pairs = set(transitive_closure(rel).pairs)
    while True:
        new = set()
        for mp in maps:
            for a, b in pairs:
                ga, gb = mp.get(a), mp.get(b)
                if ga in rel.ground and gb in rel.ground and (ga, gb) not in pairs:
                    new.add((ga, gb))
        if not new:
            return Relation(rel.ground, frozenset(pairs))
        pairs = set(transitive_closure(Relation(rel.ground, frozenset(pairs | new))).pairs)


# -- stackings and embeddings -------------------------------------------------


@dataclass
class LiftedStacking:
    stacking: Stacking
    unverifiable: list[str]


def lift_stacking(s: Stacking, cover: CoverData) -> LiftedStacking:
    """Pull a quotient stacking back to the ball through the projection."""
    q = cover.quotient
    sides, corners = {}, {}
    for e in cover.ball.edges:
        rank = s.side_rank(cover.proj_edge[e])
        sides[e] = tuple(sorted(cover.ball.sides_over(e), key=lambda x: rank[cover.project_side(x)]))
    for v in cover.ball.vertices:
        rank = s.corner_rank(cover.proj_vertex[v])
        corners[v] = tuple(sorted(cover.ball.corners_at(v), key=lambda c: rank[cover.project_corner(c)]))
    for qe in q.edges:
        if sorted(s.side_order.get(qe, ())) != sorted(q.sides_over(qe)):
            raise CoverError(f"quotient stacking does not order the sides over {qe}")
    return LiftedStacking(Stacking(sides, corners), sorted(f for f in cover.ball.faces if f in cover.frontier))


def check_boundary_embedded(cover: CoverData) -> Report:
    """Each interior face of the ball must be bounded by a simple cycle."""
    report = Report()
    for f in cover.interior_faces():
        w = cover.ball.faces[f]
        verts = cover.ball.face_vertices(f)
        edges = [l.edge for l in w]
        if len(set(verts)) != len(verts) or len(set(edges)) != len(edges):
            report.add("embedded", f"boundary of {f} is not a simple cycle", f)
        report.checked += 1
    report.horizon.extend(f"embedded: {f} on frontier" for f in sorted(cover.frontier & set(cover.ball.faces)))
    return report
