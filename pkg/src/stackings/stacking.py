"""Stackings as compatible side and corner orders.

An injective lift of the boundary words into ``X^1 x R`` is determined up to
isotopy by two families of total orders: the order of the sides over each
open edge, and the order of the corners over each vertex.  Continuity forces
the orders to agree: the sides over an edge must be ordered the same way as
their corner germs at either end.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Mapping

from .complex import Corner, Side, TwoComplex
from .orders import OrderError, Relation, embed_in_rationals, linear_extension
from .report import Report


class InvalidStacking(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Stacking:
    side_order: Mapping[str, tuple[Side, ...]]
    corner_order: Mapping[str, tuple[Corner, ...]]

    def __eq__(self, other):
        if not isinstance(other, Stacking):
            return NotImplemented
        strip = lambda d: {k: tuple(v) for k, v in d.items() if v}
        return strip(self.side_order) == strip(other.side_order) and strip(self.corner_order) == strip(
            other.corner_order
        )

    def side_rank(self, edge: str) -> dict[Side, int]:
        return {s: i for i, s in enumerate(self.side_order.get(edge, ()))}

    def corner_rank(self, vertex: str) -> dict[Corner, int]:
        return {c: i for i, c in enumerate(self.corner_order.get(vertex, ()))}

    def lowest(self, edge: str) -> Side | None:
        seq = self.side_order.get(edge, ())
        return seq[0] if seq else None

    def highest(self, edge: str) -> Side | None:
        seq = self.side_order.get(edge, ())
        return seq[-1] if seq else None


def _induced(complex: TwoComplex, edge: str, sides, rank: Mapping[Corner, int], at_src: bool) -> list[Side]:
    return sorted(sides, key=lambda s: rank[complex.germ(s, at_src)])


def check_stacking(complex: TwoComplex, s: Stacking) -> Report:
    report = Report()
    for e in sorted(complex.edges):
        want = sorted(complex.sides_over(e))
        got = list(s.side_order.get(e, ()))
        if sorted(got) != want or len(set(got)) != len(got):
            report.add("stack.total", f"side order over {e} is not a total order on its sides", e)
    for v in sorted(complex.vertices):
        want = sorted(complex.corners_at(v))
        got = list(s.corner_order.get(v, ()))
        if sorted(got) != want or len(set(got)) != len(got):
            report.add("stack.total", f"corner order at {v} is not a total order on its corners", v)
    extra = (set(s.side_order) - set(complex.edges)) | (set(s.corner_order) - set(complex.vertices))
    for x in sorted(extra):
        if s.side_order.get(x) or s.corner_order.get(x):
            report.add("stack.total", f"order given for unknown cell {x}", x)
    if report.violations:
        return report
    for e in sorted(complex.edges):
        src, dst = complex.edges[e]
        sides = list(s.side_order[e]) if e in s.side_order else []
        for at_src, v in ((True, src), (False, dst)):
            if _induced(complex, e, sides, s.corner_rank(v), at_src) != sides:
                end = "source" if at_src else "target"
                report.add("stack.compatible", f"incompatible at edge {e} ({end} end {v})", e)
        report.checked += 1
    return report


def low_sides(complex: TwoComplex, s: Stacking, face: str) -> list[Side]:
    n = len(complex.faces[face])
    return [Side(face, i) for i in range(n) if s.lowest(complex.faces[face][i].edge) == Side(face, i)]


def high_sides(complex: TwoComplex, s: Stacking, face: str) -> list[Side]:
    n = len(complex.faces[face])
    return [Side(face, i) for i in range(n) if s.highest(complex.faces[face][i].edge) == Side(face, i)]


def check_good(complex: TwoComplex, s: Stacking, torsion_mode: bool = False) -> Report:
    """Every face needs a side lowest over its edge and a side highest over
    its edge (possibly the same side).  ``torsion_mode`` changes nothing."""
    base = check_stacking(complex, s)
    if not base.ok:
        raise InvalidStacking("; ".join(v.message for v in base.violations))
    report = Report()
    for f in sorted(complex.faces):
        if not low_sides(complex, s, f):
            report.add("GS.low", f"no low witness for face {f}", f)
        if not high_sides(complex, s, f):
            report.add("GS.high", f"no high witness for face {f}", f)
        report.checked += 1
    return report


def is_good(complex: TwoComplex, s: Stacking) -> bool:
    return check_stacking(complex, s).ok and check_good(complex, s).ok


# -- search -------------------------------------------------------------------


@dataclass
class SearchResult:
    stacking: Stacking | None
    exhausted: bool
    explored: int = 0

    @property
    def found(self) -> bool:
        return self.stacking is not None

    def as_json(self) -> dict:
        return {"found": self.found, "exhausted": self.exhausted, "explored": self.explored}


def iter_stackings(
    complex: TwoComplex,
    face_ok: Callable[[str, dict[str, tuple[Side, ...]]], bool] | None = None,
    counter: list[int] | None = None,
    budget: int | None = None,
) -> Iterator[Stacking]:
    """All stackings, in lexicographic order of per-vertex corner permutations.

    ``face_ok(face, side_orders)`` prunes once every edge of a face has its
    side order fixed.  ``counter[0]`` is incremented per permutation tried;
    past ``budget`` tries the generator raises :class:`SearchBudgetExceeded`.
    """
    counter = counter if counter is not None else [0]
    verts = [v for v in sorted(complex.vertices) if complex.corners_at(v)]
    order_of = {v: i for i, v in enumerate(verts)}
    # an edge is decided once both endpoints are placed
    decided_at: dict[int, list[str]] = {}
    for e, (a, b) in complex.edges.items():
        if complex.sides_over(e):
            decided_at.setdefault(max(order_of[a], order_of[b]), []).append(e)
    faces_at: dict[int, list[str]] = {}
    for f in complex.faces:
        k = max(max(order_of[a], order_of[b]) for a, b in (complex.edges[e] for e in complex.face_edges(f)))
        faces_at.setdefault(k, []).append(f)
    for k in decided_at:
        decided_at[k].sort()
    corner_orders: dict[str, tuple[Corner, ...]] = {}
    side_orders: dict[str, tuple[Side, ...]] = {}

    def place(k: int) -> Iterator[Stacking]:
        if k == len(verts):
            yield Stacking(
                {e: side_orders.get(e, ()) for e in complex.edges},
                {v: corner_orders.get(v, ()) for v in complex.vertices},
            )
            return
        v = verts[k]
        for perm in itertools.permutations(sorted(complex.corners_at(v))):
            counter[0] += 1
            if budget is not None and counter[0] > budget:
                raise SearchBudgetExceeded(counter[0])
            corner_orders[v] = perm
            ok = True
            for e in decided_at.get(k, []):
                src, dst = complex.edges[e]
                sides = complex.sides_over(e)
                a = _induced(complex, e, sides, {c: i for i, c in enumerate(corner_orders[src])}, True)
                b = _induced(complex, e, sides, {c: i for i, c in enumerate(corner_orders[dst])}, False)
                if a != b:
                    ok = False
                    break
                side_orders[e] = tuple(a)
            if ok and face_ok is not None:
                ok = all(face_ok(f, side_orders) for f in faces_at.get(k, []))
            if ok:
                yield from place(k + 1)
            for e in decided_at.get(k, []):
                side_orders.pop(e, None)
        corner_orders.pop(v, None)

    yield from place(0)


class SearchBudgetExceeded(Exception):
    pass


def search_good_stacking(complex: TwoComplex, budget: int = 1_000_000) -> SearchResult:
    """Exhaustive search for a good stacking; the first witness in search order wins."""

    def face_ok(f: str, side_orders) -> bool:
        w = complex.faces[f]
        low = any(side_orders[l.edge][0] == Side(f, i) for i, l in enumerate(w))
        high = any(side_orders[l.edge][-1] == Side(f, i) for i, l in enumerate(w))
        return low and high

    counter = [0]
    try:
        found = next(iter_stackings(complex, face_ok, counter, budget), None)
    except SearchBudgetExceeded:
        return SearchResult(None, False, counter[0])
    return SearchResult(found, True, counter[0])


# -- heights ------------------------------------------------------------------


@dataclass
class HeightAssignment:
    corner: dict[Corner, Fraction] = field(default_factory=dict)
    side: dict[Side, tuple[Fraction, Fraction]] = field(default_factory=dict)


def export_heights(complex: TwoComplex, s: Stacking) -> HeightAssignment:
    """Corner heights are ranks per vertex; a side is the segment between its
    two corner germs, recorded as (height at source end, height at target end)."""
    h = HeightAssignment()
    for v, seq in s.corner_order.items():
        h.corner.update(embed_in_rationals(seq))
    for e in complex.edges:
        for side in complex.sides_over(e):
            h.side[side] = (h.corner[complex.germ(side, True)], h.corner[complex.germ(side, False)])
    return h


def stacking_from_heights(complex: TwoComplex, h: HeightAssignment) -> Stacking:
    sides = {e: tuple(sorted(complex.sides_over(e), key=lambda x: h.side[x])) for e in complex.edges}
    corners = {v: tuple(sorted(complex.corners_at(v), key=lambda c: h.corner[c])) for v in complex.vertices}
    return Stacking(sides, corners)


def stacking_from_side_orders(complex: TwoComplex, side_order: Mapping[str, tuple[Side, ...]]) -> Stacking:
    """Complete side orders to a stacking by choosing compatible corner orders.

    At each vertex the corners are constrained by every edge end landing
    there; any linear extension of those constraints is compatible.
    """
    rel: dict[str, set[tuple[Corner, Corner]]] = {v: set() for v in complex.vertices}
    for e, seq in side_order.items():
        src, dst = complex.edges[e]
        for at_src, v in ((True, src), (False, dst)):
            germs = [complex.germ(x, at_src) for x in seq]
            rel[v].update(zip(germs, germs[1:]))
    corners = {}
    for v in complex.vertices:
        ground = frozenset(complex.corners_at(v))
        try:
            corners[v] = tuple(linear_extension(Relation(ground, frozenset(rel[v]))))
        except OrderError as exc:
            raise InvalidStacking(f"side orders admit no corner order at {v}: {exc}") from exc
    return Stacking({e: tuple(side_order.get(e, ())) for e in complex.edges}, corners)


def rotate_stacking(complex: TwoComplex, s: Stacking, face: str, k: int) -> Stacking:
    """Re-index ``s`` for ``complex.rotate_face(face, k)``."""
    n = len(complex.faces[face])

    def fix(x):
        return type(x)(x.face, (x.pos - k) % n) if x.face == face else x

    return Stacking(
        {e: tuple(fix(x) for x in seq) for e, seq in s.side_order.items()},
        {v: tuple(fix(x) for x in seq) for v, seq in s.corner_order.items()},
    )
