"""Certificates (bislim, staggered, invariant staggerings) and their checkers.

Every checker quantifies over the non-frontier cells of a cover ball and
records skipped cells as horizon items.  Condition tags follow the usual
numbering of each definition, e.g. ``BS.4`` or ``IS.7``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .complex import Subcomplex, TwoComplex, free_faces, validate
from .cover import CoverData, check_invariance, identity_cover
from .orders import (
    Relation,
    incomparable_pairs,
    is_partial_order,
    is_preorder,
    preorder_closure,
    transitive_closure,
)
from .report import Report


class MalformedCertificate(ValueError):
    pass


def _distinct(ball: TwoComplex, f1: str, f2: str, torsion_mode: bool) -> bool:
    if f1 == f2:
        return False
    return not (torsion_mode and ball.same_boundary(f1, f2))


# -- bislim -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BislimStructure:
    cover: CoverData
    preorder: Relation
    plus: Mapping[str, str]
    minus: Mapping[str, str]

    def strict(self, a: str, b: str) -> bool:
        return (a, b) in self.preorder.pairs and (b, a) not in self.preorder.pairs


def _check_assignment(ball: TwoComplex, name: str, assignment: Mapping[str, str]) -> None:
    for f, e in assignment.items():
        if f not in ball.faces:
            raise MalformedCertificate(f"{name} assigned to unknown face {f}")
        if e not in ball.face_edges(f):
            raise MalformedCertificate(f"{name}({f}) = {e} is not on the boundary of {f}")


def check_bislim(b: BislimStructure, torsion_mode: bool = False) -> Report:
    ball = b.cover.ball
    _check_assignment(ball, "r+", b.plus)
    _check_assignment(ball, "r-", b.minus)
    if not b.preorder.ground <= set(ball.edges):
        raise MalformedCertificate("preorder ground contains cells that are not edges of the ball")
    report = Report()
    if not is_preorder(b.preorder):
        report.add("BS.1", "the relation on edges is not reflexive and transitive")
    report.extend(check_invariance(b.preorder, b.cover, "BS.1"))
    report.extend(check_invariance(b.plus, b.cover, "BS.3"))
    report.extend(check_invariance(b.minus, b.cover, "BS.3"))
    ground = b.preorder.ground
    interior = b.cover.interior_faces()
    for r in interior:
        if r not in b.plus or r not in b.minus:
            report.add("BS.2", f"face {r} lacks a distinguished edge", r)
            continue
        if ball.traversals(r, b.plus[r]) != 1:
            report.add("BS.2", f"{r}+ = {b.plus[r]} is traversed {ball.traversals(r, b.plus[r])} times", r)
        report.checked += 1
    for r1 in interior:
        e = b.plus.get(r1)
        if e is None:
            continue
        for r2 in ball.faces_on(e):
            if not _distinct(ball, r1, r2, torsion_mode):
                continue
            if r2 not in b.plus or e not in ground or b.plus[r2] not in ground:
                report.horizon.append(f"BS.4: comparison of {r1}+ and {r2}+ leaves the ordered set")
                continue
            report.checked += 1
            if not b.strict(e, b.plus[r2]):
                report.add("BS.4", f"{r1}+ = {e} lies on {r2} but is not below {r2}+ = {b.plus[r2]}", r1, r2)
    for r2 in interior:
        e = b.minus.get(r2)
        if e is None or r2 not in b.plus:
            continue
        for r1 in ball.faces_on(e):
            if not _distinct(ball, r1, r2, torsion_mode):
                continue
            if r1 not in b.plus or b.plus[r1] not in ground or b.plus[r2] not in ground:
                report.horizon.append(f"BS.5: comparison of {r1}+ and {r2}+ leaves the ordered set")
                continue
            report.checked += 1
            if not b.strict(b.plus[r1], b.plus[r2]):
                report.add(
                    "BS.5", f"{r2}- = {e} lies on {r1} but {r1}+ = {b.plus[r1]} is not below {r2}+", r1, r2
                )
    _note_frontier(report, b.cover)
    return report.sorted()


def _note_frontier(report: Report, cover: CoverData) -> None:
    skipped = sorted(f for f in cover.ball.faces if f in cover.frontier)
    if skipped:
        report.horizon.append(f"{len(skipped)} frontier face(s) skipped")
    if cover.quotient.faces and not cover.interior_faces():
        report.horizon.append("the ball has no interior face; nothing face-level could be checked")


def plus_cells(b: BislimStructure) -> set[str]:
    """Edges of the ball covering some designated r+ side.

    When the choice of r+ is equivariant this is the full set of r+ cells
    of the cover that lie in the ball, including those whose face is not.
    """
    out = set(b.plus.values())
    # every lift of a quotient edge carries a lift of every side over it
    for e in set(b.plus.values()):
        out.update(b.cover.lifts_of_edge(b.cover.proj_edge[e]))
    return out


def check_unique_strict_max(b: BislimStructure) -> Report:
    """Each r+ must lie strictly above every other r+ cell on the boundary of r."""
    report = Report()
    eplus = set(b.plus.values())
    for r in b.cover.interior_faces():
        top = b.plus.get(r)
        if top is None:
            continue
        for e in sorted(b.cover.ball.face_edges(r) & eplus - {top}):
            report.checked += 1
            if not b.strict(e, top):
                report.add("unique-max", f"{e} on {r} is not strictly below {r}+ = {top}", r, e)
    return report


def check_unique_strict_max_all(b: BislimStructure) -> Report:
    """The stronger form: r+ strictly above every other edge of its boundary."""
    report = Report()
    ground = b.preorder.ground
    for r in b.cover.interior_faces():
        top = b.plus.get(r)
        if top is None:
            continue
        for e in sorted(b.cover.ball.face_edges(r) - {top}):
            if e not in ground or top not in ground:
                report.horizon.append(f"unique-max-all: {e} on {r} is not ordered")
                continue
            report.checked += 1
            if not b.strict(e, top):
                report.add("unique-max-all", f"{e} on {r} is not strictly below {r}+ = {top}", r, e)
    return report


def strengthen_unique_max(b: BislimStructure) -> BislimStructure:
    """Keep the order among r+ cells and put every other edge below all of them."""
    if not check_bislim(b).ok:
        raise MalformedCertificate("input is not a bislim structure")
    ground = b.preorder.ground
    eplus = plus_cells(b) & ground
    rest = ground - eplus
    pairs = {(x, x) for x in ground}
    pairs |= {(x, y) for x, y in b.preorder.pairs if x in eplus and y in eplus}
    pairs |= {(x, y) for x in rest for y in eplus}
    return BislimStructure(b.cover, Relation(ground, frozenset(pairs)), dict(b.plus), dict(b.minus))


def check_tbs(b: BislimStructure) -> bool:
    """Whether the strict order is total on the r+ cells of interior faces."""
    cells = sorted({b.plus[r] for r in b.cover.interior_faces() if r in b.plus})
    return all(b.strict(x, y) or b.strict(y, x) for x, y in itertools.combinations(cells, 2))


def bislim_candidates(complex: TwoComplex) -> Iterator[tuple[dict, dict]]:
    faces = sorted(complex.faces)
    choices = [sorted(complex.face_edges(f)) for f in faces]
    for plus in itertools.product(*choices):
        for minus in itertools.product(*choices):
            yield dict(zip(faces, plus)), dict(zip(faces, minus))


def search_bislim(complex: TwoComplex, torsion_mode: bool = False, budget: int = 1_000_000):
    """Exhaustive search for a bislim structure on a simply connected complex.

    For fixed r+/r- the conditions only ask for certain strict pairs, so a
    structure exists iff the preorder generated by those pairs keeps each of
    them strict.  Enumerating the assignments is therefore complete.
    Returns ``(structure or None, exhausted, explored)``.
    """
    cover = identity_cover(complex)
    explored = 0
    ground = frozenset(complex.edges)
    for plus, minus in bislim_candidates(complex):
        explored += 1
        if explored > budget:
            return None, False, explored - 1
        if any(complex.traversals(f, e) != 1 for f, e in plus.items()):
            continue
        need = set()
        for r1 in complex.faces:
            for r2 in complex.faces_on(plus[r1]):
                if _distinct(complex, r1, r2, torsion_mode):
                    need.add((plus[r1], plus[r2]))
            for r in complex.faces_on(minus[r1]):
                if _distinct(complex, r, r1, torsion_mode):
                    need.add((plus[r], plus[r1]))
        pre = preorder_closure(Relation(ground, frozenset(need)))
        if all((y, x) not in pre.pairs for x, y in need):
            return BislimStructure(cover, pre, plus, minus), True, explored
    return None, True, explored


# -- classical staggering -----------------------------------------------------


@dataclass(frozen=True)
class StaggeredStructure:
    complex: TwoComplex
    face_order: tuple[str, ...]
    edge_order: tuple[str, ...]

    def extremes(self, face: str) -> tuple[str, str] | None:
        rank = {e: i for i, e in enumerate(self.edge_order)}
        mine = sorted((e for e in self.complex.face_edges(face) if e in rank), key=rank.__getitem__)
        return (mine[-1], mine[0]) if mine else None


def check_staggered(s: StaggeredStructure) -> Report:
    report = Report()
    c = s.complex
    for v in validate(c):
        report.add("staggered.immersed", v.message, *v.cells)
    if sorted(s.face_order) != sorted(c.faces) or len(set(s.face_order)) != len(s.face_order):
        report.add("staggered.order", "face order is not a total order on the faces")
        return report
    if not set(s.edge_order) <= set(c.edges) or len(set(s.edge_order)) != len(s.edge_order):
        report.add("staggered.order", "edge order is not a total order on a set of edges")
        return report
    rank = {e: i for i, e in enumerate(s.edge_order)}
    ext = {}
    for f in s.face_order:
        ext[f] = s.extremes(f)
        if ext[f] is None:
            report.add("staggered.E", f"face {f} has no ordered edge on its boundary", f)
    for i, a in enumerate(s.face_order):
        for b in s.face_order[i + 1 :]:
            if ext[a] is None or ext[b] is None:
                continue
            report.checked += 1
            if not rank[ext[a][0]] < rank[ext[b][0]]:
                report.add("staggered.max", f"{a} < {b} but max({a}) = {ext[a][0]} is not below max({b}) = {ext[b][0]}", a, b)
            if not rank[ext[a][1]] < rank[ext[b][1]]:
                report.add("staggered.min", f"{a} < {b} but min({a}) = {ext[a][1]} is not below min({b}) = {ext[b][1]}", a, b)
    return report


def search_staggered(complex: TwoComplex, budget: int = 1_000_000):
    """Try every edge subset, edge order and face order.

    Returns ``(structure or None, exhausted, explored)``.
    """
    edges = sorted(complex.edges)
    faces = sorted(complex.faces)
    explored = 0
    if validate(complex).violations:
        return None, True, 0
    for k in range(1, len(edges) + 1):
        for subset in itertools.combinations(edges, k):
            if any(not (complex.face_edges(f) & set(subset)) for f in faces):
                continue
            for eo in itertools.permutations(subset):
                for fo in itertools.permutations(faces):
                    explored += 1
                    if explored > budget:
                        return None, False, explored - 1
                    s = StaggeredStructure(complex, fo, eo)
                    if check_staggered(s).ok:
                        return s, True, explored
    if not faces:
        return StaggeredStructure(complex, (), ()), True, explored
    return None, True, explored


# -- invariant staggerings ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class InvariantStaggering:
    """Shared shape of totally ordered and partially ordered staggerings.

    ``face_order``, ``plus_order`` and ``minus_order`` are strict orders; the
    grounds of the latter two are the designated edge sets E+ and E-.
    """

    cover: CoverData
    face_order: Relation
    plus_order: Relation
    minus_order: Relation

    @property
    def e_plus(self) -> frozenset[str]:
        return self.plus_order.ground

    @property
    def e_minus(self) -> frozenset[str]:
        return self.minus_order.ground

    def max_plus(self, face: str) -> set[str]:
        return self.plus_order.maximal(self.cover.ball.face_edges(face) & self.e_plus)

    def min_minus(self, face: str) -> set[str]:
        return self.minus_order.minimal(self.cover.ball.face_edges(face) & self.e_minus)


class TISStructure(InvariantStaggering):
    pass


class ISStructure(InvariantStaggering):
    pass


def _window_edges(st: InvariantStaggering) -> set[str]:
    out = set()
    for f in st.cover.interior_faces():
        out |= st.cover.ball.face_edges(f)
    return out


def _check_orders(st: InvariantStaggering, prefix: str, total: bool, report: Report) -> None:
    ball = st.cover.ball
    if not st.face_order.ground <= set(ball.faces):
        raise MalformedCertificate("face order mentions cells that are not faces of the ball")
    if not (st.e_plus | st.e_minus) <= set(ball.edges):
        raise MalformedCertificate("E+ or E- contains cells that are not edges of the ball")
    window_faces = set(st.cover.interior_faces()) & st.face_order.ground
    window_edges = _window_edges(st)
    named = ((1, "2-cell order", st.face_order, window_faces), (2, "+ order", st.plus_order, window_edges),
             (3, "- order", st.minus_order, window_edges))
    for idx, name, rel, window in named:
        tag = f"{prefix}.{idx}"
        if not is_partial_order(rel):
            report.add(tag, f"the {name} is not a strict partial order")
        if total:
            for a, b in incomparable_pairs(rel, window & rel.ground):
                report.add(tag, f"{a} and {b} are incomparable in the {name}", a, b)
        report.extend(check_invariance(rel, st.cover, tag))
    missing = sorted(set(st.cover.interior_faces()) - st.face_order.ground)
    for f in missing:
        report.add(f"{prefix}.1", f"interior face {f} is not in the 2-cell order", f)


def check_tis(t: InvariantStaggering) -> Report:
    report = Report()
    _check_orders(t, "TIS", True, report)
    ball = t.cover.ball
    top, bottom = {}, {}
    for f in t.cover.interior_faces():
        mx, mn = t.max_plus(f), t.min_minus(f)
        if not ball.face_edges(f) & t.e_plus:
            report.add("TIS.4", f"face {f} has no E+ edge on its boundary", f)
        if not ball.face_edges(f) & t.e_minus:
            report.add("TIS.4", f"face {f} has no E- edge on its boundary", f)
        if len(mx) == 1:
            top[f] = next(iter(mx))
            if ball.traversals(f, top[f]) != 1:
                report.add("TIS.5", f"max+({f}) = {top[f]} is traversed {ball.traversals(f, top[f])} times", f)
        if len(mn) == 1:
            bottom[f] = next(iter(mn))
        report.checked += 1
    for a, b in sorted(t.face_order.pairs):
        if a not in top or b not in top:
            continue
        report.checked += 1
        if (top[a], top[b]) not in t.plus_order.pairs:
            report.add("TIS.6", f"{a} < {b} but max+({a}) = {top[a]} is not below max+({b}) = {top[b]}", a, b)
        if a in bottom and b in bottom and (bottom[a], bottom[b]) not in t.minus_order.pairs:
            report.add("TIS.6", f"{a} < {b} but min-({a}) = {bottom[a]} is not below min-({b}) = {bottom[b]}", a, b)
    _note_frontier(report, t.cover)
    return report.sorted()


def check_is(i: InvariantStaggering, torsion_mode: bool = False) -> Report:
    report = Report()
    _check_orders(i, "IS", False, report)
    ball = i.cover.ball
    interior = i.cover.interior_faces()
    mx = {f: i.max_plus(f) for f in ball.faces}
    mn = {f: i.min_minus(f) for f in ball.faces}
    for f in interior:
        if not mx[f]:
            report.add("IS.4", f"face {f} has no E+ edge on its boundary", f)
        if not mn[f]:
            report.add("IS.4", f"face {f} has no E- edge on its boundary", f)
        for e in sorted(mx[f]):
            if ball.traversals(f, e) != 1:
                report.add("IS.5", f"{e} in Max+({f}) is traversed {ball.traversals(f, e)} times", f, e)
        report.checked += 1
    inner = set(interior)
    for a, b in sorted(i.face_order.pairs):
        if a not in inner or b not in inner:
            continue
        report.checked += 1
        if not all((s, t) in i.plus_order.pairs for s in mx[a] for t in mx[b]):
            report.add("IS.6", f"{a} < {b} but Max+({a}) is not below Max+({b})", a, b)
        if not all((s, t) in i.minus_order.pairs for s in mn[a] for t in mn[b]):
            report.add("IS.6", f"{a} < {b} but Min-({a}) is not below Min-({b})", a, b)
    for a in interior:
        for e in sorted(mx[a]):
            for b in ball.faces_on(e):
                if not _distinct(ball, a, b, torsion_mode):
                    continue
                report.checked += 1
                if (a, b) not in i.face_order.pairs:
                    report.add("IS.7", f"{e} in Max+({a}) lies on {b} but {a} is not below {b}", a, b)
        for e in sorted(mn[a]):
            for b in ball.faces_on(e):
                if not _distinct(ball, a, b, torsion_mode):
                    continue
                report.checked += 1
                if (b, a) not in i.face_order.pairs:
                    report.add("IS.8", f"{e} in Min-({a}) lies on {b} but {b} is not below {a}", a, b)
    _note_frontier(report, i.cover)
    return report.sorted()


# -- collapsing ---------------------------------------------------------------


@dataclass(frozen=True)
class CollapseResult:
    m_capped: int
    collapse_count: int
    ok: bool


def check_two_collapsing(complex: TwoComplex, sub: Subcomplex) -> CollapseResult:
    """A subcomplex with m faces must collapse along free faces of at least
    min(m, 2) distinct faces."""
    m = min(len(sub.faces), 2)
    count = len({f for f, _ in free_faces(complex, sub)})
    return CollapseResult(m, count, count >= m)
