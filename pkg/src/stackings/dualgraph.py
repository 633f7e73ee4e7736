"""Dual graphs of 2-complexes, directed by a stacking."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .complex import Side, TwoComplex
from .orders import OrderError, Relation, find_cycle, transitive_closure
from .stacking import Stacking


class DualError(ValueError):
    pass


@dataclass(frozen=True)
class DualEdge:
    edge: str
    s1: Side
    s2: Side


@dataclass(frozen=True)
class DualGraph:
    """One vertex per face; one edge per pair of qualifying sides over a 1-cell."""

    vertices: tuple[str, ...]
    edges: tuple[DualEdge, ...]


@dataclass(frozen=True)
class DirectedDualGraph:
    vertices: tuple[str, ...]
    # (tail face, head face, 1-cell, lower side, upper side)
    arcs: tuple[tuple[str, str, str, Side, Side], ...]

    def successors(self) -> dict[str, set[str]]:
        succ = {v: set() for v in self.vertices}
        for tail, head, *_ in self.arcs:
            succ[tail].add(head)
        return succ

    def restrict(self, faces) -> "DirectedDualGraph":
        keep = set(faces)
        return DirectedDualGraph(
            tuple(v for v in self.vertices if v in keep),
            tuple(a for a in self.arcs if a[0] in keep and a[1] in keep),
        )


def build_dual(complex: TwoComplex, torsion_mode: bool = False) -> DualGraph:
    """Sides over a common 1-cell are joined when they belong to different
    faces, or in torsion mode to faces with different boundary cycles."""
    edges = []
    for e in sorted(complex.edges):
        for s1, s2 in combinations(sorted(complex.sides_over(e)), 2):
            if torsion_mode:
                if complex.same_boundary(s1.face, s2.face):
                    continue
            elif s1.face == s2.face:
                continue
            edges.append(DualEdge(e, s1, s2))
    return DualGraph(tuple(sorted(complex.faces)), tuple(edges))


def direct_dual(dual: DualGraph, s: Stacking) -> DirectedDualGraph:
    arcs = []
    for de in dual.edges:
        rank = s.side_rank(de.edge)
        if de.s1 not in rank or de.s2 not in rank:
            raise DualError(f"stacking does not order the sides over {de.edge}")
        lo, hi = (de.s1, de.s2) if rank[de.s1] < rank[de.s2] else (de.s2, de.s1)
        arcs.append((lo.face, hi.face, de.edge, lo, hi))
    return DirectedDualGraph(dual.vertices, tuple(arcs))


def is_acyclic(g: DirectedDualGraph) -> tuple[bool, list[str] | None]:
    """``(True, None)`` or ``(False, cycle)`` with the cycle closing on its first face."""
    cycle = find_cycle(g.successors())
    return (cycle is None, cycle)


def reachability_order(g: DirectedDualGraph) -> Relation:
    """``a < b`` iff there is a directed path from a to b."""
    ok, cycle = is_acyclic(g)
    if not ok:
        raise OrderError(f"directed dual has a cycle: {cycle}")
    base = Relation(frozenset(g.vertices), frozenset((t, h) for t, h, *_ in g.arcs))
    return transitive_closure(base)


def to_dot(g: DualGraph | DirectedDualGraph, name: str = "dual") -> str:
    lines = [f"{'digraph' if isinstance(g, DirectedDualGraph) else 'graph'} {_q(name)} {{"]
    for v in sorted(g.vertices):
        lines.append(f"  {_q(v)} [label={_q(v)}];")
    if isinstance(g, DirectedDualGraph):
        for tail, head, e, lo, hi in sorted(g.arcs):
            lines.append(f"  {_q(tail)} -> {_q(head)} [label={_q(e)}];")
    else:
        for de in sorted(g.edges, key=lambda d: (d.edge, d.s1, d.s2)):
            lines.append(f"  {_q(de.s1.face)} -- {_q(de.s2.face)} [label={_q(de.edge)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _q(x: str) -> str:
    return '"' + str(x).replace("\\", "\\\\").replace('"', '\\"') + '"'
