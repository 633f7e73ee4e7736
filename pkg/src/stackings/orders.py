"""Finite relations, preorders and partial orders, plus left orders on
free groups via the Magnus expansion.

Finite orders are stored extensionally as pair sets.  A pair ``(a, b)`` means
``a <= b`` for a preorder and ``a < b`` for a strict order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence


class OrderError(ValueError):
    pass


@dataclass(frozen=True)
class Relation:
    ground: frozenset = field(default_factory=frozenset)
    pairs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "ground", frozenset(self.ground))
        object.__setattr__(self, "pairs", frozenset(tuple(p) for p in self.pairs))
        stray = {x for p in self.pairs for x in p} - self.ground
        if stray:
            raise OrderError(f"pairs mention elements outside the ground set: {sorted(map(str, stray))}")

    @classmethod
    def from_chain(cls, chain: Sequence) -> "Relation":
        """The strict total order listing ``chain`` in ascending order."""
        return cls(frozenset(chain), frozenset((a, b) for i, a in enumerate(chain) for b in chain[i + 1 :]))

    @classmethod
    def from_key(cls, ground: Iterable, key: Callable) -> "Relation":
        """Strict order ``a < b`` iff ``key(a) < key(b)``; equal keys stay incomparable."""
        ground = sorted(ground)
        keys = {x: key(x) for x in ground}
        return cls(frozenset(ground), frozenset((a, b) for a in ground for b in ground if keys[a] < keys[b]))

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs

    def less(self, a, b) -> bool:
        return (a, b) in self.pairs

    def restrict(self, subset: Iterable) -> "Relation":
        sub = frozenset(subset) & self.ground
        return Relation(sub, frozenset(p for p in self.pairs if p[0] in sub and p[1] in sub))

    def union(self, other: "Relation") -> "Relation":
        return Relation(self.ground | other.ground, self.pairs | other.pairs)

    def successors(self) -> dict:
        succ: dict = {x: set() for x in self.ground}
        for a, b in self.pairs:
            succ[a].add(b)
        return succ

    def maximal(self, subset: Iterable) -> set:
        sub = set(subset)
        return {x for x in sub if not any((x, y) in self.pairs for y in sub if y != x)}

    def minimal(self, subset: Iterable) -> set:
        sub = set(subset)
        return {x for x in sub if not any((y, x) in self.pairs for y in sub if y != x)}

    def as_json(self) -> dict:
        return {"ground": sorted(self.ground), "pairs": sorted([list(p) for p in self.pairs])}

    @classmethod
    def from_json(cls, data: Mapping) -> "Relation":
        if set(data) - {"ground", "pairs"}:
            raise OrderError(f"unknown order fields {sorted(set(data) - {'ground', 'pairs'})}")
        return cls(frozenset(data.get("ground", [])), frozenset(tuple(p) for p in data.get("pairs", [])))


def transitive_closure(r: Relation) -> Relation:
    succ = r.successors()
    pairs = set()
    for a in r.ground:
        seen: set = set()
        stack = list(succ[a])
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(succ[x] - seen)
        pairs.update((a, x) for x in seen)
    return Relation(r.ground, frozenset(pairs))


def preorder_closure(r: Relation) -> Relation:
    closed = transitive_closure(r)
    return Relation(r.ground, closed.pairs | {(x, x) for x in r.ground})


def is_reflexive(r: Relation) -> bool:
    return all((x, x) in r.pairs for x in r.ground)


def is_transitive(r: Relation) -> bool:
    succ = r.successors()
    return all(c in succ[a] for a, b in r.pairs for c in succ[b])


def is_preorder(r: Relation) -> bool:
    return is_reflexive(r) and is_transitive(r)


def is_partial_order(r: Relation) -> bool:
    """Strict partial order: irreflexive and transitive."""
    return all(a != b for a, b in r.pairs) and is_transitive(r)


def is_total(r: Relation, on: Iterable | None = None) -> bool:
    elems = sorted(r.ground if on is None else set(on))
    return all(
        (a, b) in r.pairs or (b, a) in r.pairs for i, a in enumerate(elems) for b in elems[i + 1 :]
    )


def incomparable_pairs(r: Relation, on: Iterable) -> list[tuple]:
    elems = sorted(on)
    return [
        (a, b)
        for i, a in enumerate(elems)
        for b in elems[i + 1 :]
        if (a, b) not in r.pairs and (b, a) not in r.pairs
    ]


def strict_part(r: Relation) -> Relation:
    return Relation(r.ground, frozenset((a, b) for a, b in r.pairs if (b, a) not in r.pairs))


def strict_closure(r: Relation) -> Relation:
    """Transitive closure of the strict pairs ``a <= b and not b <= a``."""
    if not is_preorder(r):
        raise OrderError("strict_closure expects a preorder")
    out = transitive_closure(strict_part(r))
    assert is_partial_order(out)
    return out


def find_cycle(succ: Mapping[Hashable, Iterable]) -> list | None:
    """A directed cycle ``[x0, x1, ..., x0]`` in an adjacency map, or None."""
    white, grey, black = 0, 1, 2
    colour = {x: white for x in succ}
    for root in sorted(succ, key=str):
        if colour[root] != white:
            continue
        path = [root]
        iters = [iter(sorted(succ[root], key=str))]
        colour[root] = grey
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                colour[path.pop()] = black
                iters.pop()
                continue
            if colour.get(nxt, white) == grey:
                return path[path.index(nxt) :] + [nxt]
            if colour.get(nxt, white) == white:
                colour[nxt] = grey
                path.append(nxt)
                iters.append(iter(sorted(succ.get(nxt, ()), key=str)))
    return None


def linear_extension(p: Relation, key: Callable | None = None) -> list:
    """Topologically sort ``p``; among available elements the least ``key``
    (default: the element itself) goes first."""
    key = key or (lambda x: x)
    succ = p.successors()
    indeg = {x: 0 for x in p.ground}
    for _, b in p.pairs:
        indeg[b] += 1
    heap = [(key(x), x) for x, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, x = heapq.heappop(heap)
        out.append(x)
        for y in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, (key(y), y))
    if len(out) != len(p.ground):
        cycle = find_cycle({x: succ[x] for x in p.ground if indeg[x] > 0})
        raise OrderError(f"relation has a cycle: {cycle}")
    return out


def embed_in_rationals(chain: Sequence) -> dict:
    """Rank k of the chain goes to the rational k."""
    return {x: Fraction(k) for k, x in enumerate(chain)}


# -- left orders ------------------------------------------------------------


class Cmp(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class UndecidedAtCap(ArithmeticError):
    """The Magnus comparison found no difference up to the degree cap."""


class NoLeftOrder(ValueError):
    """The group has torsion, so it carries no left-invariant order."""


MAGNUS_DEGREE_CAP = 12


def free_reduce(w: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def magnus_series(w: Sequence[int], degree: int) -> dict[tuple[int, ...], int]:
    """Truncated Magnus expansion of a word in signed generator indices
    (1-based; negative means inverse).  Monomials are index tuples."""
    series: dict[tuple[int, ...], int] = {(): 1}
    for x in w:
        g = abs(x)
        # x -> 1 + X ; x^-1 -> 1 - X + X^2 - ...
        if x > 0:
            factor = {(): 1, (g,): 1}
        else:
            factor = {(g,) * k: (-1) ** k for k in range(degree + 1)}
        prod: dict[tuple[int, ...], int] = {}
        for m, c in series.items():
            room = degree - len(m)
            for fm, fc in factor.items():
                if len(fm) <= room:
                    key = m + fm
                    prod[key] = prod.get(key, 0) + c * fc
        series = {m: c for m, c in prod.items() if c}
    return series


def magnus_compare(w1: Sequence[int], w2: Sequence[int], rank: int, cap: int = MAGNUS_DEGREE_CAP) -> Cmp:
    """Compare two free-group elements by the first differing Magnus
    coefficient in degree-then-lexicographic monomial order.

    The order is bi-invariant, so in particular left-invariant.
    """
    for x in list(w1) + list(w2):
        if not 1 <= abs(x) <= rank or x == 0:
            raise ValueError(f"letter {x} outside generators 1..{rank}")
    r1, r2 = free_reduce(w1), free_reduce(w2)
    if r1 == r2:
        return Cmp.EQUAL
    degree = 1
    while True:
        s1, s2 = magnus_series(r1, degree), magnus_series(r2, degree)
        diffs = [m for m in set(s1) | set(s2) if s1.get(m, 0) != s2.get(m, 0)]
        if diffs:
            m = min(diffs, key=lambda t: (len(t), t))
            return Cmp.GREATER if s1.get(m, 0) > s2.get(m, 0) else Cmp.LESS
        if degree >= cap:
            raise UndecidedAtCap(f"no Magnus difference up to degree {cap}")
        degree = min(cap, degree * 2)
