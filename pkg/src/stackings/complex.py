"""Finite combinatorial 2-complexes.

A :class:`TwoComplex` has vertices, oriented edges and faces.  Each face is
attached along a cyclic word of signed edges: the letter ``(e, +1)`` runs
from ``src(e)`` to ``dst(e)`` and ``(e, -1)`` runs backwards.  All semantics
are cyclic; the stored starting letter is only a convention.

A *side* ``(face, i)`` is the i-th letter of a face boundary, i.e. one
traversal of an edge.  A *corner* ``(face, i)`` is the visit to the vertex
between letters ``i - 1`` and ``i``; it is the start point of letter ``i``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

from .report import Report


class Letter(NamedTuple):
    edge: str
    dir: int

    def inverse(self) -> "Letter":
        return Letter(self.edge, -self.dir)


class Side(NamedTuple):
    face: str
    pos: int


class Corner(NamedTuple):
    face: str
    pos: int


Word = tuple[Letter, ...]


def word(letters: Iterable) -> Word:
    return tuple(Letter(str(e), int(d)) for e, d in letters)


def invert_word(w: Sequence[Letter]) -> Word:
    return tuple(l.inverse() for l in reversed(w))


def cyclic_rotations(w: Sequence) -> list[tuple]:
    w = tuple(w)
    return [w[i:] + w[:i] for i in range(len(w))] or [()]


def same_cycle(w1: Sequence[Letter], w2: Sequence[Letter]) -> bool:
    """Equality of cyclic words up to rotation and orientation reversal."""
    if len(w1) != len(w2):
        return False
    w2 = tuple(w2)
    rots = cyclic_rotations(w1) + cyclic_rotations(invert_word(w1))
    return w2 in rots


class ComplexError(ValueError):
    """Raised on structurally unusable input (unknown ids and similar)."""


@dataclass(frozen=True, eq=False)
class TwoComplex:
    vertices: tuple[str, ...]
    edges: Mapping[str, tuple[str, str]]
    faces: Mapping[str, Word]

    @classmethod
    def build(
        cls,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str, str]],
        faces: Iterable[tuple[str, Iterable]] = (),
    ) -> "TwoComplex":
        return cls(
            tuple(vertices),
            {e: (s, t) for e, s, t in edges},
            {f: word(w) for f, w in faces},
        )

    @classmethod
    def presentation(
        cls,
        generators: Sequence[str],
        relators: Mapping[str, Sequence[tuple[str, int]]],
        basepoint: str = "v",
    ) -> "TwoComplex":
        """The presentation complex: one vertex, a loop per generator."""
        return cls.build([basepoint], [(g, basepoint, basepoint) for g in generators], relators.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwoComplex):
            return NotImplemented
        return (
            set(self.vertices) == set(other.vertices)
            and dict(self.edges) == dict(other.edges)
            and dict(self.faces) == dict(other.faces)
        )

    # -- letters ----------------------------------------------------------

    def start(self, letter: Letter) -> str:
        s, t = self.edges[letter.edge]
        return s if letter.dir > 0 else t

    def end(self, letter: Letter) -> str:
        s, t = self.edges[letter.edge]
        return t if letter.dir > 0 else s

    def letter(self, side: Side) -> Letter:
        return self.faces[side.face][side.pos]

    def corner_vertex(self, corner: Corner) -> str:
        return self.start(self.faces[corner.face][corner.pos])

    def face_vertices(self, face: str) -> list[str]:
        return [self.start(l) for l in self.faces[face]]

    def face_edges(self, face: str) -> set[str]:
        return {l.edge for l in self.faces[face]}

    def traversals(self, face: str, edge: str) -> int:
        return sum(1 for l in self.faces[face] if l.edge == edge)

    def germ(self, side: Side, at_src: bool) -> Corner:
        """The corner of ``side``'s face sitting at one end of its edge."""
        n = len(self.faces[side.face])
        d = self.letter(side).dir
        # letter i starts at corner i and ends at corner i+1
        starts_here = (d > 0) == at_src
        return Corner(side.face, side.pos if starts_here else (side.pos + 1) % n)

    # -- incidence --------------------------------------------------------

    @cached_property
    def _sides(self) -> dict[str, list[Side]]:
        index: dict[str, list[Side]] = {e: [] for e in self.edges}
        for f, w in self.faces.items():
            for i, l in enumerate(w):
                index.setdefault(l.edge, []).append(Side(f, i))
        return index

    @cached_property
    def _corners(self) -> dict[str, list[Corner]]:
        index: dict[str, list[Corner]] = {v: [] for v in self.vertices}
        for f, w in self.faces.items():
            for i in range(len(w)):
                index.setdefault(self.start(w[i]), []).append(Corner(f, i))
        return index

    def sides_over(self, edge: str) -> list[Side]:
        if edge not in self.edges:
            raise ComplexError(f"unknown edge {edge!r}")
        return list(self._sides[edge])

    def corners_at(self, vertex: str) -> list[Corner]:
        if vertex not in set(self.vertices):
            raise ComplexError(f"unknown vertex {vertex!r}")
        return list(self._corners.get(vertex, []))

    def faces_on(self, edge: str) -> list[str]:
        """Distinct faces whose boundary runs over ``edge``, sorted."""
        return sorted({s.face for s in self._sides.get(edge, [])})

    def all_sides(self) -> list[Side]:
        return [Side(f, i) for f, w in self.faces.items() for i in range(len(w))]

    def all_corners(self) -> list[Corner]:
        return [Corner(f, i) for f, w in self.faces.items() for i in range(len(w))]

    def same_boundary(self, f1: str, f2: str) -> bool:
        return same_cycle(self.faces[f1], self.faces[f2])

    # -- transformations --------------------------------------------------

    def rotate_face(self, face: str, k: int) -> "TwoComplex":
        """Start ``face``'s boundary word k letters later."""
        w = self.faces[face]
        k %= len(w)
        faces = dict(self.faces)
        faces[face] = w[k:] + w[:k]
        return TwoComplex(self.vertices, dict(self.edges), faces)

    def relabel(self, vmap: Mapping[str, str], emap: Mapping[str, str], fmap: Mapping[str, str]) -> "TwoComplex":
        return TwoComplex(
            tuple(vmap[v] for v in self.vertices),
            {emap[e]: (vmap[s], vmap[t]) for e, (s, t) in self.edges.items()},
            {fmap[f]: tuple(Letter(emap[l.edge], l.dir) for l in w) for f, w in self.faces.items()},
        )


def validate(complex: TwoComplex) -> Report:
    """List every broken invariant; an empty report means the complex is valid."""
    report = Report()
    for kind, ids in (("vertex", complex.vertices),):
        for dup, n in Counter(ids).items():
            if n > 1:
                report.add("ids", f"duplicate {kind} id {dup!r}", dup)
    vertices = set(complex.vertices)
    for e, (s, t) in complex.edges.items():
        for v in (s, t):
            if v not in vertices:
                report.add("edge", f"edge {e} references unknown vertex {v!r}", e)
    for f, w in complex.faces.items():
        if not w:
            report.add("face", f"face {f} has an empty boundary word", f)
            continue
        if any(l.edge not in complex.edges for l in w):
            bad = sorted({l.edge for l in w if l.edge not in complex.edges})
            report.add("face", f"face {f} references unknown edge(s) {', '.join(bad)}", f)
            continue
        if any(l.dir not in (1, -1) for l in w):
            report.add("face", f"face {f} has a letter with direction other than +1/-1", f)
            continue
        n = len(w)
        for i in range(n):
            j = (i + 1) % n
            if complex.end(w[i]) != complex.start(w[j]):
                report.add("closed", f"face {f} is not a closed path between positions {i},{j}", f)
        for i in range(n):
            j = (i + 1) % n
            if n > 1 and w[j] == w[i].inverse():
                report.add("immersed", f"face {f} has a backtrack at positions {i},{j}", f)
    report.checked = len(complex.faces) + len(complex.edges)
    return report


@dataclass(frozen=True)
class Subcomplex:
    vertices: frozenset[str] = field(default_factory=frozenset)
    edges: frozenset[str] = field(default_factory=frozenset)
    faces: frozenset[str] = field(default_factory=frozenset)

    @classmethod
    def closure(
        cls, complex: TwoComplex, faces: Iterable[str] = (), edges: Iterable[str] = (), vertices: Iterable[str] = ()
    ) -> "Subcomplex":
        faces = frozenset(faces)
        es = set(edges)
        for f in faces:
            es |= complex.face_edges(f)
        vs = set(vertices)
        for e in es:
            vs |= set(complex.edges[e])
        return cls(frozenset(vs), frozenset(es), faces)

    @classmethod
    def whole(cls, complex: TwoComplex) -> "Subcomplex":
        return cls(frozenset(complex.vertices), frozenset(complex.edges), frozenset(complex.faces))

    def is_closed(self, complex: TwoComplex) -> bool:
        return all(complex.face_edges(f) <= self.edges for f in self.faces) and all(
            set(complex.edges[e]) <= self.vertices for e in self.edges
        )


def free_faces(complex: TwoComplex, sub: Subcomplex) -> list[tuple[str, str]]:
    """Pairs (face, edge) where ``edge`` lies on exactly one face of ``sub``
    and that face runs over it exactly once."""
    out = []
    for e in sorted(sub.edges):
        sides = [s for s in complex._sides.get(e, []) if s.face in sub.faces]
        if len(sides) == 1:
            out.append((sides[0].face, e))
    return out
