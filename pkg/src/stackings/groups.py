"""Groups given by generator images, used as deck groups of covers.

Each group solves its own word problem (``normal_form``) and, when it is
left-orderable, compares elements with a left-invariant total order.
Words are tuples of ``(generator, +1 | -1)``.
"""

from __future__ import annotations

import itertools
from typing import Hashable, Iterable, Mapping, Sequence

from .orders import Cmp, NoLeftOrder, free_reduce, magnus_compare

GroupWord = tuple[tuple[str, int], ...]


class GroupError(ValueError):
    pass


def parse_word(text: str | Sequence) -> GroupWord:
    """Accept ``"a b a^-1 b^-1"`` or a sequence of ``[gen, exp]`` pairs."""
    if isinstance(text, str):
        out = []
        for tok in text.split():
            if tok.endswith("^-1"):
                out.append((tok[:-3], -1))
            else:
                out.append((tok, 1))
        return tuple(out)
    return tuple((str(g), int(e)) for g, e in text)


def format_word(w: Iterable[tuple[str, int]]) -> str:
    return " ".join(g if e > 0 else f"{g}^-1" for g, e in w)


def inverse(w: Sequence[tuple[str, int]]) -> GroupWord:
    return tuple((g, -e) for g, e in reversed(w))


class Group:
    kind = "abstract"
    generators: tuple[str, ...] = ()

    def normal_form(self, w: Sequence[tuple[str, int]]) -> Hashable:
        raise NotImplementedError

    def format(self, key: Hashable) -> str:
        raise NotImplementedError

    def compare(self, w1: Sequence[tuple[str, int]], w2: Sequence[tuple[str, int]]) -> Cmp:
        raise NotImplementedError

    @property
    def is_trivial(self) -> bool:
        return False

    def equal(self, w1, w2) -> bool:
        return self.normal_form(w1) == self.normal_form(w2)

    def check_relators(self, relators: Mapping[str, Sequence[tuple[str, int]]]) -> None:
        identity = self.normal_form(())
        for name, r in relators.items():
            if self.normal_form(r) != identity:
                raise GroupError(f"relator {name} is not trivial in the {self.kind} oracle")

    def _check_gens(self, w) -> None:
        for g, e in w:
            if g not in self.generators or e not in (1, -1):
                raise GroupError(f"bad letter {(g, e)!r}")

    def as_json(self) -> dict:
        raise NotImplementedError


class FreeAbelianGroup(Group):
    """A group embedded in Z^n by generator images; lexicographic left order."""

    kind = "abelian"

    def __init__(self, images: Mapping[str, Sequence[int]]):
        self.images = {g: tuple(int(x) for x in v) for g, v in images.items()}
        self.generators = tuple(self.images)
        dims = {len(v) for v in self.images.values()}
        if len(dims) > 1:
            raise GroupError("generator images have different ranks")
        self.rank = dims.pop() if dims else 0

    def normal_form(self, w):
        self._check_gens(w)
        vec = [0] * self.rank
        for g, e in w:
            for i, x in enumerate(self.images[g]):
                vec[i] += e * x
        return tuple(vec)

    def format(self, key) -> str:
        return "(" + ",".join(str(x) for x in key) + ")"

    def compare(self, w1, w2) -> Cmp:
        a, b = self.normal_form(w1), self.normal_form(w2)
        return Cmp((a > b) - (a < b))

    def as_json(self) -> dict:
        return {"kind": self.kind, "images": {g: list(v) for g, v in self.images.items()}}


class FreeGroup(Group):
    """A free group on ``basis``; other generators map to words in the basis.

    Elements are compared by the Magnus expansion order.
    """

    kind = "free"

    def __init__(self, basis: Sequence[str], images: Mapping[str, Sequence[tuple[str, int]]] | None = None):
        self.basis = tuple(basis)
        self.index = {b: i + 1 for i, b in enumerate(self.basis)}
        self.images = {b: ((b, 1),) for b in self.basis}
        for g, w in (images or {}).items():
            self.images[g] = parse_word(w)
        for g, w in self.images.items():
            if any(b not in self.index for b, _ in w):
                raise GroupError(f"image of {g} leaves the basis")
        self.generators = tuple(self.images)

    def _signed(self, w) -> tuple[int, ...]:
        self._check_gens(w)
        out = []
        for g, e in w:
            img = self.images[g] if e > 0 else inverse(self.images[g])
            out.extend(self.index[b] * s for b, s in img)
        return free_reduce(out)

    def normal_form(self, w):
        return self._signed(w)

    def format(self, key) -> str:
        if not key:
            return "1"
        return ".".join(self.basis[abs(x) - 1] + ("" if x > 0 else "^-1") for x in key)

    def compare(self, w1, w2) -> Cmp:
        return magnus_compare(self._signed(w1), self._signed(w2), len(self.basis))

    def as_json(self) -> dict:
        return {
            "kind": self.kind,
            "basis": list(self.basis),
            "images": {g: [list(x) for x in w] for g, w in self.images.items() if g not in self.basis},
        }


class FiniteGroup(Group):
    """A finite group by multiplication table; element 0 is the identity."""

    kind = "finite"

    def __init__(self, table: Sequence[Sequence[int]], images: Mapping[str, int]):
        self.table = [list(map(int, row)) for row in table]
        self.images = {g: int(x) for g, x in images.items()}
        self.generators = tuple(self.images)
        n = len(self.table)
        self.order = n
        rng = list(range(n))
        if n == 0 or any(len(row) != n for row in self.table):
            raise GroupError("multiplication table is not square")
        if self.table[0] != rng or [row[0] for row in self.table] != rng:
            raise GroupError("element 0 is not a two-sided identity")
        for row in self.table:
            if sorted(row) != rng:
                raise GroupError("multiplication table is not a Latin square")
        for col in range(n):
            if sorted(row[col] for row in self.table) != rng:
                raise GroupError("multiplication table is not a Latin square")
        t = self.table
        for a, b, c in itertools.product(rng, repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise GroupError("multiplication table is not associative")
        if any(not 0 <= x < n for x in self.images.values()):
            raise GroupError("generator image outside the table")
        self.inv = {a: next(b for b in rng if t[a][b] == 0) for a in rng}

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def normal_form(self, w):
        self._check_gens(w)
        x = 0
        for g, e in w:
            y = self.images[g] if e > 0 else self.inv[self.images[g]]
            x = self.table[x][y]
        return x

    def format(self, key) -> str:
        return f"g{key}"

    def compare(self, w1, w2) -> Cmp:
        if self.order > 1:
            raise NoLeftOrder("a finite nontrivial group has torsion, so no left order exists")
        return Cmp.EQUAL

    def as_json(self) -> dict:
        return {"kind": self.kind, "table": self.table, "images": self.images}


def group_from_json(data: Mapping) -> Group:
    kind = data.get("kind")
    if kind == "abelian":
        return FreeAbelianGroup(data["images"])
    if kind == "free":
        return FreeGroup(data["basis"], {g: parse_word(w) for g, w in data.get("images", {}).items()})
    if kind == "finite":
        return FiniteGroup(data["table"], data["images"])
    raise GroupError(f"unknown oracle kind {kind!r}")
