from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stackings.complex import (
    ComplexError,
    Corner,
    Letter,
    Side,
    Subcomplex,
    TwoComplex,
    free_faces,
    invert_word,
    same_cycle,
    validate,
)

from .strategies import presentation_complex


def square() -> TwoComplex:
    return TwoComplex.build(
        ["p", "q", "r", "s"],
        [("a", "p", "q"), ("b", "q", "r"), ("c", "s", "r"), ("d", "p", "s")],
        [("f", [("a", 1), ("b", 1), ("c", -1), ("d", -1)])],
    )


class TestValidate:
    def test_fixtures_are_valid(self, f1, f2, torus):
        for c in (f1, f2, torus):
            assert validate(c).ok

    def test_unknown_edge(self):
        c = TwoComplex.build(["v"], [("a", "v", "v")], [("r", [("z", 1)])])
        assert validate(c).tags() == {"face"}

    def test_unknown_vertex(self):
        c = TwoComplex.build(["v"], [("a", "v", "w")])
        assert validate(c).tags() == {"edge"}

    def test_open_path(self):
        c = TwoComplex.build(["p", "q"], [("a", "p", "q")], [("r", [("a", 1)])])
        assert "closed" in validate(c).tags()

    def test_backtrack_is_not_immersed(self):
        c = TwoComplex.build(["v"], [("a", "v", "v"), ("b", "v", "v")], [("r", [("a", 1), ("b", 1), ("b", -1)])])
        assert validate(c).tags() == {"immersed"}

    def test_cyclic_backtrack(self):
        # a b a^-1 backtracks across the seam
        c = TwoComplex.build(["v"], [("a", "v", "v"), ("b", "v", "v")], [("r", [("a", 1), ("b", 1), ("a", -1)])])
        assert validate(c).tags() == {"immersed"}

    def test_length_one_face_allowed(self, f2):
        assert validate(f2).ok
        assert len(f2.faces["r1"]) == 1

    def test_duplicate_vertex(self):
        c = TwoComplex(("v", "v"), {}, {})
        assert validate(c).tags() == {"ids"}

    def test_empty_word(self):
        c = TwoComplex(("v",), {}, {"r": ()})
        assert validate(c).tags() == {"face"}

    def test_isolated_vertex_and_multi_edges(self):
        c = TwoComplex.build(["v", "w"], [("a", "v", "v"), ("b", "v", "v")], [("r", [("a", 1), ("b", 1)])])
        assert validate(c).ok

    @given(presentation_complex())
    def test_idempotent_and_order_independent(self, c):
        first = validate(c)
        assert validate(c).violations == first.violations
        shuffled = TwoComplex(
            tuple(reversed(c.vertices)),
            dict(reversed(list(c.edges.items()))),
            dict(reversed(list(c.faces.items()))),
        )
        assert sorted(validate(shuffled).violations, key=str) == sorted(first.violations, key=str)


class TestIncidence:
    def test_sides_and_corners(self, f1):
        assert f1.sides_over("a") == [Side("r1", 0), Side("r2", 0)]
        assert len(f1.corners_at("v")) == 6

    def test_germ(self):
        c = square()
        # letter 2 is c^-1: it starts at r (dst of c) and ends at s (src of c)
        assert c.germ(Side("f", 2), at_src=True) == Corner("f", 3)
        assert c.germ(Side("f", 2), at_src=False) == Corner("f", 2)
        assert c.corner_vertex(Corner("f", 3)) == "s"

    def test_unknown_cells(self, f1):
        with pytest.raises(ComplexError):
            f1.sides_over("zz")
        with pytest.raises(ComplexError):
            f1.corners_at("zz")

    def test_traversals(self):
        c = TwoComplex.build(["v"], [("a", "v", "v")], [("r", [("a", 1), ("a", 1)])])
        assert c.traversals("r", "a") == 2

    def test_same_boundary(self):
        c = TwoComplex.build(
            ["v"], [("a", "v", "v"), ("b", "v", "v")], [("r", [("a", 1), ("b", 1)]), ("s", [("b", -1), ("a", -1)])]
        )
        assert c.same_boundary("r", "s")

    @given(presentation_complex(), st.integers(0, 5))
    def test_same_cycle_under_rotation_and_inversion(self, c, k):
        for w in c.faces.values():
            rot = w[k % len(w) :] + w[: k % len(w)]
            assert same_cycle(w, rot)
            assert same_cycle(w, invert_word(rot))


class TestTransformations:
    def test_rotate_face(self, f1):
        r = f1.rotate_face("r1", 1)
        assert r.faces["r1"] == f1.faces["r1"][1:] + f1.faces["r1"][:1]
        assert validate(r).ok

    def test_relabel_roundtrip(self, f1):
        vmap, emap, fmap = {"v": "x"}, {"a": "A", "b": "B", "c": "C"}, {"r1": "R1", "r2": "R2"}
        back = f1.relabel(vmap, emap, fmap).relabel(*({b: a for a, b in m.items()} for m in (vmap, emap, fmap)))
        assert back == f1

    def test_equality_ignores_listing_order(self, f1):
        assert TwoComplex(tuple(reversed(f1.vertices)), dict(f1.edges), dict(f1.faces)) == f1


class TestSubcomplexes:
    def test_closure(self):
        c = square()
        sub = Subcomplex.closure(c, faces=["f"])
        assert sub.edges == {"a", "b", "c", "d"}
        assert sub.vertices == {"p", "q", "r", "s"}
        assert sub.is_closed(c)

    def test_square_has_four_free_faces(self):
        c = square()
        assert free_faces(c, Subcomplex.whole(c)) == [("f", "a"), ("f", "b"), ("f", "c"), ("f", "d")]

    def test_torus_has_none(self, torus):
        assert free_faces(torus, Subcomplex.whole(torus)) == []

    def test_twice_traversed_edge_is_not_free(self):
        c = TwoComplex.build(["v"], [("a", "v", "v")], [("r", [("a", 1), ("a", 1)])])
        assert free_faces(c, Subcomplex.whole(c)) == []

    @given(presentation_complex(), st.randoms(use_true_random=False))
    def test_free_faces_stable_under_relabeling(self, c, rnd: random.Random):
        names = [f"x{i}" for i in range(20)]
        rnd.shuffle(names)
        emap = {e: names.pop() for e in c.edges}
        fmap = {f: names.pop() for f in c.faces}
        vmap = {v: names.pop() for v in c.vertices}
        image = c.relabel(vmap, emap, fmap)
        before = sorted((fmap[f], emap[e]) for f, e in free_faces(c, Subcomplex.whole(c)))
        assert sorted(free_faces(image, Subcomplex.whole(image))) == before


def test_letter_inverse():
    assert Letter("a", 1).inverse() == Letter("a", -1)
    assert invert_word((Letter("a", 1), Letter("b", -1))) == (Letter("b", 1), Letter("a", -1))
