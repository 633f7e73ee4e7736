from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stackings import fixtures
from stackings.complex import Subcomplex, TwoComplex
from stackings.convert import gs_to_bs, staggered_to_tis, tis_to_tbs
from stackings.cover import identity_cover
from stackings.orders import Relation, preorder_closure
from stackings.structures import (
    BislimStructure,
    ISStructure,
    MalformedCertificate,
    StaggeredStructure,
    TISStructure,
    bislim_candidates,
    check_bislim,
    check_is,
    check_staggered,
    check_tbs,
    check_tis,
    check_two_collapsing,
    check_unique_strict_max,
    check_unique_strict_max_all,
    search_bislim,
    search_staggered,
    strengthen_unique_max,
)

from .strategies import presentation_complex


def all_preorders(ground: list[str]):
    """Every reflexive transitive relation on a small ground set."""
    off = [(a, b) for a in ground for b in ground if a != b]
    seen = set()
    for bits in itertools.product((0, 1), repeat=len(off)):
        pairs = {p for p, bit in zip(off, bits) if bit}
        rel = preorder_closure(Relation(frozenset(ground), frozenset(pairs)))
        if rel.pairs not in seen:
            seen.add(rel.pairs)
            yield rel


def brute_force_bislim(c: TwoComplex) -> bool:
    cover = identity_cover(c)
    faces = sorted(c.faces)
    choices = [sorted(c.face_edges(f)) for f in faces]
    preorders = list(all_preorders(sorted(c.edges)))
    for plus in itertools.product(*choices):
        for minus in itertools.product(*choices):
            for pre in preorders:
                b = BislimStructure(cover, pre, dict(zip(faces, plus)), dict(zip(faces, minus)))
                if check_bislim(b).ok:
                    return True
    return False


@pytest.fixture(scope="module")
def torus_bs(torus_ball, torus_stacking):
    return gs_to_bs(torus_stacking, torus_ball)


@pytest.fixture(scope="module")
def torus_tis(torus_ball):
    return staggered_to_tis(fixtures.staggered("torus"), torus_ball)


class TestBislim:
    def test_converted_structures_pass(self, torus_bs, f1_ball, f1_stacking):
        assert check_bislim(torus_bs).ok
        assert check_bislim(gs_to_bs(f1_stacking, f1_ball)).ok

    def test_missing_distinguished_edge(self, torus_bs):
        f = torus_bs.cover.interior_faces()[0]
        plus = {k: v for k, v in torus_bs.plus.items() if k != f}
        report = check_bislim(BislimStructure(torus_bs.cover, torus_bs.preorder, plus, torus_bs.minus))
        assert "BS.2" in report.tags()

    def test_non_invariant_choice(self, torus_bs):
        f = torus_bs.cover.interior_faces()[0]
        w = torus_bs.cover.ball.faces[f]
        other = next(l.edge for l in w if l.edge != torus_bs.plus[f])
        plus = {**torus_bs.plus, f: other}
        report = check_bislim(BislimStructure(torus_bs.cover, torus_bs.preorder, plus, torus_bs.minus))
        assert "BS.3" in report.tags()

    def test_flat_preorder_fails_propagation(self, torus_bs):
        ground = torus_bs.preorder.ground
        flat = Relation(ground, frozenset((a, b) for a in ground for b in ground))
        report = check_bislim(BislimStructure(torus_bs.cover, flat, torus_bs.plus, torus_bs.minus))
        assert {"BS.4", "BS.5"} & report.tags()

    def test_not_a_preorder(self, torus_bs):
        ground = torus_bs.preorder.ground
        report = check_bislim(BislimStructure(torus_bs.cover, Relation(ground), torus_bs.plus, torus_bs.minus))
        assert "BS.1" in report.tags()

    def test_off_boundary_edge_is_malformed(self, torus_bs):
        f = torus_bs.cover.interior_faces()[0]
        stray = next(e for e in torus_bs.cover.ball.edges if e not in torus_bs.cover.ball.face_edges(f))
        with pytest.raises(MalformedCertificate):
            check_bislim(BislimStructure(torus_bs.cover, torus_bs.preorder, {**torus_bs.plus, f: stray}, torus_bs.minus))

    def test_frontier_is_horizon(self, torus_bs):
        assert any("frontier" in h for h in check_bislim(torus_bs).horizon)

    def test_unique_max(self, torus_bs):
        assert check_unique_strict_max(torus_bs).ok
        strong = strengthen_unique_max(torus_bs)
        assert check_bislim(strong).ok
        assert check_unique_strict_max_all(strong).ok

    def test_tbs(self, torus_bs, torus_tis):
        # the order read off the stacking leaves parallel translates incomparable
        assert not check_tbs(torus_bs)
        assert check_tbs(tis_to_tbs(torus_tis))


class TestSearchBislim:
    def test_f2_has_none(self, f2):
        found, exhausted, explored = search_bislim(f2)
        assert found is None and exhausted
        # r1 has one edge, r2 two, so 1*2 choices for r+ and 1*2 for r-
        assert explored == 4

    def test_single_face(self):
        c = TwoComplex.build(["v"], [("a", "v", "v"), ("b", "v", "v")], [("r", [("a", 1), ("b", 1)])])
        found, exhausted, _ = search_bislim(c)
        assert found is not None and check_bislim(found).ok

    def test_budget(self, f2):
        found, exhausted, explored = search_bislim(f2, budget=1)
        assert found is None and not exhausted and explored == 1

    def test_torsion_mode_ignores_equal_boundaries(self):
        # r and s bound the same cycle, so in torsion mode they never meet
        c = TwoComplex.build(
            ["v"], [("a", "v", "v"), ("b", "v", "v")], [("r", [("a", 1), ("b", 1)]), ("s", [("b", 1), ("a", 1)])]
        )
        b = BislimStructure(identity_cover(c), preorder_closure(Relation(frozenset(c.edges))), {"r": "a", "s": "a"}, {"r": "b", "s": "b"})
        assert {"BS.4", "BS.5"} <= check_bislim(b).tags()
        assert check_bislim(b, torsion_mode=True).ok

    @settings(max_examples=25)
    @given(presentation_complex(max_faces=3, max_len=3))
    def test_torsion_mode_only_relaxes(self, c):
        cover = identity_cover(c)
        flat = preorder_closure(Relation(frozenset(c.edges)))
        for plus, minus in itertools.islice(bislim_candidates(c), 20):
            b = BislimStructure(cover, flat, plus, minus)
            assert set(check_bislim(b, torsion_mode=True).violations) <= set(check_bislim(b).violations)

    @settings(max_examples=25)
    @given(presentation_complex(max_faces=2, max_len=3))
    def test_agrees_with_brute_force(self, c):
        found, exhausted, _ = search_bislim(c)
        assert exhausted
        assert (found is not None) == brute_force_bislim(c)
        if found is not None:
            assert check_bislim(found).ok


class TestStaggered:
    def test_torus_fixture(self, torus):
        s = fixtures.staggered("torus")
        assert check_staggered(s).ok

    def test_ab_ba_is_not_staggered(self):
        found, exhausted, explored = search_staggered(fixtures.complex("ab-ba"))
        assert found is None and exhausted and explored > 0

    def test_search_torus(self, torus):
        found, exhausted, _ = search_staggered(torus)
        assert found is not None and check_staggered(found).ok

    def test_bad_propagation(self):
        # r has max a, s has max b; putting s below r with a below b fails
        c = TwoComplex.build(
            ["v"],
            [("a", "v", "v"), ("b", "v", "v"), ("x", "v", "v")],
            [("r", [("a", 1), ("x", 1)]), ("s", [("b", 1), ("x", -1), ("x", -1)])],
        )
        s = StaggeredStructure(c, ("s", "r"), ("a", "b"))
        assert check_staggered(s).tags() == {"staggered.max", "staggered.min"}
        assert check_staggered(StaggeredStructure(c, ("r", "s"), ("a", "b"))).ok

    def test_partial_face_order(self, torus):
        assert check_staggered(StaggeredStructure(torus, (), ("a",))).tags() == {"staggered.order"}

    def test_face_without_ordered_edge(self, f1):
        assert "staggered.E" in check_staggered(StaggeredStructure(f1, ("r1", "r2"), ())).tags()


class TestInvariantStaggering:
    def test_tis_fixture(self, torus_tis):
        r = check_tis(torus_tis)
        assert r.ok and r.checked > 0

    def test_incomparable_faces_fail_totality(self, torus_tis):
        faces = Relation(torus_tis.face_order.ground)
        t = TISStructure(torus_tis.cover, faces, torus_tis.plus_order, torus_tis.minus_order)
        assert "TIS.1" in check_tis(t).tags()

    def test_reversed_face_order_fails_propagation(self, torus_tis):
        rev = Relation(torus_tis.face_order.ground, frozenset((b, a) for a, b in torus_tis.face_order.pairs))
        t = TISStructure(torus_tis.cover, rev, torus_tis.plus_order, torus_tis.minus_order)
        assert "TIS.6" in check_tis(t).tags()

    def test_is_accepts_tis(self, torus_tis):
        i = ISStructure(torus_tis.cover, torus_tis.face_order, torus_tis.plus_order, torus_tis.minus_order)
        assert check_is(i).ok

    def test_empty_face_order_fails_forcing(self, torus_tis):
        i = ISStructure(torus_tis.cover, Relation(torus_tis.face_order.ground), torus_tis.plus_order, torus_tis.minus_order)
        assert {"IS.7", "IS.8"} <= check_is(i).tags()

    def test_no_plus_edges(self, torus_tis):
        i = ISStructure(torus_tis.cover, torus_tis.face_order, Relation(), torus_tis.minus_order)
        assert "IS.4" in check_is(i).tags()

    def test_foreign_cells_malformed(self, torus_tis):
        bogus = Relation(frozenset({"nowhere"}))
        with pytest.raises(MalformedCertificate):
            check_is(ISStructure(torus_tis.cover, bogus, torus_tis.plus_order, torus_tis.minus_order))


class TestCollapsing:
    def test_single_square_collapses(self):
        c = TwoComplex.build(
            ["p", "q", "r", "s"],
            [("a", "p", "q"), ("b", "q", "r"), ("c", "s", "r"), ("d", "p", "s")],
            [("f", [("a", 1), ("b", 1), ("c", -1), ("d", -1)])],
        )
        res = check_two_collapsing(c, Subcomplex.whole(c))
        assert res.ok and res.m_capped == 1 and res.collapse_count == 1

    def test_closed_torus_does_not(self, torus):
        res = check_two_collapsing(torus, Subcomplex.whole(torus))
        assert not res.ok and res.collapse_count == 0

    def test_empty(self, torus):
        assert check_two_collapsing(torus, Subcomplex.closure(torus, faces=[])).ok

    @settings(max_examples=30)
    @given(st.randoms(use_true_random=False))
    def test_ball_subcomplexes(self, torus_ball, rnd: random.Random):
        interior = torus_ball.interior_faces()
        faces = rnd.sample(interior, rnd.randint(1, len(interior)))
        res = check_two_collapsing(torus_ball.ball, Subcomplex.closure(torus_ball.ball, faces=faces))
        assert res.ok
