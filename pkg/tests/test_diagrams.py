from __future__ import annotations

import dataclasses
import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stackings.complex import Letter, TwoComplex, invert_word
from stackings.dualgraph import build_dual, direct_dual, is_acyclic
from stackings.diagrams import (
    DiagramError,
    DiskDiagram,
    FuzzStats,
    acyclic_disks_test,
    check_diagram,
    check_reduced,
    cube_complex,
    cube_fixture,
    fuzz_diagrams,
    induce_stacking,
    iter_fuzz,
    rotation_from_cycles,
    write_counterexample,
)
from stackings.io import diagram_from_json, diagram_to_json
from stackings.stacking import (
    InvalidStacking,
    check_good,
    check_stacking,
    high_sides,
    is_good,
    low_sides,
    search_good_stacking,
    stacking_from_side_orders,
)


def mirrored_pair() -> tuple[DiskDiagram, TwoComplex]:
    """Two copies of the face ``a b`` glued along ``a``, one of them reflected."""
    target = TwoComplex.build(["v"], [("a", "v", "v"), ("b", "v", "v")], [("r", [("a", 1), ("b", 1)])])
    c = TwoComplex.build(
        ["p", "q"],
        [("e0", "p", "q"), ("e1", "q", "p"), ("e2", "q", "p")],
        [("f0", [("e0", 1), ("e1", 1)]), ("f1", [("e0", 1), ("e2", 1)])],
    )
    # p on the left, q on the right; e1 arcs over the top and e2 under the bottom
    outer = (Letter("e2", -1), Letter("e1", 1))
    ccw = [(Letter("e0", 1), Letter("e1", 1)), (Letter("e2", -1), Letter("e0", -1)), invert_word(outer)]
    d = DiskDiagram(
        c,
        rotation_from_cycles(c, ccw),
        outer,
        {"p": "v", "q": "v"},
        {"e0": "a", "e1": "b", "e2": "b"},
        {"f0": "r", "f1": "r"},
    )
    return d, target


class TestCube:
    def test_fixture_claims(self):
        c, s = cube_fixture()
        assert check_stacking(c, s).ok
        report = check_good(c, s)
        assert not report.ok
        assert all("no low" in v.message for v in report.violations)
        assert {v.cells[0] for v in report.violations} == {"B", "T"}
        assert all(high_sides(c, s, f) for f in c.faces)
        assert not low_sides(c, s, "B") and not low_sides(c, s, "T")
        ok, cycle = is_acyclic(direct_dual(build_dual(c), s))
        assert not ok
        assert set(cycle) == {"E1", "E2", "E3", "E4"}

    def test_no_good_stacking_exhaustive(self):
        # every one of the 2^12 side orders: 450 extend to stackings, none good
        c = cube_complex()
        edges = sorted(c.edges)
        valid = good = 0
        for flips in itertools.product((False, True), repeat=len(edges)):
            order = {e: tuple(c.sides_over(e))[:: -1 if f else 1] for e, f in zip(edges, flips)}
            try:
                s = stacking_from_side_orders(c, order)
            except InvalidStacking:
                continue
            valid += 1
            good += is_good(c, s)
        assert (valid, good) == (450, 0)
        res = search_good_stacking(c)
        assert not res.found and res.exhausted


class TestDiagramChecks:
    def test_mirrored_pair_is_a_disk_but_not_reduced(self):
        d, target = mirrored_pair()
        assert check_diagram(d, target).ok
        report = check_reduced(d)
        assert report.tags() == {"reduced"}
        assert report.violations[0].cells == ("f0", "f1", "e0")

    def test_broken_map(self):
        d, target = mirrored_pair()
        bad = dataclasses.replace(d, map_edge={**d.map_edge, "e1": "a"})
        assert "diagram.map" in check_diagram(bad, target).tags()

    def test_extra_edge_breaks_euler(self):
        d, target = mirrored_pair()
        c = TwoComplex(d.complex.vertices, {**d.complex.edges, "e3": ("p", "q")}, dict(d.complex.faces))
        bad = dataclasses.replace(d, complex=c, map_edge={**d.map_edge, "e3": "a"})
        assert {"diagram.euler", "diagram.outer"} <= check_diagram(bad, target).tags()

    def test_scrambled_rotation(self):
        d, target = mirrored_pair()
        rot = dict(d.rotation)
        rot["p"] = tuple(reversed(rot["p"]))
        rot["q"] = rot["q"][1:] + rot["q"][:1]
        bad = dataclasses.replace(d, rotation=rot)
        assert "diagram.rotation" in check_diagram(bad, target).tags()

    def test_wrong_outer(self):
        d, target = mirrored_pair()
        bad = dataclasses.replace(d, outer=(Letter("e1", 1),))
        assert "diagram.outer" in check_diagram(bad, target).tags()


class TestInducedStacking:
    def test_single_face_is_identity(self, f1, f1_stacking):
        d, _ = next(iter_fuzz(f1, f1_stacking, 1, 1, seed=3))
        s = induce_stacking(d, f1_stacking)
        (f,) = d.complex.faces
        # a lone face is a copy of its target: sides map bijectively
        images = sorted(d.project_side(x) for e in d.complex.edges for x in d.complex.sides_over(e))
        assert images == sorted(x for e in f1.edges for x in f1.sides_over(e) if x.face == d.map_face[f])
        assert check_stacking(d.complex, s).ok
        assert acyclic_disks_test(d, s)

    def test_collision_rejected(self):
        d, target = mirrored_pair()
        # both diagram faces map to r, so their sides over e0 have one image
        s = search_good_stacking(target).stacking
        with pytest.raises(DiagramError):
            induce_stacking(d, s)

    def test_preconditions(self, f1, f1_stacking):
        d, s = next(iter_fuzz(f1, f1_stacking, 1, 3, seed=5))
        with pytest.raises(DiagramError):
            acyclic_disks_test(d, dataclasses.replace(s, side_order={}))


class TestFuzz:
    def test_count_and_properties(self, f1, f1_stacking):
        out, stats = fuzz_diagrams(f1, f1_stacking, 40, 8, seed=11)
        assert len(out) == 40 == stats.produced
        for d, s in out:
            assert check_diagram(d, f1).ok
            assert check_reduced(d).ok
            assert check_good(d.complex, s).ok
            assert acyclic_disks_test(d, s)
            assert len(d.complex.faces) <= 8

    def test_some_diagrams_have_several_faces(self, f1, f1_stacking):
        out, _ = fuzz_diagrams(f1, f1_stacking, 40, 8, seed=11)
        assert max(len(d.complex.faces) for d, _ in out) >= 4

    def test_deterministic(self, f1, f1_stacking):
        a, _ = fuzz_diagrams(f1, f1_stacking, 10, 6, seed=7)
        b, _ = fuzz_diagrams(f1, f1_stacking, 10, 6, seed=7)
        assert [diagram_to_json(d) for d, _ in a] == [diagram_to_json(d) for d, _ in b]

    def test_size_cap_one(self, f1, f1_stacking):
        out, _ = fuzz_diagrams(f1, f1_stacking, 5, 1, seed=1)
        assert all(len(d.complex.faces) == 1 for d, _ in out)

    def test_zero_count(self, f1, f1_stacking):
        assert fuzz_diagrams(f1, f1_stacking, 0, 5, seed=1)[0] == []

    def test_rejections_counted(self, f1, f1_stacking):
        stats = FuzzStats()
        list(iter_fuzz(f1, f1_stacking, 20, 10, seed=2, stats=stats))
        assert sum(stats.rejected.values()) > 0
        assert set(stats.rejected) <= {"corner", "no-match", "cancellable", "pullback", "not-good"}

    def test_torus(self, torus, torus_stacking):
        out, _ = fuzz_diagrams(torus, torus_stacking, 15, 6, seed=4)
        assert out
        for d, s in out:
            assert check_diagram(d, torus).ok and acyclic_disks_test(d, s)

    @settings(max_examples=10)
    @given(st.integers(0, 10_000))
    def test_any_seed(self, f1, f1_stacking, seed):
        for d, s in iter_fuzz(f1, f1_stacking, 3, 6, seed):
            assert check_diagram(d, f1).ok
            assert acyclic_disks_test(d, s)


class TestSerialization:
    def test_roundtrip(self, f1, f1_stacking):
        d, _ = next(iter_fuzz(f1, f1_stacking, 1, 6, seed=9))
        again = diagram_from_json(json.loads(json.dumps(diagram_to_json(d))))
        assert diagram_to_json(again) == diagram_to_json(d)
        assert check_diagram(again, f1).ok

    def test_counterexample_file(self, tmp_path, f1, f1_stacking):
        d, s = next(iter_fuzz(f1, f1_stacking, 1, 4, seed=9))
        path = write_counterexample(tmp_path / "ce", "seed9", d, s, f1)
        doc = json.loads(path.read_text())
        assert set(doc) == {"target", "diagram", "stacking"}
        assert diagram_to_json(diagram_from_json(doc["diagram"])) == diagram_to_json(d)
