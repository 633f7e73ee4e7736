from __future__ import annotations

import json

import pytest

from stackings import fixtures
from stackings.cli import FAIL, INCONCLUSIVE, MALFORMED, PASS, RunConfig, main
from stackings.io import MalformedInput, complex_to_json, cover_to_json


def lines(text: str) -> list[dict]:
    return [json.loads(l) for l in text.splitlines() if l.strip()]


@pytest.fixture
def files(tmp_path):
    """Write a fixture to disk through the CLI and return its path."""

    def make(name: str, what: str) -> str:
        path = tmp_path / f"{name}-{what}.json"
        assert main(["fixture", name, "--what", what, "-o", str(path)]) == PASS
        return str(path)

    return make


def run(capsys, *argv: str) -> tuple[int, list[dict]]:
    code = main(list(argv))
    return code, lines(capsys.readouterr().out)


class TestSearchAndCheck:
    def test_f1_gs(self, capsys, files, tmp_path):
        out = tmp_path / "gs.json"
        code, summary = run(capsys, "search", "gs", files("f1", "presentation"), "-o", str(out))
        assert code == PASS and summary[-1]["found"] and summary[-1]["exhausted"]
        code, report = run(capsys, "check", "gs", str(out))
        assert code == PASS and report[-1]["status"] == "pass"

    def test_f2_gs_none(self, capsys, files):
        code, summary = run(capsys, "search", "gs", files("f2", "complex"))
        assert code == FAIL
        assert summary == [{"found": False, "exhausted": True, "explored": summary[0]["explored"], "kind": "gs"}]

    def test_f2_bs_none(self, capsys, files):
        code, summary = run(capsys, "search", "bs", files("f2", "complex"))
        assert code == FAIL and summary[0]["exhausted"]

    def test_budget_exhaustion_is_reported(self, capsys, files):
        code, summary = run(capsys, "search", "gs", files("f1", "complex"), "--budget", "1")
        assert code == FAIL and not summary[0]["exhausted"]

    def test_staggered_search(self, capsys, files):
        code, summary = run(capsys, "search", "staggered", files("torus", "complex"))
        assert code == PASS and summary[0]["certificate"]["kind"] == "staggered"

    def test_cube_fails_goodness(self, capsys, tmp_path):
        from stackings.convert import Certificate
        from stackings.io import certificate_to_json

        path = tmp_path / "cube.json"
        cert = Certificate("gs", fixtures.stacking("cube"), complex=fixtures.complex("cube"))
        path.write_text(json.dumps(certificate_to_json(cert)))
        code, report = run(capsys, "check", "gs", str(path))
        assert code == FAIL
        assert {r["tag"] for r in report[:-1]} == {"GS.low"}
        assert report[-1] == {"status": "fail", "checked": report[-1]["checked"], "horizon": 0, "violations": 2, "kind": "gs"}


class TestConvertAndCover:
    def test_gs_to_is_with_ball(self, capsys, files, tmp_path):
        out = tmp_path / "is.json"
        code, _ = run(
            capsys, "convert", files("f1", "gs"), "--from", "gs", "--to", "is",
            "--presentation", files("f1", "presentation"), "--radius", "3", "-o", str(out),
        )
        assert code == PASS
        code, report = run(capsys, "check", "is", str(out))
        assert code == PASS and report[-1]["checked"] > 0

    def test_small_ball_is_inconclusive(self, capsys, files, tmp_path):
        out = tmp_path / "tis.json"
        code, _ = run(
            capsys, "convert", files("torus", "staggered"), "--from", "staggered", "--to", "tis",
            "--presentation", files("torus", "presentation"), "--radius", "1", "-o", str(out),
        )
        assert code == PASS
        code, report = run(capsys, "check", "tis", str(out))
        assert code == INCONCLUSIVE and report[-1]["status"] == "inconclusive"

    def test_horizon_error_is_inconclusive(self, capsys, files):
        code, report = run(
            capsys, "convert", files("torus", "staggered"), "--from", "staggered", "--to", "gs",
            "--presentation", files("torus", "presentation"), "--radius", "1",
        )
        assert code == INCONCLUSIVE and report[0]["status"] == "inconclusive"

    def test_conversion_failure(self, capsys, tmp_path):
        from stackings.convert import Certificate
        from stackings.io import certificate_to_json

        path = tmp_path / "cube.json"
        cert = Certificate("gs", fixtures.stacking("cube"), complex=fixtures.complex("cube"))
        path.write_text(json.dumps(certificate_to_json(cert)))
        code, report = run(capsys, "convert", str(path), "--from", "gs", "--to", "bs")
        assert code == FAIL and "no low" in report[0]["error"]

    def test_wrong_source_kind(self, capsys, files):
        code, _ = run(capsys, "convert", files("f1", "gs"), "--from", "staggered", "--to", "tis")
        assert code == MALFORMED

    def test_cover_ball_and_validate(self, capsys, files, tmp_path):
        out = tmp_path / "ball.json"
        code, _ = run(capsys, "cover", "ball", "--presentation", files("torus", "presentation"), "--radius", "2", "-o", str(out))
        assert code == PASS
        doc = json.loads(out.read_text())
        assert len(doc["ball"]["vertices"]) == 13
        code, report = run(capsys, "validate", str(out))
        assert code == PASS and report[-1]["what"] == "cover"

    def test_oracle_kind_mismatch(self, capsys, files):
        code, _ = run(capsys, "cover", "ball", "--presentation", files("torus", "presentation"), "--oracle", "finite")
        assert code == MALFORMED

    def test_check_with_cover_file(self, capsys, files, tmp_path):
        ball = tmp_path / "ball.json"
        ball.write_text(json.dumps(cover_to_json(fixtures.cover("torus", 3))))
        out = tmp_path / "tis.json"
        run(capsys, "convert", files("torus", "staggered"), "--from", "staggered", "--to", "tis", "--cover", str(ball), "-o", str(out))
        doc = json.loads(out.read_text())
        del doc["cover"]
        out.write_text(json.dumps(doc))
        code, report = run(capsys, "check", "tis", str(out), "--cover", str(ball))
        assert code == PASS

    def test_slope_order(self, capsys, files, tmp_path):
        out = tmp_path / "slope.json"
        code, summary = run(capsys, "slope-order", "--presentation", files("ab-ba", "presentation"), "--slope", "355/113", "-o", str(out))
        assert code == PASS and summary == [{"kind": "tis"}]
        code, report = run(capsys, "check", "tis", str(out))
        assert code == PASS
        code, summary = run(capsys, "slope-order", "--presentation", files("ab-ba", "presentation"), "--slope", "1/1", "-o", str(out))
        assert summary == [{"kind": "is"}]


class TestDualAndDiagrams:
    def test_dual_dot(self, capsys, files, tmp_path):
        dot = tmp_path / "dual.dot"
        code, summary = run(capsys, "dual", files("f1", "complex"), "--stacking", files("f1", "stacking"), "--dot", str(dot))
        assert code == PASS
        assert summary[0]["faces"] == 2 and summary[0]["dual_edges"] == 3 and summary[0]["acyclic"] is False
        assert dot.read_text().startswith("digraph")

    def test_fuzz(self, capsys, files, tmp_path):
        out = tmp_path / "d.jsonl"
        code, summary = run(
            capsys, "diagram", "fuzz", files("f1", "complex"), "--stacking", files("f1", "stacking"),
            "--count", "20", "--seed", "3", "--size-cap", "6", "-o", str(out),
        )
        assert code == PASS
        assert summary[0]["produced"] == 20 and summary[0]["cyclic"] == 0
        first = json.loads(out.read_text().splitlines()[0])
        path = tmp_path / "one.json"
        path.write_text(json.dumps(first["diagram"]))
        code, report = run(capsys, "diagram", "check", str(path), files("f1", "complex"))
        assert code == PASS
        code, report = run(capsys, "validate", str(path))
        assert code == PASS and report[-1]["what"] == "diagram"

    def test_fuzz_needs_good_stacking(self, capsys, files):
        code, report = run(capsys, "diagram", "fuzz", files("cube", "complex"), "--stacking", files("cube", "stacking"))
        assert code == MALFORMED and "not a good stacking" in report[0]["error"]


class TestMalformed:
    def test_unknown_field(self, capsys, tmp_path, f1):
        doc = complex_to_json(f1)
        doc["extra"] = 1
        path = tmp_path / "c.json"
        path.write_text(json.dumps(doc))
        code, report = run(capsys, "validate", str(path))
        assert code == MALFORMED and report[0]["status"] == "malformed"

    def test_duplicate_keys(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text('{"vertices": ["v"], "vertices": ["w"], "edges": [], "faces": []}')
        assert run(capsys, "validate", str(path))[0] == MALFORMED

    def test_missing_file(self, capsys):
        assert run(capsys, "validate", "/nonexistent/x.json")[0] == MALFORMED

    def test_invalid_complex_reports_fail(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"vertices": ["v"], "edges": [{"id": "a", "src": "v", "dst": "v"}],
                                    "faces": [{"id": "r", "boundary": [{"edge": "a", "dir": 1}, {"edge": "a", "dir": -1}]}]}))
        code, report = run(capsys, "validate", str(path))
        assert code == FAIL and report[0]["tag"] == "immersed"

    def test_negative_radius(self, capsys, files):
        assert run(capsys, "cover", "ball", "--presentation", files("torus", "presentation"), "--radius", "-1")[0] == MALFORMED

    def test_kind_mismatch(self, capsys, files):
        assert run(capsys, "check", "tis", files("f1", "gs"))[0] == MALFORMED

    def test_unknown_fixture(self, capsys):
        assert run(capsys, "fixture", "klein")[0] == MALFORMED

    def test_runconfig_validates(self):
        with pytest.raises(MalformedInput):
            RunConfig("search", budget=0)
