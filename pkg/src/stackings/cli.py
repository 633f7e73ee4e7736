"""Command-line front end.

Exit codes: 0 pass, 1 fail, 2 malformed input, 3 inconclusive because the
cover ball was too small.  Reports go to standard output as JSON lines, one
violation per line followed by a summary line.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence, TextIO

from . import fixtures
from .complex import ComplexError, TwoComplex, validate
from .convert import (
    KINDS,
    Certificate,
    ConversionError,
    HorizonError,
    convert,
    parse_slope,
    planar_coordinates,
    slope_projection_order,
)
from .cover import CoverData, CoverError, Presentation, build_cayley_ball, check_cover, identity_cover
from .diagrams import DiagramError, FuzzStats, acyclic_disks_test, check_diagram, iter_fuzz, write_counterexample
from .dualgraph import DualError, build_dual, direct_dual, is_acyclic, to_dot
from .groups import FreeGroup, Group, GroupError
from .io import (
    MalformedInput,
    certificate_from_json,
    certificate_to_json,
    complex_from_json,
    complex_to_json,
    cover_from_json,
    cover_to_json,
    diagram_from_json,
    diagram_to_json,
    dumps,
    load,
    presentation_from_json,
    presentation_to_json,
    stacking_from_json,
    stacking_to_json,
)
from .orders import OrderError
from .report import Report
from .stacking import InvalidStacking, Stacking, check_good, check_stacking, search_good_stacking
from .structures import (
    MalformedCertificate,
    TISStructure,
    check_bislim,
    check_is,
    check_staggered,
    check_tbs,
    check_tis,
    search_bislim,
    search_staggered,
)

PASS, FAIL, MALFORMED, INCONCLUSIVE = 0, 1, 2, 3

MALFORMED_ERRORS = (
    MalformedInput,
    MalformedCertificate,
    ComplexError,
    CoverError,
    GroupError,
    OrderError,
    InvalidStacking,
    DualError,
    DiagramError,
)


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    kind: str | None = None
    radius: int = 2
    torsion_mode: bool = False
    slope: tuple[int, int] | None = None
    seed: int = 0
    budget: int = 1_000_000
    output: str | None = None
    src: str | None = None
    dst: str | None = None
    cover: str | None = None
    presentation: str | None = None
    oracle: str | None = None
    stacking: str | None = None
    count: int = 200
    size_cap: int = 12
    artifacts: str | None = None

    def __post_init__(self):
        if self.radius < 0:
            raise MalformedInput("radius must be non-negative")
        if self.budget <= 0:
            raise MalformedInput("budget must be positive")


# -- input helpers -------------------------------------------------------------


def _load_complex(path: str) -> TwoComplex:
    """A complex document, or a presentation whose complex is meant."""
    doc = load(path)
    if isinstance(doc, dict) and "generators" in doc:
        p, _, _ = presentation_from_json(doc)
        return p.complex()
    if isinstance(doc, dict) and doc.get("kind") in ("gs", "staggered"):
        return complex_from_json(doc["complex"])
    return complex_from_json(doc)


def _require_valid(c: TwoComplex) -> TwoComplex:
    report = validate(c)
    if not report.ok:
        raise MalformedInput(f"invalid complex: [{report.violations[0].tag}] {report.violations[0].message}")
    return c


def _load_stacking(path: str) -> Stacking:
    doc = load(path)
    if isinstance(doc, dict) and doc.get("kind") == "gs":
        return certificate_from_json(doc).value
    return stacking_from_json(doc)


def _oracle_for(p: Presentation, group: Group | None, kind: str | None) -> Group:
    if group is None:
        if kind == "free" and not p.relators:
            return FreeGroup(list(p.generators))
        raise MalformedInput("the presentation carries no oracle for its fundamental group")
    if kind is not None and group.kind != kind:
        raise MalformedInput(f"the presentation's oracle is {group.kind!r}, not {kind!r}")
    return group


def _ball(cfg: RunConfig) -> CoverData:
    p, group, _ = presentation_from_json(load(cfg.presentation))
    _require_valid(p.complex())
    return build_cayley_ball(p, cfg.radius, _oracle_for(p, group, cfg.oracle))


def _side_cover(cfg: RunConfig) -> CoverData | None:
    if cfg.cover:
        return cover_from_json(load(cfg.cover))
    if cfg.presentation:
        return _ball(cfg)
    return None


def _write(cfg: RunConfig, doc: Any, out: TextIO) -> None:
    text = dumps(doc)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        out.write(text)


def _line(out: TextIO, doc: dict) -> None:
    out.write(json.dumps(doc, sort_keys=True) + "\n")


def _emit(report: Report, out: TextIO, **extra) -> int:
    report = report.sorted()
    for v in report.violations:
        _line(out, v.as_dict())
    status = "inconclusive" if report.inconclusive else ("pass" if report.ok else "fail")
    _line(out, {"status": status, "checked": report.checked, "horizon": len(report.horizon), "violations": len(report), **extra})
    if report.inconclusive:
        return INCONCLUSIVE
    return PASS if report.ok else FAIL


def _one_input(cfg: RunConfig) -> str:
    if len(cfg.inputs) != 1:
        raise MalformedInput(f"{cfg.subcommand} takes exactly one input file")
    return cfg.inputs[0]


# -- subcommands ---------------------------------------------------------------


def _validate(cfg: RunConfig, out: TextIO) -> int:
    doc = load(_one_input(cfg))
    if isinstance(doc, dict) and "rotation" in doc:
        return _emit(check_diagram(diagram_from_json(doc)), out, what="diagram")
    if isinstance(doc, dict) and "ball" in doc:
        return _emit(check_cover(cover_from_json(doc)), out, what="cover")
    if isinstance(doc, dict) and "generators" in doc:
        return _emit(validate(presentation_from_json(doc)[0].complex()), out, what="presentation")
    return _emit(validate(complex_from_json(doc)), out, what="complex")


_COMPATIBLE = {"gs": {"gs"}, "bs": {"bs", "tbs"}, "tbs": {"bs", "tbs"}, "is": {"is", "tis"}, "tis": {"is", "tis"}, "staggered": {"staggered"}}


def check_certificate(kind: str, cert: Certificate, torsion_mode: bool = False) -> Report:
    if cert.kind not in _COMPATIBLE[kind]:
        raise MalformedInput(f"expected a {kind} certificate, got {cert.kind}")
    v = cert.value
    if kind == "gs":
        c = cert.base_complex()
        _require_valid(c)
        report = check_stacking(c, v)
        if report.ok:
            report.extend(check_good(c, v, torsion_mode))
        return report
    if kind in ("bs", "tbs"):
        if v.cover is None:
            raise MalformedInput("a bislim certificate needs a cover")
        report = check_bislim(v, torsion_mode)
        if kind == "tbs" and report.ok and not check_tbs(v):
            report.add("tbs", "the preorder is not total on the r+ cells")
        return report
    if kind in ("is", "tis"):
        if v.cover is None:
            raise MalformedInput("an invariant staggering needs a cover")
        return check_tis(v) if kind == "tis" else check_is(v, torsion_mode)
    return check_staggered(v)


def _check(cfg: RunConfig, out: TextIO) -> int:
    cert = certificate_from_json(load(_one_input(cfg)), _side_cover(cfg))
    return _emit(check_certificate(cfg.kind, cert, cfg.torsion_mode), out, kind=cfg.kind)


def _convert(cfg: RunConfig, out: TextIO) -> int:
    cert = certificate_from_json(load(_one_input(cfg)), _side_cover(cfg))
    if cert.kind != cfg.src:
        raise MalformedInput(f"input is a {cert.kind} certificate, not {cfg.src}")
    if cfg.cover is None and cfg.presentation is None and cert.cover is None and cert.kind in ("gs", "staggered"):
        c = _require_valid(cert.base_complex())
        cert.cover = identity_cover(c)
    try:
        result = convert(cert, cfg.dst, cfg.torsion_mode)
    except HorizonError as exc:
        _line(out, {"status": "inconclusive", "error": str(exc)})
        return INCONCLUSIVE
    except ConversionError as exc:
        _line(out, {"status": "fail", "error": str(exc)})
        return FAIL
    _write(cfg, certificate_to_json(result), out)
    return PASS


def _cover(cfg: RunConfig, out: TextIO) -> int:
    if cfg.kind != "ball":
        raise MalformedInput("usage: cover ball --presentation P --radius N")
    if not cfg.presentation:
        raise MalformedInput("cover ball needs --presentation")
    _write(cfg, cover_to_json(_ball(cfg)), out)
    return PASS


def _dual(cfg: RunConfig, out: TextIO) -> int:
    c = _require_valid(_load_complex(_one_input(cfg)))
    g = build_dual(c, cfg.torsion_mode)
    summary: dict = {"faces": len(g.vertices), "dual_edges": len(g.edges)}
    if cfg.stacking:
        s = _load_stacking(cfg.stacking)
        report = check_stacking(c, s)
        if not report.ok:
            return _emit(report, out)
        g = direct_dual(g, s)
        ok, cycle = is_acyclic(g)
        summary.update(acyclic=ok, cycle=cycle)
    if cfg.output:
        Path(cfg.output).write_text(to_dot(g))
    else:
        out.write(to_dot(g))
    _line(out if cfg.output else sys.stderr, summary)
    return PASS


def _search(cfg: RunConfig, out: TextIO) -> int:
    c = _require_valid(_load_complex(_one_input(cfg)))
    if cfg.kind == "gs":
        res = search_good_stacking(c, cfg.budget)
        found, exhausted, explored = res.stacking, res.exhausted, res.explored
        cert = Certificate("gs", found, None, c) if found is not None else None
    elif cfg.kind == "bs":
        found, exhausted, explored = search_bislim(c, cfg.torsion_mode, cfg.budget)
        cert = Certificate("bs", found, found.cover) if found is not None else None
    elif cfg.kind == "staggered":
        found, exhausted, explored = search_staggered(c, cfg.budget)
        cert = Certificate("staggered", found) if found is not None else None
    else:
        raise MalformedInput(f"cannot search for {cfg.kind}")
    if cert is not None and cfg.output:
        Path(cfg.output).write_text(dumps(certificate_to_json(cert)))
    summary = {"found": cert is not None, "exhausted": exhausted, "explored": explored, "kind": cfg.kind}
    if cert is not None and not cfg.output:
        summary["certificate"] = certificate_to_json(cert)
    _line(out, summary)
    return PASS if cert is not None else FAIL


def _diagram(cfg: RunConfig, out: TextIO) -> int:
    if cfg.kind == "check":
        if len(cfg.inputs) != 2:
            raise MalformedInput("usage: diagram check DIAGRAM TARGET")
        return _emit(check_diagram(diagram_from_json(load(cfg.inputs[0])), _load_complex(cfg.inputs[1])), out)
    if cfg.kind != "fuzz":
        raise MalformedInput("usage: diagram fuzz TARGET --stacking S --count N --seed S")
    target = _require_valid(_load_complex(_one_input(cfg)))
    if not cfg.stacking:
        raise MalformedInput("diagram fuzz needs --stacking")
    s = _load_stacking(cfg.stacking)
    report = check_stacking(target, s)
    report.extend(check_good(target, s))
    if not report.ok:
        raise MalformedInput("the target stacking is not a good stacking")
    stats = FuzzStats()
    cyclic = 0
    sink = open(cfg.output, "w") if cfg.output else None
    try:
        for k, (d, ds) in enumerate(iter_fuzz(target, s, cfg.count, cfg.size_cap, cfg.seed, stats)):
            ok = acyclic_disks_test(d, ds)
            if sink:
                sink.write(json.dumps({"diagram": diagram_to_json(d), "acyclic": ok}, sort_keys=True) + "\n")
            if not ok:
                cyclic += 1
                if cfg.artifacts:
                    write_counterexample(cfg.artifacts, f"seed{cfg.seed}-{k}", d, ds, target)
    finally:
        if sink:
            sink.close()
    _line(
        out,
        {
            "produced": stats.produced,
            "requested": cfg.count,
            "attempts": stats.attempts,
            "rejected": dict(sorted(stats.rejected.items())),
            "cyclic": cyclic,
        },
    )
    return PASS if cyclic == 0 else FAIL


def _slope(cfg: RunConfig, out: TextIO) -> int:
    if not cfg.presentation or cfg.slope is None:
        raise MalformedInput("usage: slope-order --presentation P --slope p/q --radius N")
    p, group, points = presentation_from_json(load(cfg.presentation))
    cover = build_cayley_ball(p, cfg.radius, _oracle_for(p, group, "abelian"))
    try:
        coords = planar_coordinates(cover, points)
        st = slope_projection_order(cover, cfg.slope, coords)
    except ConversionError as exc:
        raise MalformedInput(str(exc)) from exc
    kind = "tis" if isinstance(st, TISStructure) else "is"
    _write(cfg, certificate_to_json(Certificate(kind, st, cover)), out)
    if cfg.output:
        _line(out, {"kind": kind})
    return PASS


def _fixture(cfg: RunConfig, out: TextIO) -> int:
    name = _one_input(cfg)
    if name not in fixtures.NAMES:
        raise MalformedInput(f"unknown fixture {name!r}; choose from {', '.join(fixtures.NAMES)}")
    what = cfg.kind or ("complex" if name == "cube" else "presentation")
    if what == "presentation" and name in fixtures.PRESENTATIONS:
        doc = presentation_to_json(*fixtures.presentation(name))
    elif what == "complex":
        doc = complex_to_json(fixtures.complex(name))
    elif what == "gs" and fixtures.stacking(name) is not None:
        doc = certificate_to_json(Certificate("gs", fixtures.stacking(name), None, fixtures.complex(name)))
    elif what == "stacking" and fixtures.stacking(name) is not None:
        doc = stacking_to_json(fixtures.stacking(name))
    elif what == "staggered" and fixtures.staggered(name) is not None:
        doc = certificate_to_json(Certificate("staggered", fixtures.staggered(name)))
    else:
        raise MalformedInput(f"fixture {name} has no {what}")
    _write(cfg, doc, out)
    return PASS


COMMANDS = {
    "validate": _validate,
    "check": _check,
    "convert": _convert,
    "cover": _cover,
    "dual": _dual,
    "search": _search,
    "diagram": _diagram,
    "slope-order": _slope,
    "fixture": _fixture,
}


def run(cfg: RunConfig, out: TextIO | None = None) -> int:
    out = out if out is not None else sys.stdout
    try:
        return COMMANDS[cfg.subcommand](cfg, out)
    except MALFORMED_ERRORS as exc:
        _line(out, {"status": "malformed", "error": str(exc)})
        return MALFORMED


# -- argument parsing ----------------------------------------------------------


def _slope_arg(text: str) -> tuple[int, int]:
    try:
        return parse_slope(text)
    except (ValueError, ConversionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stackings", description="Check and convert stackings and staggerings of 2-complexes.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def cover_opts(p):
        p.add_argument("--cover", help="cover ball JSON")
        p.add_argument("--presentation", help="presentation JSON with an oracle; builds a ball")
        p.add_argument("--radius", type=int, default=2)

    p = sub.add_parser("validate", help="validate a complex, presentation, cover or diagram")
    p.add_argument("inputs", nargs=1)

    p = sub.add_parser("check", help="check a certificate")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("inputs", nargs=1)
    p.add_argument("--torsion", dest="torsion_mode", action="store_true")
    cover_opts(p)

    p = sub.add_parser("convert", help="convert a certificate along the shortest chain of arrows")
    p.add_argument("inputs", nargs=1)
    p.add_argument("--from", dest="src", choices=KINDS, required=True)
    p.add_argument("--to", dest="dst", choices=KINDS, required=True)
    p.add_argument("--torsion", dest="torsion_mode", action="store_true")
    p.add_argument("-o", "--output")
    cover_opts(p)

    p = sub.add_parser("cover", help="build a ball in the universal cover")
    p.add_argument("kind", choices=["ball"])
    p.add_argument("--presentation", required=True)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--oracle", choices=["free", "abelian", "finite"])
    p.add_argument("-o", "--output")

    p = sub.add_parser("dual", help="export the dual graph as DOT")
    p.add_argument("inputs", nargs=1)
    p.add_argument("--stacking", help="direct the dual by this stacking")
    p.add_argument("--dot", dest="output", help="DOT output path")
    p.add_argument("--torsion", dest="torsion_mode", action="store_true")

    p = sub.add_parser("search", help="exhaustive search for a certificate")
    p.add_argument("kind", choices=["gs", "bs", "staggered"])
    p.add_argument("inputs", nargs=1)
    p.add_argument("--budget", type=int, default=1_000_000)
    p.add_argument("--torsion", dest="torsion_mode", action="store_true")
    p.add_argument("-o", "--output")

    p = sub.add_parser("diagram", help="fuzz or check disk diagrams")
    p.add_argument("kind", choices=["fuzz", "check"])
    p.add_argument("inputs", nargs="+")
    p.add_argument("--stacking")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size-cap", dest="size_cap", type=int, default=12)
    p.add_argument("--artifacts", help="directory for counterexamples")
    p.add_argument("-o", "--output", help="write accepted diagrams as JSON lines")

    p = sub.add_parser("slope-order", help="order a planar cover ball by projecting to a line")
    p.add_argument("--presentation", required=True)
    p.add_argument("--slope", type=_slope_arg, required=True)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("-o", "--output")

    p = sub.add_parser("fixture", help="write a bundled fixture")
    p.add_argument("inputs", nargs=1, metavar="name")
    p.add_argument("--what", dest="kind", choices=["presentation", "complex", "gs", "stacking", "staggered"])
    p.add_argument("-o", "--output")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = vars(build_parser().parse_args(argv))
    try:
        cfg = RunConfig(**{k: v for k, v in args.items() if v is not None})
    except MalformedInput as exc:
        _line(sys.stdout, {"status": "malformed", "error": str(exc)})
        return MALFORMED
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
