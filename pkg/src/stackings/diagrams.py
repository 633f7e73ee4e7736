"""Disk diagrams over a target complex.

A diagram face keeps the boundary indexing of the target face it maps to,
so side ``(f, i)`` of the diagram lies over side ``(map[f], i)`` of the
target.  Diagrams are grown by random shelling: each step glues a copy of a
target face along an arc of the current outer boundary, which keeps the
boundary a simple cycle and the diagram a disk.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .complex import Corner, Letter, Side, TwoComplex, invert_word, validate
from .dualgraph import build_dual, direct_dual, is_acyclic
from .report import Report
from .stacking import InvalidStacking, Stacking, check_good, check_stacking

Germ = tuple[str, int]  # (edge, +1 at its source end / -1 at its target end)


class DiagramError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DiskDiagram:
    complex: TwoComplex
    rotation: Mapping[str, tuple[Germ, ...]]
    outer: tuple[Letter, ...]
    map_vertex: Mapping[str, str]
    map_edge: Mapping[str, str]
    map_face: Mapping[str, str]

    def project_side(self, s: Side) -> Side:
        return Side(self.map_face[s.face], s.pos)

    def project_corner(self, c: Corner) -> Corner:
        return Corner(self.map_face[c.face], c.pos)


def _start_germ(l: Letter) -> Germ:
    return (l.edge, 1 if l.dir > 0 else -1)


def _end_germ(l: Letter) -> Germ:
    return (l.edge, -1 if l.dir > 0 else 1)


def rotation_from_cycles(complex: TwoComplex, cycles: Sequence[Sequence[Letter]]) -> dict[str, tuple[Germ, ...]]:
    """Counterclockwise germ order at each vertex from region boundaries,
    each traversed with its region on the left."""
    succ: dict[Germ, Germ] = {}
    for cyc in cycles:
        n = len(cyc)
        for k in range(n):
            succ[_start_germ(cyc[(k + 1) % n])] = _end_germ(cyc[k])
    out = {}
    for v in complex.vertices:
        germs = sorted(g for g in succ if complex.start(Letter(g[0], 1 if g[1] > 0 else -1)) == v)
        if not germs:
            out[v] = ()
            continue
        seq = [germs[0]]
        while succ[seq[-1]] != germs[0] and len(seq) <= len(germs):
            seq.append(succ[seq[-1]])
        out[v] = tuple(seq)
    return out


def _orbits(complex: TwoComplex, rotation: Mapping[str, Sequence[Germ]]) -> list[tuple[Letter, ...]]:
    """Boundary cycles of the regions of the rotation system."""
    inv: dict[Germ, Germ] = {}
    for v, seq in rotation.items():
        for k, g in enumerate(seq):
            inv[g] = seq[k - 1]  # ccw predecessor
    darts = [Letter(e, d) for e in sorted(complex.edges) for d in (1, -1)]
    seen: set[Letter] = set()
    out = []
    for d in darts:
        if d in seen:
            continue
        cyc = []
        x = d
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            g = inv.get(_end_germ(x))
            if g is None:
                break
            x = Letter(g[0], g[1])
        out.append(tuple(cyc))
    return out


def check_diagram(d: DiskDiagram, target: TwoComplex | None = None) -> Report:
    report = Report()
    c = d.complex
    for v in validate(c):
        report.add("diagram.complex", v.message, *v.cells)
    if target is not None:
        for x, y in d.map_vertex.items():
            if y not in target.vertices:
                report.add("diagram.map", f"vertex {x} maps to unknown {y}", x)
        for e, (s, t) in c.edges.items():
            te = d.map_edge.get(e)
            if te not in target.edges or target.edges[te] != (d.map_vertex.get(s), d.map_vertex.get(t)):
                report.add("diagram.map", f"edge {e} does not map onto an edge with matching ends", e)
        for f, w in c.faces.items():
            tw = target.faces.get(d.map_face.get(f), ())
            if len(tw) != len(w) or any(d.map_edge.get(l.edge) != m.edge or l.dir != m.dir for l, m in zip(w, tw)):
                report.add("diagram.map", f"face {f} boundary does not map onto its target's", f)
    v, e, f = len(c.vertices), len(c.edges), len(c.faces)
    if v - e + f != 1:
        report.add("diagram.euler", f"V - E + F = {v - e + f}, expected 1 for a disk")
    outer = Counter(l.edge for l in d.outer)
    n = len(d.outer)
    for k in range(n):
        if n and c.end(d.outer[k]) != c.start(d.outer[(k + 1) % n]):
            report.add("diagram.outer", f"outer path is not closed at position {k}")
            break
    for edge in c.edges:
        sides = len(c.sides_over(edge))
        if outer[edge] != 2 - sides:
            report.add("diagram.outer", f"edge {edge} has {sides} side(s) but the outer path runs over it {outer[edge]} time(s)", edge)
    orbits = _orbits(c, d.rotation)
    if v - e + len(orbits) != 2:
        report.add("diagram.rotation", f"rotation system has {len(orbits)} regions; it is not planar with these cells")
    cycles = {frozenset(o) for o in orbits}
    for face, w in c.faces.items():
        if frozenset(w) not in cycles and frozenset(invert_word(w)) not in cycles:
            report.add("diagram.rotation", f"face {face} is not a region of the rotation system", face)
    if d.outer and frozenset(invert_word(d.outer)) not in cycles:
        report.add("diagram.rotation", "outer path is not a region of the rotation system")
    report.checked = v + e + f
    return report


# -- reducedness and stackings ------------------------------------------------


def _read_from(c: TwoComplex, map_edge: Mapping[str, str], s: Side) -> tuple[tuple[str, int], ...]:
    """The face boundary read from side ``s``, oriented so that the first
    letter crosses the edge in its positive direction, as target letters."""
    w = c.faces[s.face]
    n = len(w)
    if w[s.pos].dir > 0:
        seq = [w[(s.pos + k) % n] for k in range(n)]
    else:
        seq = [w[(s.pos - k) % n].inverse() for k in range(n)]
    return tuple((map_edge[l.edge], l.dir) for l in seq)


def cancellable_pairs(d: DiskDiagram) -> list[tuple[str, str, str]]:
    return _cancellable(d.complex, d.map_edge)


def _cancellable(c: TwoComplex, map_edge: Mapping[str, str], edges=None) -> list[tuple[str, str, str]]:
    out = []
    for e in sorted(c.edges if edges is None else edges):
        sides = sorted(c.sides_over(e))
        for i, s1 in enumerate(sides):
            for s2 in sides[i + 1 :]:
                if s1.face != s2.face and _read_from(c, map_edge, s1) == _read_from(c, map_edge, s2):
                    out.append((s1.face, s2.face, e))
    return out


def check_reduced(d: DiskDiagram) -> Report:
    report = Report()
    for f1, f2, e in cancellable_pairs(d):
        report.add("reduced", f"faces {f1} and {f2} form a cancellable pair along {e}", f1, f2, e)
    report.checked = len(d.complex.edges)
    return report


def induce_stacking(d: DiskDiagram, s: Stacking) -> Stacking:
    """Pull a target stacking back along the diagram map."""
    c = d.complex
    sides, corners = {}, {}
    for e in c.edges:
        rank = s.side_rank(d.map_edge[e])
        over = c.sides_over(e)
        proj = [d.project_side(x) for x in over]
        if any(p not in rank for p in proj):
            raise DiagramError(f"sides over {e} do not map to sides of the target")
        if len(set(proj)) != len(proj):
            raise DiagramError(f"two sides over {e} map to the same target side")
        sides[e] = tuple(sorted(over, key=lambda x: rank[d.project_side(x)]))
    for v in c.vertices:
        rank = s.corner_rank(d.map_vertex[v])
        at = c.corners_at(v)
        proj = [d.project_corner(x) for x in at]
        if any(p not in rank for p in proj):
            raise DiagramError(f"corners at {v} do not map to corners of the target")
        if len(set(proj)) != len(proj):
            raise DiagramError(f"two corners at {v} map to the same target corner")
        corners[v] = tuple(sorted(at, key=lambda x: rank[d.project_corner(x)]))
    return Stacking(sides, corners)


def acyclic_disks_test(d: DiskDiagram, s_good: Stacking) -> bool:
    """Whether the directed dual of a diagram with a good stacking is acyclic."""
    if not validate(d.complex).ok:
        raise DiagramError("diagram faces must have immersed boundaries")
    if not check_stacking(d.complex, s_good).ok:
        raise DiagramError("not a stacking of the diagram")
    if not check_good(d.complex, s_good).ok:
        raise DiagramError("stacking of the diagram is not good")
    ok, _ = is_acyclic(direct_dual(build_dual(d.complex), s_good))
    return ok


# -- fuzzing ------------------------------------------------------------------


@dataclass
class FuzzStats:
    produced: int = 0
    attempts: int = 0
    rejected: Counter = field(default_factory=Counter)


class _Builder:
    def __init__(self, target: TwoComplex):
        self.target = target
        self.vertices: list[str] = []
        self.edges: dict[str, tuple[str, str]] = {}
        self.faces: dict[str, tuple[Letter, ...]] = {}
        self.ccw: dict[str, tuple[Letter, ...]] = {}
        self.mv: dict[str, str] = {}
        self.me: dict[str, str] = {}
        self.mf: dict[str, str] = {}
        self.outer: list[Letter] = []
        self.corner_images: dict[str, set[Corner]] = {}

    def vertex(self, image: str) -> str:
        v = f"v{len(self.vertices)}"
        self.vertices.append(v)
        self.mv[v] = image
        self.corner_images[v] = set()
        return v

    def edge(self, x: str, y: str, letter: Letter) -> Letter:
        e = f"e{len(self.edges)}"
        self.edges[e] = (x, y) if letter.dir > 0 else (y, x)
        self.me[e] = letter.edge
        return Letter(e, letter.dir)

    def path(self, start: str, end: str, letters: Sequence[Letter]) -> list[Letter]:
        """New edges along ``letters`` from ``start`` to ``end`` through new vertices."""
        out = []
        x = start
        for k, l in enumerate(letters):
            y = end if k == len(letters) - 1 else self.vertex(self.target.end(l))
            out.append(self.edge(x, y, l))
            x = y
        return out

    def start(self, l: Letter) -> str:
        s, t = self.edges[l.edge]
        return s if l.dir > 0 else t

    def add_face(self, tface: str, ccw: list[Letter], orient: int, k: int) -> str | None:
        """Record a face whose counterclockwise darts are ``ccw``; the target
        word rotated by k (inverted when ``orient`` is -1) reads along them."""
        n = len(ccw)
        aligned: list[Letter | None] = [None] * n
        for j, dart in enumerate(ccw):
            if orient > 0:
                aligned[(k + j) % n] = dart
            else:
                aligned[n - 1 - (k + j) % n] = dart.inverse()
        f = f"f{len(self.faces)}"
        word = tuple(aligned)
        images = [(self.start(l), Corner(tface, i)) for i, l in enumerate(word)]
        if any(img in self.corner_images[v] for v, img in images):
            return None
        for v, img in images:
            self.corner_images[v].add(img)
        self.faces[f] = word
        self.ccw[f] = tuple(ccw)
        self.mf[f] = tface
        return f

    def diagram(self) -> DiskDiagram:
        c = TwoComplex(tuple(self.vertices), dict(self.edges), dict(self.faces))
        cycles = list(self.ccw.values()) + [tuple(invert_word(self.outer))]
        return DiskDiagram(c, rotation_from_cycles(c, cycles), tuple(self.outer), dict(self.mv), dict(self.me), dict(self.mf))


def _rotations(target: TwoComplex):
    """Every (face, orientation, rotation, cyclic word) of the target."""
    out = []
    for f in sorted(target.faces):
        w = target.faces[f]
        for orient, base in ((1, tuple(w)), (-1, invert_word(w))):
            for k in range(len(w)):
                out.append((f, orient, k, base[k:] + base[:k]))
    return out


def _grow(target: TwoComplex, rng: random.Random, size: int, stats: FuzzStats, tries: int = 40) -> DiskDiagram | None:
    table = _rotations(target)
    b = _Builder(target)
    f0, o0, k0, u0 = rng.choice(table)
    first = b.vertex(target.start(u0[0]))
    darts = b.path(first, first, list(u0))
    if b.add_face(f0, darts, o0, k0) is None:
        stats.rejected["corner"] += 1
        return None
    b.outer = list(darts)
    while len(b.faces) < size:
        m = len(b.outer)
        if m < 2:
            break
        for _ in range(tries):
            a = rng.randrange(m)
            length = rng.randint(1, m - 1)
            arc = [b.outer[(a + j) % m] for j in range(length)]
            want = tuple(Letter(b.me[l.edge], -l.dir) for l in reversed(arc))
            cands = [r for r in table if len(r[3]) > length and r[3][:length] == want]
            if not cands:
                stats.rejected["no-match"] += 1
                continue
            tface, orient, k, u = rng.choice(cands)
            p0, pl = b.start(arc[0]), b.start(arc[-1].inverse())
            snapshot = (len(b.vertices), dict(b.edges), {v: set(s) for v, s in b.corner_images.items()})
            new = b.path(p0, pl, list(u[length:]))
            ccw = [l.inverse() for l in reversed(arc)] + new
            f = b.add_face(tface, ccw, orient, k)
            if f is not None:
                trial = TwoComplex(tuple(b.vertices), dict(b.edges), dict(b.faces))
                if _cancellable(trial, b.me, [l.edge for l in arc]):
                    stats.rejected["cancellable"] += 1
                    _undo_face(b, f)
                    f = None
            else:
                stats.rejected["corner"] += 1
            if f is None:
                n_v, edges, corners = snapshot
                for v in b.vertices[n_v:]:
                    b.mv.pop(v)
                del b.vertices[n_v:]
                for e in set(b.edges) - set(edges):
                    b.me.pop(e)
                b.edges = edges
                b.corner_images = corners
                continue
            if a + length <= m:
                b.outer = b.outer[:a] + new + b.outer[a + length :]
            else:
                over = a + length - m
                b.outer = b.outer[over:a] + new
            break
        else:
            break
    return b.diagram()


def _undo_face(b: _Builder, f: str) -> None:
    b.faces.pop(f)
    b.ccw.pop(f)
    b.mf.pop(f)


def iter_fuzz(
    target: TwoComplex,
    stacking: Stacking,
    count: int,
    size_cap: int,
    seed: int,
    stats: FuzzStats | None = None,
    max_attempts: int | None = None,
) -> Iterator[tuple[DiskDiagram, Stacking]]:
    """Seeded stream of reduced disk diagrams with good induced stackings."""
    stats = stats if stats is not None else FuzzStats()
    if count <= 0 or not target.faces:
        return
    rng = random.Random(seed)
    limit = max_attempts if max_attempts is not None else 50 * count
    while stats.produced < count and stats.attempts < limit:
        stats.attempts += 1
        size = rng.randint(1, max(1, size_cap))
        d = _grow(target, rng, size, stats)
        if d is None:
            continue
        bad = check_diagram(d, target)
        if not bad.ok:
            raise DiagramError("generator produced an invalid diagram: " + bad.violations[0].message)
        if not check_reduced(d).ok:
            raise DiagramError("generator produced an unreduced diagram")
        try:
            s = induce_stacking(d, stacking)
        except DiagramError:
            stats.rejected["pullback"] += 1
            continue
        if not check_good(d.complex, s).ok:
            stats.rejected["not-good"] += 1
            continue
        stats.produced += 1
        yield d, s


def fuzz_diagrams(
    target: TwoComplex, stacking: Stacking, count: int, size_cap: int, seed: int
) -> tuple[list[tuple[DiskDiagram, Stacking]], FuzzStats]:
    stats = FuzzStats()
    return list(iter_fuzz(target, stacking, count, size_cap, seed, stats)), stats


def write_counterexample(directory: str | Path, name: str, d: DiskDiagram, s: Stacking, target: TwoComplex) -> Path:
    from .io import complex_to_json, diagram_to_json, stacking_to_json

    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    out = path / f"{name}.json"
    doc = {"target": complex_to_json(target), "diagram": diagram_to_json(d), "stacking": stacking_to_json(s)}
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return out


# -- the cube -----------------------------------------------------------------


def cube_complex() -> TwoComplex:
    """Surface of the unit cube.  Vertex ``vXYZ`` sits at (X, Y, Z); edge
    ``xYZ`` runs along the x axis at (y, z) = (Y, Z), and so on."""
    verts = [f"v{x}{y}{z}" for x in "01" for y in "01" for z in "01"]
    edges = []
    for a in "01":
        for b in "01":
            edges.append((f"x{a}{b}", f"v0{a}{b}", f"v1{a}{b}"))
            edges.append((f"y{a}{b}", f"v{a}0{b}", f"v{a}1{b}"))
            edges.append((f"z{a}{b}", f"v{a}{b}0", f"v{a}{b}1"))
    L = lambda e, d=1: Letter(e, d)
    faces = [
        ("B", [L("x00"), L("y10"), L("x10", -1), L("y00", -1)]),
        ("T", [L("x01"), L("y11"), L("x11", -1), L("y01", -1)]),
        ("E1", [L("x00"), L("z10"), L("x01", -1), L("z00", -1)]),
        ("E2", [L("y10"), L("z11"), L("y11", -1), L("z10", -1)]),
        ("E3", [L("x10"), L("z11"), L("x11", -1), L("z01", -1)]),
        ("E4", [L("y00"), L("z01"), L("y01", -1), L("z00", -1)]),
    ]
    return TwoComplex.build(verts, edges, faces)


# lower face first over each edge
CUBE_SIDE_ORDER = {
    "z10": ("E1", "E2"),
    "z11": ("E2", "E3"),
    "z01": ("E3", "E4"),
    "z00": ("E4", "E1"),
    "x00": ("E1", "B"),
    "y10": ("E2", "B"),
    "x10": ("E3", "B"),
    "y00": ("E4", "B"),
    "x01": ("E1", "T"),
    "y11": ("E2", "T"),
    "x11": ("E3", "T"),
    "y01": ("E4", "T"),
}


def cube_fixture() -> tuple[TwoComplex, Stacking]:
    """A stacking of the cube where every face has a high side, the top and
    bottom have no low side, and the four walls form a directed dual cycle."""
    from .stacking import stacking_from_side_orders

    c = cube_complex()
    order = {}
    for e, faces in CUBE_SIDE_ORDER.items():
        by_face = {s.face: s for s in c.sides_over(e)}
        order[e] = tuple(by_face[f] for f in faces)
    try:
        return c, stacking_from_side_orders(c, order)
    except InvalidStacking as exc:  # pragma: no cover - frozen data
        raise DiagramError(str(exc)) from exc
