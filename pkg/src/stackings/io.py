"""JSON encodings of every artifact the command line reads or writes.

Readers are strict: unknown fields, duplicate keys and duplicate ids raise
:class:`MalformedInput`.  Writers emit sorted keys so that output is
byte-for-byte reproducible.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .complex import Corner, Letter, Side, TwoComplex
from .convert import Certificate
from .cover import SORTS, CoverData, DeckMap, Presentation, compute_frontier
from .diagrams import DiskDiagram
from .groups import Group, GroupError, format_word, group_from_json, parse_word
from .orders import OrderError, Relation
from .stacking import Stacking
from .structures import BislimStructure, ISStructure, StaggeredStructure, TISStructure


class MalformedInput(ValueError):
    pass


# -- plumbing -----------------------------------------------------------------


def _reject_duplicates(pairs: list[tuple[str, Any]]) -> dict:
    out = {}
    for k, v in pairs:
        if k in out:
            raise MalformedInput(f"duplicate key {k!r}")
        out[k] = v
    return out


def loads(text: str) -> Any:
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"not valid JSON: {exc}") from exc


def load(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    return loads(text)


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _obj(data: Any, where: str, required: set[str], optional: set[str] = frozenset()) -> Mapping:
    if not isinstance(data, Mapping):
        raise MalformedInput(f"{where}: expected an object")
    unknown = set(data) - required - set(optional)
    if unknown:
        raise MalformedInput(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(data)
    if missing:
        raise MalformedInput(f"{where}: missing field(s) {sorted(missing)}")
    return data


def _list(data: Any, where: str) -> list:
    if not isinstance(data, list):
        raise MalformedInput(f"{where}: expected a list")
    return data


def _str(data: Any, where: str) -> str:
    if not isinstance(data, str):
        raise MalformedInput(f"{where}: expected a string id")
    return data


def _ids(data: Any, where: str) -> list[str]:
    out = [_str(x, where) for x in _list(data, where)]
    seen = set()
    for x in out:
        if x in seen:
            raise MalformedInput(f"{where}: duplicate id {x!r}")
        seen.add(x)
    return out


def _str_map(data: Any, where: str) -> dict[str, str]:
    if not isinstance(data, Mapping):
        raise MalformedInput(f"{where}: expected an object")
    return {k: _str(v, where) for k, v in data.items()}


def _dir(x: Any, where: str) -> int:
    if isinstance(x, bool) or x not in (1, -1):
        raise MalformedInput(f"{where}: direction must be +1 or -1")
    return int(x)


def _letter(data: Any, where: str) -> Letter:
    d = _obj(data, where, {"edge", "dir"})
    return Letter(_str(d["edge"], where), _dir(d["dir"], where))


def _letter_json(l: Letter) -> dict:
    return {"edge": l.edge, "dir": l.dir}


def _pair(data: Any, where: str) -> tuple[str, int]:
    if not (isinstance(data, list) and len(data) == 2 and isinstance(data[0], str)):
        raise MalformedInput(f"{where}: expected [face, pos]")
    if isinstance(data[1], bool) or not isinstance(data[1], int):
        raise MalformedInput(f"{where}: position must be an integer")
    return data[0], data[1]


# -- complexes ----------------------------------------------------------------


def complex_to_json(c: TwoComplex) -> dict:
    return {
        "vertices": sorted(c.vertices),
        "edges": [{"id": e, "src": s, "dst": t} for e, (s, t) in sorted(c.edges.items())],
        "faces": [{"id": f, "boundary": [_letter_json(l) for l in w]} for f, w in sorted(c.faces.items())],
    }


def complex_from_json(data: Any, extra: set[str] = frozenset()) -> TwoComplex:
    d = _obj(data, "complex", {"vertices", "edges", "faces"}, extra)
    vertices = _ids(d["vertices"], "complex.vertices")
    edges = {}
    for item in _list(d["edges"], "complex.edges"):
        e = _obj(item, "complex.edges[]", {"id", "src", "dst"})
        eid = _str(e["id"], "complex.edges[].id")
        if eid in edges:
            raise MalformedInput(f"complex.edges: duplicate id {eid!r}")
        edges[eid] = (_str(e["src"], "edge src"), _str(e["dst"], "edge dst"))
    faces = {}
    for item in _list(d["faces"], "complex.faces"):
        f = _obj(item, "complex.faces[]", {"id", "boundary"})
        fid = _str(f["id"], "complex.faces[].id")
        if fid in faces:
            raise MalformedInput(f"complex.faces: duplicate id {fid!r}")
        faces[fid] = tuple(_letter(l, f"face {fid}") for l in _list(f["boundary"], f"face {fid}"))
    return TwoComplex(tuple(vertices), edges, faces)


# -- orders and stackings ------------------------------------------------------


def relation_to_json(r: Relation) -> dict:
    return r.as_json()


def relation_from_json(data: Any, where: str = "order") -> Relation:
    d = _obj(data, where, {"ground", "pairs"})
    ground = _ids(d["ground"], f"{where}.ground")
    pairs = []
    for p in _list(d["pairs"], f"{where}.pairs"):
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)):
            raise MalformedInput(f"{where}.pairs: expected [a, b]")
        pairs.append(tuple(p))
    try:
        return Relation(frozenset(ground), frozenset(pairs))
    except OrderError as exc:
        raise MalformedInput(f"{where}: {exc}") from exc


def stacking_to_json(s: Stacking) -> dict:
    return {
        "side_order": {e: [list(x) for x in seq] for e, seq in sorted(s.side_order.items())},
        "corner_order": {v: [list(x) for x in seq] for v, seq in sorted(s.corner_order.items())},
    }


def stacking_from_json(data: Any) -> Stacking:
    d = _obj(data, "stacking", {"side_order", "corner_order"})
    sides = {
        _str(e, "side_order"): tuple(Side(*_pair(x, f"side_order.{e}")) for x in _list(seq, f"side_order.{e}"))
        for e, seq in _obj(d["side_order"], "side_order", set(d["side_order"])).items()
    }
    corners = {
        _str(v, "corner_order"): tuple(Corner(*_pair(x, f"corner_order.{v}")) for x in _list(seq, f"corner_order.{v}"))
        for v, seq in _obj(d["corner_order"], "corner_order", set(d["corner_order"])).items()
    }
    return Stacking(sides, corners)


# -- groups, presentations and covers -----------------------------------------


def group_to_json(g: Group) -> dict:
    return g.as_json()


def group_from_json_checked(data: Any) -> Group:
    if not isinstance(data, Mapping):
        raise MalformedInput("oracle: expected an object")
    try:
        return group_from_json(data)
    except (GroupError, KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"oracle: {exc}") from exc


def _fraction(x: Any, where: str) -> Fraction:
    try:
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"{where}: not a rational number: {x!r}") from exc


def presentation_from_json(data: Any) -> tuple[Presentation, Group | None, dict[str, tuple[Fraction, Fraction]] | None]:
    """``(presentation, oracle, face_points)``; the last two may be absent."""
    d = _obj(data, "presentation", {"generators", "relators"}, {"oracle", "face_points"})
    gens = tuple(_ids(d["generators"], "presentation.generators"))
    relators = {}
    for name, text in _obj(d["relators"], "relators", set(d["relators"])).items():
        try:
            w = parse_word(_str(text, f"relator {name}"))
        except GroupError as exc:
            raise MalformedInput(f"relator {name}: {exc}") from exc
        if any(g not in gens for g, _ in w):
            raise MalformedInput(f"relator {name} uses an unknown generator")
        relators[name] = w
    group = group_from_json_checked(d["oracle"]) if "oracle" in d else None
    points = None
    if "face_points" in d:
        points = {}
        for f, xy in _obj(d["face_points"], "face_points", set(d["face_points"])).items():
            xy = _list(xy, f"face_points.{f}")
            if len(xy) != 2:
                raise MalformedInput(f"face_points.{f}: expected [x, y]")
            points[f] = (_fraction(xy[0], f), _fraction(xy[1], f))
    return Presentation(gens, relators), group, points


def presentation_to_json(p: Presentation, group: Group | None = None, face_points=None) -> dict:
    doc: dict = {"generators": list(p.generators), "relators": {r: format_word(w) for r, w in p.relators.items()}}
    if group is not None:
        doc["oracle"] = group.as_json()
    if face_points:
        doc["face_points"] = {f: [str(x), str(y)] for f, (x, y) in face_points.items()}
    return doc


def cover_to_json(c: CoverData) -> dict:
    deck = {}
    for g, m in sorted(c.deck.items()):
        flat = {}
        for sort in SORTS:
            flat.update(m.of(sort))
        deck[g] = dict(sorted(flat.items()))
    doc = {
        "ball": complex_to_json(c.ball),
        "quotient": complex_to_json(c.quotient),
        "projection": {
            "vertices": dict(sorted(c.proj_vertex.items())),
            "edges": dict(sorted(c.proj_edge.items())),
            "faces": dict(sorted(c.proj_face.items())),
        },
        "deck": deck,
        "frontier": sorted(c.frontier),
        "simply_connected_quotient": c.simply_connected_quotient,
        "address": {cell: format_word(w) for cell, w in sorted(c.address.items())},
    }
    if c.group is not None:
        doc["oracle"] = c.group.as_json()
    return doc


def cover_from_json(data: Any) -> CoverData:
    d = _obj(
        data,
        "cover",
        {"ball", "quotient", "projection"},
        {"deck", "frontier", "simply_connected_quotient", "address", "oracle"},
    )
    ball = complex_from_json(d["ball"])
    quotient = complex_from_json(d["quotient"])
    proj = _obj(d["projection"], "cover.projection", set(SORTS))
    pv, pe, pf = (_str_map(proj[s], f"projection.{s}") for s in SORTS)
    sort_of = {}
    for sort, ids in (("vertices", ball.vertices), ("edges", ball.edges), ("faces", ball.faces)):
        for x in ids:
            if x in sort_of:
                raise MalformedInput(f"cover: id {x!r} names cells of two dimensions")
            sort_of[x] = sort
    for sort, m, cells, targets in (
        ("vertices", pv, ball.vertices, quotient.vertices),
        ("edges", pe, ball.edges, quotient.edges),
        ("faces", pf, ball.faces, quotient.faces),
    ):
        if set(m) != set(cells):
            odd = sorted(set(m) ^ set(cells))[0]
            raise MalformedInput(f"projection.{sort} must cover exactly the ball's {sort}; {odd!r} does not fit")
        stray = sorted(y for y in m.values() if y not in targets)
        if stray:
            raise MalformedInput(f"projection.{sort}: {stray[0]!r} is not in the quotient")
    deck = {}
    for g, flat in dict(d.get("deck", {})).items():
        parts: dict[str, dict[str, str]] = {s: {} for s in SORTS}
        for cell, image in _str_map(flat, f"deck.{g}").items():
            if cell not in sort_of or sort_of.get(image) != sort_of[cell]:
                raise MalformedInput(f"deck.{g}: {cell!r} -> {image!r} is not a map between ball cells of one dimension")
            parts[sort_of[cell]][cell] = image
        deck[g] = DeckMap(parts["vertices"], parts["edges"], parts["faces"])
    address = {}
    for cell, text in _str_map(d.get("address", {}), "address").items():
        try:
            address[cell] = parse_word(text)
        except GroupError as exc:
            raise MalformedInput(f"address of {cell}: {exc}") from exc
    if "frontier" in d:
        frontier = frozenset(_ids(d["frontier"], "cover.frontier"))
    else:
        frontier = compute_frontier(ball, quotient, pv, pe, pf)
    simply = d.get("simply_connected_quotient", False)
    if not isinstance(simply, bool):
        raise MalformedInput("simply_connected_quotient must be a boolean")
    group = group_from_json_checked(d["oracle"]) if "oracle" in d else None
    return CoverData(ball, quotient, pv, pe, pf, deck, frontier, simply, address, group)


# -- certificates --------------------------------------------------------------


def certificate_to_json(cert: Certificate) -> dict:
    v = cert.value
    doc: dict = {"kind": cert.kind}
    if cert.kind == "gs":
        doc["complex"] = complex_to_json(cert.base_complex())
        doc["stacking"] = stacking_to_json(v)
    elif cert.kind in ("bs", "tbs"):
        doc["preorder"] = relation_to_json(v.preorder)
        doc["plus"] = dict(sorted(v.plus.items()))
        doc["minus"] = dict(sorted(v.minus.items()))
    elif cert.kind in ("is", "tis"):
        doc["face_order"] = relation_to_json(v.face_order)
        doc["plus_order"] = relation_to_json(v.plus_order)
        doc["minus_order"] = relation_to_json(v.minus_order)
        doc["E_plus"] = sorted(v.e_plus)
        doc["E_minus"] = sorted(v.e_minus)
    elif cert.kind == "staggered":
        doc["complex"] = complex_to_json(v.complex)
        doc["face_order"] = list(v.face_order)
        doc["edge_order"] = list(v.edge_order)
    else:
        raise MalformedInput(f"unknown certificate kind {cert.kind!r}")
    if cert.cover is not None:
        doc["cover"] = cover_to_json(cert.cover)
    return doc


_FIELDS = {
    "gs": ({"kind", "complex", "stacking"}, {"cover"}),
    "bs": ({"kind", "cover", "preorder", "plus", "minus"}, set()),
    "tbs": ({"kind", "cover", "preorder", "plus", "minus"}, set()),
    "is": ({"kind", "cover", "face_order", "plus_order", "minus_order", "E_plus", "E_minus"}, set()),
    "tis": ({"kind", "cover", "face_order", "plus_order", "minus_order", "E_plus", "E_minus"}, set()),
    "staggered": ({"kind", "complex", "face_order", "edge_order"}, {"cover"}),
}


def certificate_from_json(data: Any, cover: CoverData | None = None) -> Certificate:
    """Read a certificate; ``cover`` fills in for a missing ``"cover"`` field."""
    if not isinstance(data, Mapping) or data.get("kind") not in _FIELDS:
        raise MalformedInput("certificate: missing or unknown 'kind'")
    kind = data["kind"]
    required, optional = _FIELDS[kind]
    if "cover" in required and "cover" not in data and cover is not None:
        required = required - {"cover"}
    d = _obj(data, f"{kind} certificate", required, optional | {"cover"})
    if "cover" in d:
        cover = cover_from_json(d["cover"])
    if kind == "gs":
        return Certificate("gs", stacking_from_json(d["stacking"]), cover, complex_from_json(d["complex"]))
    if kind in ("bs", "tbs"):
        value = BislimStructure(
            cover,
            relation_from_json(d["preorder"], "preorder"),
            _str_map(d["plus"], "plus"),
            _str_map(d["minus"], "minus"),
        )
        return Certificate(kind, value, cover)
    if kind in ("is", "tis"):
        orders = [relation_from_json(d[k], k) for k in ("face_order", "plus_order", "minus_order")]
        if set(_ids(d["E_plus"], "E_plus")) != orders[1].ground:
            raise MalformedInput("E_plus differs from the ground of plus_order")
        if set(_ids(d["E_minus"], "E_minus")) != orders[2].ground:
            raise MalformedInput("E_minus differs from the ground of minus_order")
        cls = TISStructure if kind == "tis" else ISStructure
        return Certificate(kind, cls(cover, *orders), cover)
    value = StaggeredStructure(
        complex_from_json(d["complex"]),
        tuple(_ids(d["face_order"], "face_order")),
        tuple(_ids(d["edge_order"], "edge_order")),
    )
    return Certificate("staggered", value, cover)


# -- diagrams ------------------------------------------------------------------


def diagram_to_json(d: DiskDiagram) -> dict:
    doc = complex_to_json(d.complex)
    doc["rotation"] = {v: [[e, s] for e, s in seq] for v, seq in sorted(d.rotation.items())}
    doc["outer"] = [_letter_json(l) for l in d.outer]
    flat = {**d.map_vertex, **d.map_edge, **d.map_face}
    doc["map"] = dict(sorted(flat.items()))
    return doc


def diagram_from_json(data: Any) -> DiskDiagram:
    c = complex_from_json(
        {k: v for k, v in _obj(data, "diagram", {"vertices", "edges", "faces", "rotation", "outer", "map"}).items() if k in ("vertices", "edges", "faces")}
    )
    rotation = {}
    for v, seq in _obj(data["rotation"], "rotation", set(data["rotation"])).items():
        germs = []
        for g in _list(seq, f"rotation.{v}"):
            if not (isinstance(g, list) and len(g) == 2 and isinstance(g[0], str)):
                raise MalformedInput(f"rotation.{v}: expected [edge, +1|-1]")
            germs.append((g[0], _dir(g[1], f"rotation.{v}")))
        rotation[v] = tuple(germs)
    outer = tuple(_letter(l, "outer") for l in _list(data["outer"], "outer"))
    flat = _str_map(data["map"], "map")
    maps: dict[str, dict[str, str]] = {"v": {}, "e": {}, "f": {}}
    for cell, image in flat.items():
        sorts = [k for k, ids in (("v", c.vertices), ("e", c.edges), ("f", c.faces)) if cell in ids]
        if len(sorts) != 1:
            raise MalformedInput(f"map: {cell!r} does not name exactly one diagram cell")
        maps[sorts[0]][cell] = image
    return DiskDiagram(c, rotation, outer, maps["v"], maps["e"], maps["f"])
