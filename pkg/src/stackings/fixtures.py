"""Bundled example complexes, their oracles and frozen certificates."""

from __future__ import annotations

import json
from fractions import Fraction
from functools import cache
from importlib import resources

from .complex import TwoComplex
from .cover import CoverData, Presentation, build_cayley_ball, identity_cover
from .groups import Group
from .stacking import Stacking
from .structures import StaggeredStructure

PRESENTATIONS = ("f1", "f2", "torus", "ab-ba", "one-relator")
NAMES = PRESENTATIONS + ("cube",)


class UnknownFixture(KeyError):
    pass


@cache
def _doc(name: str) -> dict:
    if name not in PRESENTATIONS:
        raise UnknownFixture(name)
    path = resources.files("stackings") / "data" / f"{name}.json"
    return json.loads(path.read_text())


def presentation(name: str) -> tuple[Presentation, Group | None, dict[str, tuple[Fraction, Fraction]] | None]:
    from .io import presentation_from_json

    doc = _doc(name)
    return presentation_from_json({k: v for k, v in doc.items() if k not in ("stacking", "staggered")})


def complex(name: str) -> TwoComplex:
    if name == "cube":
        from .diagrams import cube_complex

        return cube_complex()
    return presentation(name)[0].complex()


def stacking(name: str) -> Stacking | None:
    """The frozen stacking of a fixture, if it has one."""
    if name == "cube":
        from .diagrams import cube_fixture

        return cube_fixture()[1]
    doc = _doc(name)
    if "stacking" not in doc:
        return None
    from .io import stacking_from_json

    return stacking_from_json(doc["stacking"])


def staggered(name: str) -> StaggeredStructure | None:
    doc = _doc(name).get("staggered")
    if doc is None:
        return None
    return StaggeredStructure(complex(name), tuple(doc["face_order"]), tuple(doc["edge_order"]))


def cover(name: str, radius: int) -> CoverData:
    """A ball of the universal cover, or the complex itself when no oracle is bundled."""
    if name == "cube":
        return identity_cover(complex(name))
    p, group, _ = presentation(name)
    if group is None:
        return identity_cover(p.complex())
    return build_cayley_ball(p, radius, group)
