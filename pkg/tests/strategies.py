"""Hypothesis strategies for small complexes."""

from __future__ import annotations

from hypothesis import strategies as st

from stackings.complex import Letter, TwoComplex

GENS = ("a", "b", "c")


def _cyclically_reduced(w: list[tuple[str, int]]) -> bool:
    n = len(w)
    if n == 1:
        return True
    return all(not (w[i][0] == w[(i + 1) % n][0] and w[i][1] == -w[(i + 1) % n][1]) for i in range(n))


@st.composite
def relator(draw, gens=GENS, max_len: int = 4):
    w = draw(
        st.lists(st.tuples(st.sampled_from(gens), st.sampled_from((1, -1))), min_size=1, max_size=max_len).filter(
            _cyclically_reduced
        )
    )
    return tuple(w)


@st.composite
def presentation_complex(draw, max_faces: int = 3, max_len: int = 4, gens=GENS):
    """One vertex, a loop per generator, immersed faces."""
    n = draw(st.integers(1, max_faces))
    rels = [draw(relator(gens, max_len)) for _ in range(n)]
    return TwoComplex.build(
        ["v"], [(g, "v", "v") for g in gens], [(f"r{i}", [Letter(g, e) for g, e in w]) for i, w in enumerate(rels)]
    )


@st.composite
def small_complex(draw, max_corners: int = 6):
    c = draw(presentation_complex(max_faces=3, max_len=3))
    corners = sum(len(w) for w in c.faces.values())
    if corners > max_corners:
        keep = {}
        total = 0
        for f, w in sorted(c.faces.items()):
            if total + len(w) <= max_corners:
                keep[f] = w
                total += len(w)
        c = TwoComplex(c.vertices, dict(c.edges), keep)
    return c
