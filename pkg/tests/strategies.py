"""Shared random generators for the test suite."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from hasse.poly import Poly
from hasse.polymatrix import PolyMatrix
from hasse.presented import PresentedModule


def rand_poly(rng: random.Random, max_degree: int = 3, bound: int = 3) -> Poly:
    return Poly([rng.randint(-bound, bound) for _ in range(rng.randint(0, max_degree) + 1)])


def rand_module(rng: random.Random, gens: int = 3, rels: int = 3, max_degree: int = 4) -> PresentedModule:
    g = rng.randint(1, gens)
    r = rng.randint(0, rels)
    rows = [[rand_poly(rng, max_degree) for _ in range(g)] for _ in range(r)]
    return PresentedModule.from_rows(g, rows)


coeff = st.integers(-4, 4)
polys = st.lists(coeff, min_size=0, max_size=5).map(Poly)


@st.composite
def poly_matrices(draw, max_rows: int = 4, max_cols: int = 4):
    n = draw(st.integers(1, max_rows))
    m = draw(st.integers(1, max_cols))
    return PolyMatrix([[draw(polys) for _ in range(m)] for _ in range(n)])
