"""Seeded random instances used by tests and the selftest command."""
from __future__ import annotations

import numpy as np

from . import correspondence as cr
from .cmodule import Bar, BarType, GridCModule, GridLine, canonical_type
from .exactfield import FieldSpec, random_subspace


def random_grid(rng: np.random.Generator, n: int) -> GridLine:
    return GridLine(tuple(range(n)))


def random_module(rng: np.random.Generator, n: int, max_dim: int, p: int) -> GridCModule:
    grid = random_grid(rng, n)
    dims = [int(rng.integers(0, max_dim + 1)) for _ in range(grid.npos)]
    corrs = []
    for q in range(grid.npos - 1):
        amb = dims[q] + dims[q + 1]
        corrs.append(cr.Correspondence(dims[q], dims[q + 1], random_subspace(rng, amb, p)))
    return GridCModule(FieldSpec(p), grid, tuple(dims), tuple(corrs))


def random_bar(rng: np.random.Generator, grid: GridLine) -> Bar:
    a = int(rng.integers(0, grid.npos))
    b = int(rng.integers(a, grid.npos))
    t = list(BarType)[int(rng.integers(0, 4))]
    return Bar(a, b, canonical_type(t, a, b, grid.last))
