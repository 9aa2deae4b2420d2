"""Shared builders for small strip-decomposed test problems."""

import numpy as np
import pytest

from helmsweep.grid import (Grid, HomogeneousModel, BoundarySpec, robin,
                            dirichlet, build_wavenumber)
from helmsweep.strips import build_strips
from helmsweep.substructure import SubstructuredSystem


def left_bump(x, y):
    return np.exp(-3.0 * (y - 0.4) ** 2)


def make_grid(nstrips, ny=8, cells_per_strip=8):
    h = 1.0 / ny
    nx = cells_per_strip * nstrips
    return Grid(0.0, nx * h, 0.0, 1.0, nx, ny, h)


def make_case(nstrips, k=5.0, ny=8, cells_per_strip=8, overlap_cells=2,
              bc=None):
    """Small waveguide-style substructured system, cheap enough for dense
    probing of the interface operators."""
    grid = make_grid(nstrips, ny=ny, cells_per_strip=cells_per_strip)
    kfield = build_wavenumber(grid, HomogeneousModel(k))
    if bc is None:
        bc = BoundarySpec(left=robin(left_bump), right=robin(None),
                          bottom=dirichlet(), top=dirichlet())
    decomp = build_strips(grid.nx, nstrips, overlap_cells)
    return SubstructuredSystem(grid, kfield, bc, decomp)


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
