"""Strip subproblems: factored local Helmholtz solves and trace extraction.

Each strip solves the Helmholtz problem restricted to its column range.  On
columns that touch the physical boundary it carries the grid's conditions;
on an interior vertical boundary (an interface) it carries the impedance
condition (d/dn + i*k) v = h with the strip's outward normal, realized with
the same ghost-eliminated centered-difference stencil as physical absorbing
edges.  That choice makes the interface data of the exact monodomain
solution reproduce that solution on the strip exactly (to solver roundoff),
because eliminating the ghost with the trace of the global solution recovers
the global interior row at the interface column.

Traces are sampled on whole interface columns (ny+1 values, Dirichlet end
nodes included; their rows ignore the datum).  extract_trace evaluates the
outgoing impedance data of a field that lives on a strip containing the
interface column strictly inside it:

    left-normal  (-x):  (v[g-1] - v[g+1])/(2h) + i*k[g]*v[g]
    right-normal (+x):  (v[g+1] - v[g-1])/(2h) + i*k[g]*v[g]
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .banded import BandedLU
from .grid import BoundarySpec, ComplexArray, Grid, RectStencil, SIDES, WavenumberField
from .strips import StripDecomposition


@dataclass(frozen=True)
class Trace:
    """Impedance data on one interface column of one strip."""

    strip: int
    side: str  # "left" or "right"
    values: ComplexArray


def extract_trace(field: ComplexArray, span: tuple[int, int], column: int,
                  side: str, kfield: WavenumberField, h: float) -> ComplexArray:
    """Outgoing impedance data at an interface column from a strip's field.

    field is the (w+1, ny+1) nodal solution on the strip spanning the node
    columns span = (a, b); column is the global interface column, which must
    lie strictly inside (a, b).  side names the boundary the data is for:
    'left' uses the -x normal, 'right' the +x normal.
    """
    a, b = span
    j = column - a
    if not (1 <= j <= b - a - 1):
        raise ValueError(f"interface column {column} not strictly inside span {span}")
    if side == "left":
        diff = (field[j - 1, :] - field[j + 1, :]) / (2.0 * h)
    elif side == "right":
        diff = (field[j + 1, :] - field[j - 1, :]) / (2.0 * h)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return diff + 1j * kfield.values[column, :] * field[j, :]


class LocalSolver:
    """Factored Helmholtz solve on one strip.

    The matrix is assembled and LU-factored once; solve() only rebuilds the
    right-hand side, so repeated applications reuse the factorization.
    """

    def __init__(self, grid: Grid, kfield: WavenumberField, bc: BoundarySpec,
                 decomp: StripDecomposition, strip: int):
        if not (1 <= strip <= decomp.nstrips):
            raise ValueError(f"strip index {strip} out of range 1..{decomp.nstrips}")
        self.strip = strip
        self.grid = grid
        self.kfield = kfield
        self.span = decomp.spans[strip - 1]
        self.has_left = strip >= 2
        self.has_right = strip <= decomp.nstrips - 1
        a, b = self.span

        kinds = {s: bc.kind(s) for s in SIDES}
        if self.has_left:
            kinds["left"] = "robin"  # interface
        if self.has_right:
            kinds["right"] = "robin"
        self.stencil = RectStencil(grid, kfield, kinds, cols=(a, b))
        try:
            self._lu = BandedLU(self.stencil.matrix, self.stencil.bandwidth,
                                self.stencil.bandwidth, label=f"strip {strip}")
        except ValueError as err:
            raise ValueError(f"strip {strip}: local factorization failed") from err

        # physical boundary data restricted to this strip (used when the
        # solve carries the true problem data, e.g. for the source traces)
        self._bc_side_data: dict[str, ComplexArray] = {}
        for s in SIDES:
            if kinds[s] != "robin" or bc.kind(s) != "robin":
                continue
            if s == "left" and self.has_left:
                continue
            if s == "right" and self.has_right:
                continue
            data = bc.edge_values(grid, s)
            if s in ("bottom", "top"):
                data = data[a:b + 1]
            self._bc_side_data[s] = data

    @property
    def factor_count(self) -> int:
        return self._lu.factor_count

    @property
    def solve_count(self) -> int:
        return self._lu.solve_count

    @property
    def matrix(self):
        return self.stencil.matrix

    @property
    def bandwidth(self) -> int:
        return self.stencil.bandwidth

    def solve(self, left: ComplexArray | None = None,
              right: ComplexArray | None = None,
              f: ComplexArray | None = None,
              with_bc_data: bool = False) -> ComplexArray:
        """Solve the strip problem for interface data and a volume source.

        left/right are trace data on the strip's interface columns (ignored
        with a check if the strip has no such interface); f is a (w+1, ny+1)
        nodal source restricted to the strip.  with_bc_data adds the grid's
        physical Robin data, which belongs to solves of the true problem but
        not to applications of the (homogeneous) interface exchange operator.
        Returns the (w+1, ny+1) nodal solution.
        """
        side_data: dict[str, ComplexArray] = {}
        if left is not None:
            if not self.has_left:
                raise ValueError(f"strip {self.strip} has no left interface")
            side_data["left"] = left
        if right is not None:
            if not self.has_right:
                raise ValueError(f"strip {self.strip} has no right interface")
            side_data["right"] = right
        if with_bc_data:
            for s, data in self._bc_side_data.items():
                side_data[s] = side_data.get(s, 0) + data
        rhs = self.stencil.rhs(f, side_data)
        return self.stencil.to_grid(self._lu.solve(rhs))

    def trace_from(self, field: ComplexArray, column: int, side: str) -> ComplexArray:
        """extract_trace against this strip's own span."""
        return extract_trace(field, self.span, column, side, self.kfield, self.grid.h)

    def residual(self, field: ComplexArray, rhs_flat: ComplexArray) -> float:
        x = self.stencil.from_grid(field)
        num = np.linalg.norm(self.stencil.matrix @ x - rhs_flat)
        den = np.linalg.norm(rhs_flat)
        return float(num / den) if den > 0 else float(num)
