"""Substructured interface system and its sweeping preconditioners.

The volume problem is reduced to the impedance traces h_{i,l}, h_{i,r} that
each strip receives on its interface columns.  With S_i the factored strip
solve and B the trace extraction, the exchange operator

    T(h)_{i+1,l} = B_{i+1,l}(S_i(h_{i,l}, h_{i,r}, 0))
    T(h)_{i-1,r} = B_{i-1,r}(S_i(h_{i,l}, h_{i,r}, 0))

moves outgoing data to the neighbors, and the volume solution solves the
fixed point (Id - T) h = G with G the traces of the true sources.  Trace
vectors stack the 2(N-1) interface blocks in the order

    (h_{2,l}, ..., h_{N,l}, h_{1,r}, ..., h_{N-1,r}),

each of length ny+1.  In that basis T splits into four parts: M_l (left
data moving right), M_r (right data moving left), and the reflection parts
A_r, A_l (left data bouncing back rightward as right data and vice versa).
The one-way part M_l + M_r is nilpotent (left data only ever moves to
higher strips, right data to lower), so Id - (M_l + M_r) is inverted
exactly by two independent substitution sweeps; that inverse is one of the
preconditioners here, the other is the forward/backward double sweep that
also carries reflections backward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BoundarySpec, ComplexArray, Grid, WavenumberField
from .strips import StripDecomposition
from .subdomain import LocalSolver


@dataclass(frozen=True)
class TraceLayout:
    """Block layout of a trace vector: 2(N-1) blocks of ny+1 values."""

    nstrips: int
    block_len: int

    def __post_init__(self):
        if self.nstrips < 2:
            raise ValueError("need at least 2 strips")
        if self.block_len < 1:
            raise ValueError("blocks must be nonempty")

    @property
    def nblocks(self) -> int:
        return 2 * (self.nstrips - 1)

    @property
    def size(self) -> int:
        return self.nblocks * self.block_len

    def slot(self, side: str, i: int) -> int:
        n = self.nstrips
        if side == "left":
            if not 2 <= i <= n:
                raise ValueError(f"no left trace block for strip {i}")
            return i - 2
        if side == "right":
            if not 1 <= i <= n - 1:
                raise ValueError(f"no right trace block for strip {i}")
            return (n - 1) + (i - 1)
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")

    def blocks(self):
        for i in range(2, self.nstrips + 1):
            yield ("left", i)
        for i in range(1, self.nstrips):
            yield ("right", i)


@dataclass
class TraceVector:
    """Stacked interface data with Euclidean vector-space operations."""

    layout: TraceLayout
    data: ComplexArray

    @classmethod
    def zeros(cls, layout: TraceLayout) -> "TraceVector":
        return cls(layout, np.zeros(layout.size, dtype=np.complex128))

    def block(self, side: str, i: int) -> ComplexArray:
        s = self.layout.slot(side, i) * self.layout.block_len
        return self.data[s:s + self.layout.block_len]

    def copy(self) -> "TraceVector":
        return TraceVector(self.layout, self.data.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __add__(self, other: "TraceVector") -> "TraceVector":
        return TraceVector(self.layout, self.data + other.data)

    def __sub__(self, other: "TraceVector") -> "TraceVector":
        return TraceVector(self.layout, self.data - other.data)

    def __rmul__(self, a) -> "TraceVector":
        return TraceVector(self.layout, a * self.data)


class SubstructuredSystem:
    """Factored strips plus the interface operators built on them."""

    def __init__(self, grid: Grid, kfield: WavenumberField, bc: BoundarySpec,
                 decomp: StripDecomposition):
        self.grid = grid
        self.kfield = kfield
        self.bc = bc
        self.decomp = decomp
        self.nstrips = decomp.nstrips
        self.solvers = [LocalSolver(grid, kfield, bc, decomp, i)
                        for i in range(1, decomp.nstrips + 1)]
        self.layout = TraceLayout(decomp.nstrips, grid.ny + 1)

    # strip i's solver (strips are numbered 1..N)
    def _solver(self, i: int) -> LocalSolver:
        return self.solvers[i - 1]

    def _left_col(self, i: int) -> int:
        return self.decomp.left_interface(i)

    def _right_col(self, i: int) -> int:
        return self.decomp.right_interface(i)

    def _restrict(self, f, i: int):
        if f is None:
            return None
        a, b = self.decomp.spans[i - 1]
        return np.asarray(f, dtype=np.complex128)[a:b + 1, :]

    def apply_exchange(self, h: TraceVector) -> TraceVector:
        """Full exchange T: one strip solve each, both outgoing traces."""
        out = TraceVector.zeros(self.layout)
        n = self.nstrips
        for i in range(1, n + 1):
            left = h.block("left", i) if i >= 2 else None
            right = h.block("right", i) if i <= n - 1 else None
            sv = self._solver(i)
            v = sv.solve(left=left, right=right)
            if i <= n - 1:
                out.block("left", i + 1)[:] = sv.trace_from(v, self._left_col(i + 1), "left")
            if i >= 2:
                out.block("right", i - 1)[:] = sv.trace_from(v, self._right_col(i - 1), "right")
        return out

    def apply_oneway(self, h: TraceVector) -> TraceVector:
        """Direction-preserving part M_l + M_r of the exchange."""
        out = TraceVector.zeros(self.layout)
        n = self.nstrips
        for i in range(2, n):
            sv = self._solver(i)
            v = sv.solve(left=h.block("left", i))
            out.block("left", i + 1)[:] = sv.trace_from(v, self._left_col(i + 1), "left")
        for i in range(2, n):
            sv = self._solver(i)
            v = sv.solve(right=h.block("right", i))
            out.block("right", i - 1)[:] = sv.trace_from(v, self._right_col(i - 1), "right")
        return out

    def apply_reflection(self, h: TraceVector) -> TraceVector:
        """Direction-reversing remainder A_l + A_r of the exchange."""
        out = TraceVector.zeros(self.layout)
        n = self.nstrips
        for i in range(1, n):
            sv = self._solver(i)
            v = sv.solve(right=h.block("right", i))
            out.block("left", i + 1)[:] = sv.trace_from(v, self._left_col(i + 1), "left")
        for i in range(2, n + 1):
            sv = self._solver(i)
            v = sv.solve(left=h.block("left", i))
            out.block("right", i - 1)[:] = sv.trace_from(v, self._right_col(i - 1), "right")
        return out

    def apply_interface_system(self, h: TraceVector) -> TraceVector:
        """(Id - T) h, the substructured system operator."""
        return h - self.apply_exchange(h)

    def source_traces(self, f=None) -> TraceVector:
        """Right-hand side G: outgoing traces of the true local sources."""
        out = TraceVector.zeros(self.layout)
        n = self.nstrips
        for i in range(1, n + 1):
            sv = self._solver(i)
            v = sv.solve(f=self._restrict(f, i), with_bc_data=True)
            if i <= n - 1:
                out.block("left", i + 1)[:] = sv.trace_from(v, self._left_col(i + 1), "left")
            if i >= 2:
                out.block("right", i - 1)[:] = sv.trace_from(v, self._right_col(i - 1), "right")
        return out

    def solve_oneway(self, r: TraceVector) -> TraceVector:
        """Invert Id - (M_l + M_r) by two independent substitution sweeps."""
        out = TraceVector.zeros(self.layout)
        n = self.nstrips
        out.block("left", 2)[:] = r.block("left", 2)
        for i in range(2, n):
            sv = self._solver(i)
            v = sv.solve(left=out.block("left", i))
            out.block("left", i + 1)[:] = (
                r.block("left", i + 1) + sv.trace_from(v, self._left_col(i + 1), "left"))
        out.block("right", n - 1)[:] = r.block("right", n - 1)
        for i in range(n - 1, 1, -1):
            sv = self._solver(i)
            v = sv.solve(right=out.block("right", i))
            out.block("right", i - 1)[:] = (
                r.block("right", i - 1) + sv.trace_from(v, self._right_col(i - 1), "right"))
        return out

    def solve_double_sweep(self, r: TraceVector) -> TraceVector:
        """Forward sweep on left data, then a backward sweep carrying both.

        Solves the block-triangular cascade
            (Id - M_l) h_half = r_l
            (Id - M_r) h_r = A_r h_half + r_r
            h_l = M_l h_half + A_l h_r + r_l
        with one strip solve per sweep step; the backward loop runs down to
        strip 1, whose solve feeds the reflection term of h_{2,l}.
        """
        n = self.nstrips
        half = TraceVector.zeros(self.layout)
        half.block("left", 2)[:] = r.block("left", 2)
        for i in range(2, n):
            sv = self._solver(i)
            v = sv.solve(left=half.block("left", i))
            half.block("left", i + 1)[:] = (
                r.block("left", i + 1) + sv.trace_from(v, self._left_col(i + 1), "left"))
        out = TraceVector.zeros(self.layout)
        for i in range(n, 0, -1):
            left = half.block("left", i) if i >= 2 else None
            right = out.block("right", i) if i <= n - 1 else None
            sv = self._solver(i)
            v = sv.solve(left=left, right=right)
            if i >= 2:
                out.block("right", i - 1)[:] = (
                    r.block("right", i - 1) + sv.trace_from(v, self._right_col(i - 1), "right"))
            if i <= n - 1:
                out.block("left", i + 1)[:] = (
                    r.block("left", i + 1) + sv.trace_from(v, self._left_col(i + 1), "left"))
        return out

    def fixed_point(self, g: TraceVector, method: str = "jacobi",
                    tol: float = 1e-6, maxit: int = 1000):
        """Stationary iteration diagnostic; returns (h, history, converged).

        jacobi: h <- T h + g.  osds: h <- solve_oneway((T - oneway) h + g),
        i.e. the one-way part is inverted exactly every step.  history[j] is
        the relative residual ||(Id - T) h_j - g|| / ||g|| of iterate j.
        """
        if method not in ("jacobi", "osds"):
            raise ValueError(f"unknown fixed-point method {method!r}")
        gnorm = g.norm()
        h = TraceVector.zeros(self.layout)
        if gnorm == 0.0:
            return h, [0.0], True
        history = []
        converged = False
        for it in range(maxit + 1):
            if method == "jacobi":
                t = self.apply_exchange(h)
                res = (h - t - g).norm() / gnorm
                history.append(res)
                if res <= tol:
                    converged = True
                    break
                if it < maxit:
                    h = t + g
            else:
                oneway = self.apply_oneway(h)
                refl = self.apply_reflection(h)
                res = (h - oneway - refl - g).norm() / gnorm
                history.append(res)
                if res <= tol:
                    converged = True
                    break
                if it < maxit:
                    h = self.solve_oneway(refl + g)
        return h, history, converged

    def reconstruct(self, h: TraceVector, f=None) -> ComplexArray:
        """Assemble the volume solution from converged traces.

        Each strip solves with its trace data and the true sources; the
        global field takes each strip's values on its owned cut columns.
        """
        n = self.nstrips
        u = np.zeros(self.grid.shape, dtype=np.complex128)
        for i in range(1, n + 1):
            sv = self._solver(i)
            left = h.block("left", i) if i >= 2 else None
            right = h.block("right", i) if i <= n - 1 else None
            v = sv.solve(left=left, right=right, f=self._restrict(f, i),
                         with_bc_data=True)
            lo, hi = self.decomp.owned_columns(i)
            a = self.decomp.spans[i - 1][0]
            u[lo:hi, :] = v[lo - a:hi - a, :]
        return u


def dense_matrix(op, layout: TraceLayout) -> ComplexArray:
    """Materialize a trace operator densely by probing unit vectors."""
    n = layout.size
    mat = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        e = TraceVector.zeros(layout)
        e.data[j] = 1.0
        mat[:, j] = op(e).data
    return mat


def part_masks(layout: TraceLayout) -> dict[str, np.ndarray]:
    """Boolean masks of the four parts of T in the trace basis.

    'ml': left rows/left cols, 'ar': right rows/left cols, 'mr': right
    rows/right cols, 'al': left rows/right cols.
    """
    nleft = (layout.nstrips - 1) * layout.block_len
    total = layout.size
    is_left = np.zeros(total, dtype=bool)
    is_left[:nleft] = True
    row_l = is_left[:, None]
    col_l = is_left[None, :]
    return {
        "ml": row_l & col_l,
        "al": row_l & ~col_l,
        "ar": ~row_l & col_l,
        "mr": ~row_l & ~col_l,
    }
