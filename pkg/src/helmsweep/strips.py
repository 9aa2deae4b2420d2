"""Overlapping vertical strip decomposition of a grid's column range.

Cut positions c_i = round(i*nx/N) partition the nx cells; strip i spans the
node columns [a_i, b_i] with a_i = c_{i-1} - m/2 and b_i = c_i + m/2 for an
even overlap of m cells (edge strips clamp to the domain).  Neighboring
strips then share exactly m cell columns, and every interior interface
column lies strictly inside the neighboring strip with both of its neighbor
columns available there, which the trace extraction requires.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field


@dataclass(frozen=True)
class StripDecomposition:
    """Column ranges of the strips plus bookkeeping for ownership."""

    nx: int
    overlap_cells: int
    cuts: tuple[int, ...]                 # c_0 = 0 < ... < c_N = nx
    spans: tuple[tuple[int, int], ...]    # (a_i, b_i) node-column ranges
    width_bound_ok: bool = True

    @property
    def nstrips(self) -> int:
        return len(self.spans)

    def left_interface(self, i: int) -> int:
        """Interface column of strip i's left boundary (strips numbered 1..N)."""
        if i < 2:
            raise ValueError("strip 1 has no left interface")
        return self.spans[i - 1][0]

    def right_interface(self, i: int) -> int:
        if i > self.nstrips - 1:
            raise ValueError(f"strip {self.nstrips} has no right interface")
        return self.spans[i - 1][1]

    def owned_columns(self, i: int) -> tuple[int, int]:
        """Non-overlapping cut partition: columns [c_{i-1}, c_i)."""
        lo = self.cuts[i - 1]
        hi = self.cuts[i] if i < self.nstrips else self.nx + 1
        return (lo, hi)


def build_strips(nx: int, nstrips: int, overlap_cells: int,
                 enforce_width_bound: bool = True) -> StripDecomposition:
    """Split nx cell columns into overlapping strips.

    Rejects geometries where interfaces would leave the domain or touch its
    vertical edges.  The width rule (every strip at least twice the overlap,
    i.e. the overlap below half the strip width) is enforced by default;
    with enforce_width_bound=False a violation only emits a warning and is
    recorded on the result, which published runs with very thin strips need.
    """
    if nstrips < 2:
        raise ValueError("need at least 2 strips")
    if overlap_cells < 2 or overlap_cells % 2 != 0:
        raise ValueError("overlap_cells must be an even integer >= 2")
    cuts = [int(math.floor(i * nx / nstrips + 0.5)) for i in range(nstrips + 1)]
    cuts[0], cuts[-1] = 0, nx
    for i in range(nstrips):
        if cuts[i + 1] - cuts[i] < 2:
            raise ValueError(
                f"too many subdomains for the grid: cut spacing "
                f"{cuts[i + 1] - cuts[i]} < 2 between cuts {i} and {i + 1}"
            )
    half = overlap_cells // 2
    spans = []
    for i in range(1, nstrips + 1):
        a = 0 if i == 1 else cuts[i - 1] - half
        b = nx if i == nstrips else cuts[i] + half
        spans.append((a, b))
    for i, (a, b) in enumerate(spans, start=1):
        if i >= 2 and a < 1:
            raise ValueError(
                f"strip {i}: left interface column {a} leaves the domain "
                f"(overlap too large for the cut spacing)"
            )
        if i <= nstrips - 1 and b > nx - 1:
            raise ValueError(f"strip {i}: right interface column {b} leaves the domain")
    # interfaces must lie strictly inside the neighbor strip with both
    # neighbor columns available there
    for i in range(2, nstrips + 1):
        g = spans[i - 1][0]
        an, bn = spans[i - 2]
        if not (an <= g - 1 and g + 1 <= bn):
            raise ValueError(f"strip {i}: left interface {g} not interior to strip {i - 1}")
    for i in range(1, nstrips):
        g = spans[i - 1][1]
        an, bn = spans[i]
        if not (an <= g - 1 and g + 1 <= bn):
            raise ValueError(f"strip {i}: right interface {g} not interior to strip {i + 1}")

    width_ok = all(b - a >= 2 * overlap_cells for (a, b) in spans)
    if not width_ok:
        worst = min(b - a for (a, b) in spans)
        msg = (f"minimum strip width {worst} cells is below twice the overlap "
               f"({2 * overlap_cells} cells)")
        if enforce_width_bound:
            raise ValueError(msg)
        warnings.warn(msg, stacklevel=2)
    return StripDecomposition(nx=nx, overlap_cells=overlap_cells,
                              cuts=tuple(cuts), spans=tuple(spans),
                              width_bound_ok=width_ok)
