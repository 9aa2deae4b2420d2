"""Benchmark problems and the run harness.

Three stock problems drive the solver the way the reference experiments
do: a homogeneous waveguide [0,N] x [0,1] with Dirichlet walls and a
Gaussian-windowed mode injected on the left, an open cavity of the same
shape with Dirichlet on three sides and an oblique plane wave on the
left, and the heterogeneous wedge on [0,600] x [0,1000] with a
three-region velocity model, absorbing edges, and a windowed source on
the top edge.  A run builds the problem, factors the strips, solves the
interface system with the chosen preconditioner, and records iteration
counts at each requested tolerance together with CSV/field dumps.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .grid import (BoundarySpec, ComplexArray, Grid, HomogeneousModel,
                   WedgeModel, build_grid, build_wavenumber, dirichlet, robin)
from .krylov import gmres_right
from .strips import build_strips
from .substructure import SubstructuredSystem, TraceVector

PROBLEMS = ("waveguide", "cavity", "wedge")
PRECONDITIONERS = ("jacobi", "ds", "osds")
SOLVERS = ("gmres", "fixed_point")
WEDGE_DOMAIN = ((0.0, 600.0), (0.0, 1000.0))
LONG_RUNNING_UNKNOWNS = 3_000_000


@dataclass(frozen=True)
class ProblemSpec:
    """Complete description of one solver run; JSON round-trippable."""

    problem: str
    k: Optional[float] = None
    omega: Optional[float] = None
    subdomains: int = 5
    overlap_cells: int = 4
    nppwl: int = 24
    tolerances: tuple = (1e-6, 1e-3)
    preconditioner: str = "osds"
    solver: str = "gmres"
    maxit: int = 400
    wedge_upper: tuple = ((0.0, 800.0), (600.0, 600.0))
    wedge_lower: tuple = ((0.0, 500.0), (600.0, 300.0))
    wedge_velocities: tuple = (2000.0, 1500.0, 3000.0)
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.preconditioner not in PRECONDITIONERS:
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.problem == "wedge":
            if self.omega is None:
                raise ValueError("wedge runs need omega")
        elif self.k is None and self.omega is None:
            raise ValueError(f"{self.problem} runs need k (or omega with unit speed)")
        tols = tuple(float(t) for t in self.tolerances)
        if not tols or min(tols) <= 0:
            raise ValueError("tolerances must be positive")
        object.__setattr__(self, "tolerances", tols)
        object.__setattr__(self, "wedge_upper",
                           tuple(tuple(float(v) for v in p) for p in self.wedge_upper))
        object.__setattr__(self, "wedge_lower",
                           tuple(tuple(float(v) for v in p) for p in self.wedge_lower))
        object.__setattr__(self, "wedge_velocities",
                           tuple(float(v) for v in self.wedge_velocities))

    @property
    def homogeneous_k(self) -> float:
        # unit medium speed, so a bare omega doubles as the wavenumber
        return float(self.k if self.k is not None else self.omega)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemSpec":
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - fields
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ProblemSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class RunRecord:
    """Everything one run produced: counts, history, timings, field."""

    spec: ProblemSpec
    counts: dict
    history: list
    converged: bool
    unknowns: int
    trace_size: int
    long_running: bool
    build_time: float
    solve_time: float
    ortho_defect: float = 0.0
    solution: Optional[ComplexArray] = None
    grid: Optional[Grid] = None


def _waveguide_source(y):
    return np.exp(-120.0 * (y - 0.5) ** 2) * np.sin(np.pi * y)


def build_problem(spec: ProblemSpec):
    """Grid, wavenumber field, boundary conditions, volume source."""
    if spec.problem in ("waveguide", "cavity"):
        k = spec.homogeneous_k
        xspan = (0.0, float(spec.subdomains))
        grid = build_grid(xspan, (0.0, 1.0), k, spec.nppwl)
        kfield = build_wavenumber(grid, HomogeneousModel(k))
        if spec.problem == "waveguide":
            bc = BoundarySpec(left=robin(lambda x, y: _waveguide_source(y)),
                              right=robin(None),
                              bottom=dirichlet(), top=dirichlet())
        else:
            theta = np.pi / 8.0
            bc = BoundarySpec(
                left=robin(lambda x, y: np.exp(-1j * k * (x * np.cos(theta)
                                                          + y * np.sin(theta)))),
                right=dirichlet(), bottom=dirichlet(), top=dirichlet())
        return grid, kfield, bc, None

    xspan, yspan = WEDGE_DOMAIN
    model = WedgeModel(spec.wedge_upper, spec.wedge_lower, spec.wedge_velocities)
    k_max = spec.omega / min(spec.wedge_velocities)
    grid = build_grid(xspan, yspan, k_max, spec.nppwl)
    kfield = build_wavenumber(grid, model, omega=spec.omega)
    width = xspan[1] - xspan[0]
    bc = BoundarySpec(
        left=robin(None), right=robin(None), bottom=robin(None),
        top=robin(lambda x, y: np.exp(-120.0 * (x / width - 0.5) ** 2)
                  * np.sin(np.pi * x / width)))
    return grid, kfield, bc, None


def iterations_at(history, tol: float, maxit: int):
    """First history index at or below tol, or '+maxit' if never reached."""
    for i, r in enumerate(history):
        if r <= tol:
            return i
    return f"+{maxit}"


class BenchContext:
    """Built problem plus factored strips, reusable across preconditioners."""

    def __init__(self, spec: ProblemSpec):
        t0 = time.perf_counter()
        self.grid, self.kfield, self.bc, self.f = build_problem(spec)
        # the wedge cuts get narrower than twice a 16-cell overlap well
        # before the decomposition itself degenerates; keep the runs legal
        self.decomp = build_strips(self.grid.nx, spec.subdomains,
                                   spec.overlap_cells,
                                   enforce_width_bound=spec.problem != "wedge")
        self.system = SubstructuredSystem(self.grid, self.kfield, self.bc,
                                          self.decomp)
        self.g = self.system.source_traces(self.f)
        self.build_time = time.perf_counter() - t0
        self.spec = spec

    def solve(self, spec: ProblemSpec) -> RunRecord:
        system = self.system
        layout = system.layout
        tol = min(spec.tolerances)
        t0 = time.perf_counter()
        defect = 0.0
        if spec.solver == "gmres":
            def apply_flat(x):
                return system.apply_interface_system(TraceVector(layout, x)).data

            precond = None
            if spec.preconditioner == "ds":
                def precond(x):
                    return system.solve_double_sweep(TraceVector(layout, x)).data
            elif spec.preconditioner == "osds":
                def precond(x):
                    return system.solve_oneway(TraceVector(layout, x)).data
            report = gmres_right(apply_flat, self.g.data, precond,
                                 tol=tol, maxit=spec.maxit)
            h = TraceVector(layout, report.solution)
            history, converged = report.history, report.converged
            defect = report.ortho_defect
        else:
            if spec.preconditioner == "ds":
                raise ValueError("fixed_point supports jacobi and osds only")
            h, history, converged = system.fixed_point(
                self.g, method=spec.preconditioner, tol=tol, maxit=spec.maxit)
        solve_time = time.perf_counter() - t0
        counts = {f"{t:g}": iterations_at(history, t, spec.maxit)
                  for t in spec.tolerances}
        u = system.reconstruct(h, self.f)
        unknowns = self.grid.npoints
        return RunRecord(spec=spec, counts=counts, history=list(history),
                         converged=converged, unknowns=unknowns,
                         trace_size=layout.size,
                         long_running=unknowns > LONG_RUNNING_UNKNOWNS,
                         build_time=self.build_time, solve_time=solve_time,
                         ortho_defect=defect, solution=u, grid=self.grid)


def write_outputs(record: RunRecord, out_dir) -> None:
    """residuals.csv, solution.field, manifest.json under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "residuals.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", "residual"])
        for i, r in enumerate(record.history):
            w.writerow([i, f"{r:.17g}"])
    if record.solution is not None:
        write_field(record.solution, record.grid, out / "solution.field")
    manifest = {
        "spec": record.spec.to_dict(),
        "counts": record.counts,
        "converged": record.converged,
        "iterations": len(record.history) - 1,
        "unknowns": record.unknowns,
        "trace_size": record.trace_size,
        "long_running": record.long_running,
        "build_time": record.build_time,
        "solve_time": record.solve_time,
        "ortho_defect": record.ortho_defect,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def write_field(u: ComplexArray, grid: Grid, path) -> None:
    """Column-major node dump, 're im' per line after an 'nx ny h' header."""
    with open(path, "w") as fh:
        fh.write(f"{grid.nx} {grid.ny} {grid.h:.17g}\n")
        for v in np.asarray(u).ravel():
            fh.write(f"{v.real:.17g} {v.imag:.17g}\n")


def read_field(path):
    """Inverse of write_field: returns (nx, ny, h, values)."""
    with open(path) as fh:
        first = fh.readline().split()
        nx, ny, h = int(first[0]), int(first[1]), float(first[2])
        vals = np.array([complex(float(a), float(b))
                         for a, b in (line.split() for line in fh if line.strip())])
    return nx, ny, h, vals.reshape(nx + 1, ny + 1)


def run(spec: ProblemSpec) -> RunRecord:
    """Build, solve, and (when spec.out_dir is set) dump one configuration."""
    ctx = BenchContext(spec)
    record = ctx.solve(spec)
    if spec.out_dir is not None:
        write_outputs(record, spec.out_dir)
    return record


def run_methods(spec: ProblemSpec, preconditioners=PRECONDITIONERS) -> dict:
    """One record per preconditioner, sharing the factored strips."""
    ctx = BenchContext(spec)
    records = {}
    for p in preconditioners:
        records[p] = ctx.solve(dataclasses.replace(spec, preconditioner=p,
                                                   out_dir=None))
    return records


def sweep_study(spec: ProblemSpec, vary: str, values,
                preconditioners=None, out_dir=None):
    """Re-run spec across subdomain counts or overlaps; tabulate counts.

    Returns (records, rows) where rows are the CSV table lines: one row
    per value, one count column per (preconditioner, tolerance) pair.
    """
    if vary not in ("subdomains", "overlap"):
        raise ValueError(f"vary must be 'subdomains' or 'overlap', got {vary!r}")
    values = list(values)
    if not values:
        raise ValueError("need at least one value to sweep")
    preconds = list(preconditioners or [spec.preconditioner])
    header = [vary] + [f"{p}_tol{t:g}" for p in preconds
                       for t in spec.tolerances]
    rows = [header]
    records = {}
    for v in values:
        key = "subdomains" if vary == "subdomains" else "overlap_cells"
        sub = dataclasses.replace(spec, **{key: int(v)}, out_dir=None)
        recs = run_methods(sub, preconds)
        records[v] = recs
        row = [v]
        for p in preconds:
            for t in spec.tolerances:
                row.append(recs[p].counts[f"{t:g}"])
        rows.append(row)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "table.csv", "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
    return records, rows
