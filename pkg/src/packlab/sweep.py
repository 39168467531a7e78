"""Parameter-plane sweeps over (beta, N) with steady-state classification.

Each cell of the plane re-runs the parabolic solver from several perturbed
starts and labels the reached states Constant / NonConstant (or NoConvergence
when a run exhausts its horizon).  The empirical thresholds read off the
resulting table are exploratory summaries of where constancy stops being
observed; they are grid readouts, not certified bounds.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import dynamics, model
from .dynamics import Classification, SolutionLabel
from .grids import Field, Grid
from .model import ModelParams
from .seeding import derive_seed

DEFAULT_BETA_GRID = (0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0)
DEFAULT_N_GRID = (1, 2, 3, 4, 5, 6, 7, 8, 16, 32, 64)
PERTURB_AMPLITUDE = 1e-3

CSV_HEADER = "beta,N,label,flatness,runs,runtime_s"


@dataclass(frozen=True)
class SweepProtocol:
    """Per-run settings shared by every cell of a sweep."""

    runs: int = 3
    horizon: float = dynamics.DEFAULT_HORIZON
    dt: float = dynamics.DEFAULT_DT
    steady_tol: float = dynamics.DEFAULT_STEADY_TOL
    flatness_tol: float = dynamics.DEFAULT_FLATNESS_TOL
    amplitude: float = PERTURB_AMPLITUDE
    sample_every: int = 10


@dataclass(frozen=True)
class SweepCell:
    beta: float
    N: int
    classification: Classification
    runs: int
    seeds: tuple[int, ...]
    # total simulated model time across the cell's runs; wall time would
    # break byte-identical reruns of the CSV
    runtime: float


@dataclass(frozen=True)
class SweepResult:
    beta_grid: tuple[float, ...]
    N_grid: tuple[int, ...]
    cells: tuple[SweepCell, ...]

    def cell(self, beta: float, N: int) -> SweepCell:
        for c in self.cells:
            if c.beta == beta and c.N == N:
                return c
        raise KeyError(f"no cell at beta={beta!r}, N={N!r}")

    def label_table(self) -> dict[tuple[float, int], SolutionLabel]:
        return {(c.beta, c.N): c.classification.label for c in self.cells}

    def frontier(self) -> dict[int, Optional[float]]:
        """Per N, the smallest beta classified NonConstant (None if absent)."""
        out: dict[int, Optional[float]] = {}
        for N in self.N_grid:
            hits = [
                c.beta
                for c in self.cells
                if c.N == N and c.classification.label is SolutionLabel.NONCONSTANT
            ]
            out[N] = min(hits) if hits else None
        return out


class ThresholdEstimate(NamedTuple):
    beta_bar: Optional[float]
    beta_status: str  # estimated | unbounded_in_range | not_found
    n_bar: Optional[int]
    n_status: str


def eigen_perturbed_start(p: ModelParams, grid: Grid, amplitude: float = PERTURB_AMPLITUDE) -> Field:
    """Constant state nudged along the most unstable kinetic direction.

    For N >= 2 this is the spatially uniform pack difference
    (1, -1, 0, ...)/sqrt(2); the N = 1 state has no unstable direction, so a
    first-axis cosine perturbation (opposite signs on w and u) stands in.
    """
    w, u, N = model.constant_coexistence_state(p)
    s = Field.from_constant(grid, [w] * N + [u])
    if N >= 2:
        bump = amplitude / np.sqrt(2.0)
        s.data[0] *= 1.0 + bump
        s.data[1] *= 1.0 - bump
    else:
        x = grid.coordinates(0) / grid.lengths[0]
        cosine = np.cos(np.pi * x).reshape((-1,) + (1,) * (grid.dim - 1))
        s.data[0] *= 1.0 + amplitude * cosine
        s.data[1] *= 1.0 - amplitude * cosine
    return s


def noise_start(
    p: ModelParams, grid: Grid, rng: np.random.Generator, amplitude: float = PERTURB_AMPLITUDE
) -> Field:
    """Constant state with uniform relative noise, prey clipped to [0, lam/mu]."""
    w, u, N = model.constant_coexistence_state(p)
    s = Field.from_constant(grid, [w] * N + [u])
    noise = rng.uniform(-1.0, 1.0, size=s.data.shape)
    s.data *= 1.0 + amplitude * noise
    np.clip(s.data[-1], 0.0, p.lam / p.mu, out=s.data[-1])
    np.maximum(s.data, 0.0, out=s.data)
    return s


def _run_cell(
    base: ModelParams,
    grid: Grid,
    beta: float,
    N: int,
    protocol: SweepProtocol,
    seed: int,
    bi: int,
    ni: int,
    sink: Optional[list] = None,
) -> SweepCell:
    p = model.require_valid(dataclasses.replace(base, beta=beta, N=N))
    seeds = tuple(derive_seed(seed, "sweep", bi, ni, run) for run in range(protocol.runs))
    labels = []
    flatness = 0.0
    runtime = 0.0
    for run in range(protocol.runs):
        if run == 0:
            start = eigen_perturbed_start(p, grid, protocol.amplitude)
        else:
            rng = np.random.default_rng(seeds[run])
            start = noise_start(p, grid, rng, protocol.amplitude)
        report = dynamics.evolve(
            p,
            grid,
            start,
            T=protocol.horizon,
            dt=protocol.dt,
            steady_tol=protocol.steady_tol,
            sample_every=protocol.sample_every,
        )
        verdict = dynamics.classify_solution(report.final, protocol.flatness_tol, report.converged)
        labels.append(verdict.label)
        flatness = max(flatness, verdict.flatness)
        runtime += report.time
        if sink is not None:
            sink.append((beta, N, run, report))
    if SolutionLabel.NONCONSTANT in labels:
        label = SolutionLabel.NONCONSTANT
    elif all(lbl is SolutionLabel.CONSTANT for lbl in labels):
        label = SolutionLabel.CONSTANT
    else:
        label = SolutionLabel.NO_CONVERGENCE
    return SweepCell(
        beta=beta,
        N=N,
        classification=Classification(label, flatness),
        runs=protocol.runs,
        seeds=seeds,
        runtime=runtime,
    )


def run_sweep(
    base: ModelParams,
    grid: Grid,
    beta_grid=DEFAULT_BETA_GRID,
    N_grid=DEFAULT_N_GRID,
    protocol: Optional[SweepProtocol] = None,
    seed: int = 0,
    workers: int = 1,
    report_sink: Optional[list] = None,
) -> SweepResult:
    """Classify every (beta, N) cell of the plane.

    Cells are independent: their seeds derive from (master seed, beta index,
    N index, run index) only, so serial and concurrent evaluation produce
    identical results, as do reruns with the same (config, seed).  Cell
    failures to converge become NoConvergence labels, never exceptions.
    With `report_sink` a list, every `EvolveReport` is appended as
    (beta, N, run, report) in deterministic cell order.
    """
    protocol = protocol or SweepProtocol()
    beta_grid = tuple(float(b) for b in beta_grid)
    N_grid = tuple(int(n) for n in N_grid)
    if len(set(beta_grid)) != len(beta_grid) or len(set(N_grid)) != len(N_grid):
        raise ValueError("beta_grid and N_grid entries must be unique")
    jobs = [
        (bi, ni, beta, N)
        for bi, beta in enumerate(beta_grid)
        for ni, N in enumerate(N_grid)
    ]
    sinks: dict[tuple[int, int], list] = {(bi, ni): [] for bi, ni, _, _ in jobs}

    def work(job) -> tuple[tuple[int, int], SweepCell]:
        bi, ni, beta, N = job
        cell_sink = sinks[(bi, ni)] if report_sink is not None else None
        return (bi, ni), _run_cell(base, grid, beta, N, protocol, seed, bi, ni, cell_sink)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = dict(pool.map(work, jobs))
    else:
        done = dict(map(work, jobs))
    ordered = [done[(bi, ni)] for bi, ni, _, _ in jobs]
    if report_sink is not None:
        for bi, ni, _, _ in jobs:
            report_sink.extend(sinks[(bi, ni)])
    return SweepResult(beta_grid=beta_grid, N_grid=N_grid, cells=tuple(ordered))


def to_csv(result: SweepResult) -> str:
    """Render the cell table; fixed formats keep equal-seed reruns byte-identical."""
    lines = [CSV_HEADER]
    for c in result.cells:
        lines.append(
            f"{c.beta:.10g},{c.N},{c.classification.label.value},"
            f"{c.classification.flatness:.6e},{c.runs},{c.runtime:.10g}"
        )
    return "\n".join(lines) + "\n"


def estimate_thresholds(result: SweepResult) -> ThresholdEstimate:
    """Read empirical constancy thresholds off the table (direct scan).

    beta_bar: largest beta whose column shows no NonConstant cell (and at
    least one Constant); n_bar: smallest N with such a row.  A table without
    any NonConstant cell leaves the frontier unidentified: both values come
    back None with status "unbounded_in_range".  NoConvergence cells carry
    no evidence either way and are skipped.
    """
    table = result.label_table()
    if not any(lbl is SolutionLabel.NONCONSTANT for lbl in table.values()):
        return ThresholdEstimate(None, "unbounded_in_range", None, "unbounded_in_range")

    def column_ok(beta: float) -> bool:
        labels = [table[(beta, N)] for N in result.N_grid]
        return SolutionLabel.NONCONSTANT not in labels and SolutionLabel.CONSTANT in labels

    def row_ok(N: int) -> bool:
        labels = [table[(beta, N)] for beta in result.beta_grid]
        return SolutionLabel.NONCONSTANT not in labels and SolutionLabel.CONSTANT in labels

    beta_ok = [b for b in result.beta_grid if column_ok(b)]
    n_ok = [n for n in result.N_grid if row_ok(n)]
    beta_bar, beta_status = (max(beta_ok), "estimated") if beta_ok else (None, "not_found")
    n_bar, n_status = (min(n_ok), "estimated") if n_ok else (None, "not_found")
    return ThresholdEstimate(beta_bar, beta_status, n_bar, n_status)


def monotonicity_anomalies(result: SweepResult) -> list[str]:
    """Constant cells sitting above a NonConstant cell in beta at the same N.

    Larger competition should not restore constancy; anomalies are reported
    for inspection (refinement candidates), not asserted away.
    """
    table = result.label_table()
    out = []
    for N in result.N_grid:
        frontier = result.frontier()[N]
        if frontier is None:
            continue
        for beta in result.beta_grid:
            if beta > frontier and table[(beta, N)] is SolutionLabel.CONSTANT:
                out.append(
                    f"Constant at (beta={beta:g}, N={N}) above NonConstant frontier beta={frontier:g}"
                )
    return out


_SVG_COLORS = {
    SolutionLabel.CONSTANT: "#4878b0",
    SolutionLabel.NONCONSTANT: "#d9622b",
    SolutionLabel.NO_CONVERGENCE: "#9d9d9d",
}


def write_heatmap_svg(result: SweepResult, path: str) -> None:
    """Label heatmap over the (beta, N) plane: beta rightwards, N upwards."""
    cw, ch, margin = 54, 26, 70
    nb, nn = len(result.beta_grid), len(result.N_grid)
    width = margin + nb * cw + 20
    height = margin + nn * ch + 60
    table = result.label_table()
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for bi, beta in enumerate(result.beta_grid):
        for ni, N in enumerate(result.N_grid):
            x = margin + bi * cw
            y = margin + (nn - 1 - ni) * ch
            color = _SVG_COLORS[table[(beta, N)]]
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cw - 2}" height="{ch - 2}" fill="{color}"/>'
            )
    for bi, beta in enumerate(result.beta_grid):
        x = margin + bi * cw + cw // 2
        parts.append(
            f'<text x="{x}" y="{margin + nn * ch + 16}" font-size="11" text-anchor="middle">{beta:g}</text>'
        )
    for ni, N in enumerate(result.N_grid):
        y = margin + (nn - 1 - ni) * ch + ch // 2 + 4
        parts.append(f'<text x="{margin - 8}" y="{y}" font-size="11" text-anchor="end">{N}</text>')
    parts.append(
        f'<text x="{margin + nb * cw // 2}" y="{margin + nn * ch + 40}" font-size="13" text-anchor="middle">beta</text>'
    )
    parts.append(
        f'<text x="18" y="{margin + nn * ch // 2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {margin + nn * ch // 2})">N</text>'
    )
    legend_y = 20
    legend_x = margin
    for label, color in _SVG_COLORS.items():
        parts.append(f'<rect x="{legend_x}" y="{legend_y}" width="14" height="14" fill="{color}"/>')
        parts.append(
            f'<text x="{legend_x + 18}" y="{legend_y + 11}" font-size="11">{label.value}</text>'
        )
        legend_x += 140
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
