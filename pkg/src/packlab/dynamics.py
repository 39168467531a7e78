"""Time stepping, steady-state solving, and solution diagnostics.

Time integration is IMEX: diffusion is treated with backward Euler (exact
tridiagonal or cosine-transform solves from `grids`), the kinetics explicitly.
Spatially constant equilibria of the kinetics are then exact fixed points of
the discrete step, which is what makes the long-horizon classification runs
trustworthy.  The explicit part is kept stable by capping dt at 0.5 over a
computed bound on the kinetic Jacobian norm at the current state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from . import model
from .grids import Field, Grid, implicit_diffusion_solver, laplacian_apply, laplacian_matrix
from .model import ModelParams

# Undershoots below this are counted as bound violations before clamping.
NEG_CLAMP_TOL = 1e-12
# Slack on the prey comparison bound u <= lam/mu when monitoring.
U_BOUND_SLACK = 1e-8

DEFAULT_DT = 0.2
DEFAULT_HORIZON = 500.0
DEFAULT_STEADY_TOL = 1e-9
DEFAULT_FLATNESS_TOL = 1e-5
FLATNESS_FLOOR = 1e-8


class BlowUpError(RuntimeError):
    """Raised when the state leaves the finite range; carries the last finite state."""

    def __init__(self, message: str, last_state: Field, step: int):
        super().__init__(message)
        self.last_state = last_state
        self.step = step


class NewtonNoConvergence(RuntimeError):
    """Newton failed; carries iteration diagnostics and the last iterate."""

    def __init__(self, message: str, iterations: int, residual: float, last: np.ndarray):
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")
        self.iterations = iterations
        self.residual = residual
        self.last = last


class SolutionLabel(str, enum.Enum):
    CONSTANT = "Constant"
    NONCONSTANT = "NonConstant"
    NO_CONVERGENCE = "NoConvergence"


@dataclass(frozen=True)
class Classification:
    label: SolutionLabel
    flatness: float


@dataclass
class EvolveReport:
    final: Field
    steps: int
    time: float
    converged: bool
    # rows (step, time, residual, max_u, sum_w_max)
    residual_history: list = field(default_factory=list)
    # entries (step, kind) with kind in {negative_clamp, u_bound, sum_w_cap}
    bound_violations: list = field(default_factory=list)
    dt: float = 0.0


def _check_field(p: ModelParams, s: Field) -> None:
    if s.data.shape[0] != p.N + 1:
        raise ValueError(
            f"field has {s.data.shape[0]} components, expected N+1 = {p.N + 1}"
        )
    if not np.isfinite(s.data).all():
        raise ValueError("field contains non-finite values")


def _diffusivities(p: ModelParams) -> np.ndarray:
    out = np.full(p.N + 1, p.d)
    out[p.N] = p.D
    return out


def residual_field(p: ModelParams, grid: Grid, data: np.ndarray) -> np.ndarray:
    """Steady-state defect d_i*Lap(a_i) + reaction_i(a), all components."""
    rates = model.reaction_terms(p, data[:-1], data[-1])
    diffs = _diffusivities(p).reshape((-1,) + (1,) * grid.dim)
    return diffs * laplacian_apply(grid, data) + rates


def residual_max(p: ModelParams, grid: Grid, s: Field) -> float:
    return float(np.abs(residual_field(p, grid, s.data)).max())


def _lipschitz_bound(p: ModelParams, data: np.ndarray) -> float:
    """Upper bound for the spectral radius of the kinetic Jacobian.

    Gershgorin row sums after rescaling the prey coordinate by
    s = sqrt(N*max(u)/max(w)); the rescaling balances the k*w prey column
    against the N-fold k*u prey row so the bound stays O(1) as N grows.
    """
    w, u = data[:-1], data[-1]
    S = w.sum(axis=0)
    wmax = float(w.max(initial=0.0))
    umax = float(u.max(initial=0.0))
    s = np.sqrt(p.N * max(umax, 1e-300) / max(wmax, 1e-300))
    s = min(max(s, 1e-150), 1e150)
    bracket = -p.omega + p.k * u - p.beta * (S - w)
    pred_rows = np.abs(bracket) + p.beta * (S - w) + p.k * w * s
    prey_row = p.N * p.k * u / s + np.abs(p.lam - 2.0 * p.mu * u - p.k * S)
    return float(max(pred_rows.max(), prey_row.max(), 1e-30))


class _StepWorkspace:
    """Caches implicit solvers per (dt, diffusivity)."""

    def __init__(self, p: ModelParams, grid: Grid):
        self.p = p
        self.grid = grid
        self._solvers: dict[float, tuple[Callable, Callable]] = {}

    def solvers(self, dt: float) -> tuple[Callable, Callable]:
        pair = self._solvers.get(dt)
        if pair is None:
            pair = (
                implicit_diffusion_solver(self.grid, dt * self.p.d),
                implicit_diffusion_solver(self.grid, dt * self.p.D),
            )
            self._solvers[dt] = pair
        return pair

    def step_raw(self, data: np.ndarray, dt: float) -> tuple[np.ndarray, float]:
        """One IMEX step without clamping; returns (new state, min value)."""
        solve_w, solve_u = self.solvers(dt)
        rates = model.reaction_terms(self.p, data[:-1], data[-1])
        stage = data + dt * rates
        new = np.empty_like(stage)
        new[:-1] = solve_w(stage[:-1])
        new[-1] = solve_u(stage[-1])
        return new, float(new.min())


def step_imex(p: ModelParams, grid: Grid, s: Field, dt: float) -> Field:
    """Advance one IMEX step: explicit kinetics, backward-Euler diffusion.

    Negative values are clamped to zero afterwards; undershoots beyond
    NEG_CLAMP_TOL indicate a dt above the stability cap.
    """
    model.require_valid(p)
    _check_field(p, s)
    if not (dt > 0 and np.isfinite(dt)):
        raise ValueError(f"dt must be positive and finite, got {dt!r}")
    new, _ = _StepWorkspace(p, grid).step_raw(s.data, dt)
    np.maximum(new, 0.0, out=new)
    return Field(grid, new)


def evolve(
    p: ModelParams,
    grid: Grid,
    s0: Field,
    T: float = DEFAULT_HORIZON,
    dt: float = DEFAULT_DT,
    steady_tol: float = DEFAULT_STEADY_TOL,
    sample_every: int = 10,
) -> EvolveReport:
    """March the parabolic system to time T or to a steady state.

    The residual (max-norm steady-state defect), max u and max sum_i w_i are
    sampled every `sample_every` steps.  The run stops early once the
    residual drops below `steady_tol` (pass 0 to disable).  dt is halved
    whenever it exceeds 0.5 over the current kinetic Lipschitz bound.
    Monitored bound violations are recorded, never fatal: prey above
    lam/mu*(1+1e-8), predator mass above 10x its initial max, or clamped
    undershoots below -1e-12.  Non-finite values raise BlowUpError with the
    last finite state attached.
    """
    model.require_valid(p)
    _check_field(p, s0)
    if not (dt > 0 and np.isfinite(dt)):
        raise ValueError(f"dt must be positive and finite, got {dt!r}")
    if T < 0 or not np.isfinite(T):
        raise ValueError(f"T must be finite and >= 0, got {T!r}")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")

    work = _StepWorkspace(p, grid)
    data = s0.data.copy()
    u_limit = p.lam / p.mu * (1.0 + U_BOUND_SLACK)
    sum_w0 = float(data[:-1].sum(axis=0).max())
    sum_w_cap = 10.0 * max(sum_w0, 1e-300)

    report = EvolveReport(final=Field(grid, data), steps=0, time=0.0, converged=False)

    def sample(step: int, t: float) -> float:
        res = float(np.abs(residual_field(p, grid, data)).max())
        max_u = float(data[-1].max())
        sum_w = float(data[:-1].sum(axis=0).max())
        report.residual_history.append((step, t, res, max_u, sum_w))
        if max_u > u_limit:
            report.bound_violations.append((step, "u_bound"))
        if sum_w > sum_w_cap:
            report.bound_violations.append((step, "sum_w_cap"))
        return res

    dt_cur = dt
    t = 0.0
    step = 0
    converged = sample(0, 0.0) < steady_tol
    while not converged and t < T:
        if step % sample_every == 0:
            lip = _lipschitz_bound(p, data)
            while dt_cur * lip > 0.5:
                dt_cur *= 0.5
                if dt_cur < dt * 2.0**-60:
                    raise BlowUpError(
                        "kinetic bound exploded; dt underflow", Field(grid, data.copy()), step
                    )
        new, low = work.step_raw(data, dt_cur)
        if not np.isfinite(new).all():
            raise BlowUpError("non-finite state", Field(grid, data.copy()), step)
        step += 1
        t += dt_cur
        if low < -NEG_CLAMP_TOL:
            report.bound_violations.append((step, "negative_clamp"))
        np.maximum(new, 0.0, out=new)
        data = new
        if step % sample_every == 0 or t >= T:
            converged = sample(step, t) < steady_tol

    report.final = Field(grid, data)
    report.steps = step
    report.time = t
    report.converged = bool(converged)
    report.dt = dt_cur
    return report


def classify_solution(
    s: Field, flatness_tol: float = DEFAULT_FLATNESS_TOL, converged: bool = True
) -> Classification:
    """Label a state Constant / NonConstant by per-component flatness.

    Flatness of a component is (max - min) / max(|mean|, 1e-8); the state's
    flatness is the worst component.  A state only counts as Constant when
    the run that produced it converged; otherwise the label is NoConvergence.
    """
    if flatness_tol <= 0:
        raise ValueError("flatness_tol must be positive")
    comps = s.data.reshape(s.data.shape[0], -1)
    spread = comps.max(axis=1) - comps.min(axis=1)
    scale = np.maximum(np.abs(comps.mean(axis=1)), FLATNESS_FLOOR)
    flatness = float((spread / scale).max())
    if not converged:
        return Classification(SolutionLabel.NO_CONVERGENCE, flatness)
    label = SolutionLabel.CONSTANT if flatness < flatness_tol else SolutionLabel.NONCONSTANT
    return Classification(label, flatness)


# ---------------------------------------------------------------------------
# Newton solvers


def _newton(
    F: Callable[[np.ndarray], np.ndarray],
    assemble_jacobian: Callable[[np.ndarray], scipy.sparse.spmatrix],
    x0: np.ndarray,
    tol: float,
    max_iters: int,
) -> np.ndarray:
    """Damped Newton on a flattened system; max-norm residual target."""
    x = x0.copy()
    r = F(x)
    rn = float(np.abs(r).max())
    for it in range(max_iters):
        if rn < tol:
            return x
        J = assemble_jacobian(x).tocsc()
        dx = scipy.sparse.linalg.spsolve(J, -r)
        if not np.isfinite(dx).all():
            raise NewtonNoConvergence("singular Jacobian", it, rn, x)
        lam = 1.0
        for _ in range(31):
            x_try = x + lam * dx
            r_try = F(x_try)
            rn_try = float(np.abs(r_try).max())
            if np.isfinite(rn_try) and rn_try < rn:
                x, r, rn = x_try, r_try, rn_try
                break
            lam *= 0.5
        else:
            raise NewtonNoConvergence("line search stalled", it, rn, x)
    if rn < tol:
        return x
    raise NewtonNoConvergence("iteration cap reached", max_iters, rn, x)


def newton_steady(
    p: ModelParams,
    grid: Grid,
    guess: Field,
    tol: float = DEFAULT_STEADY_TOL,
    max_iters: int = 50,
) -> Field:
    """Solve the steady system d_i*Lap(a_i) + reaction_i(a) = 0 by Newton.

    The Jacobian couples the pointwise kinetic derivative with the assembled
    sparse Laplacian; steps use a halving line search on the max-norm
    residual.  Raises NewtonNoConvergence with diagnostics on failure.
    """
    model.require_valid(p)
    _check_field(p, guess)
    L = laplacian_matrix(grid)
    n = grid.num_cells
    N = p.N
    diffs = _diffusivities(p)
    shape = (N + 1,) + grid.shape

    def F(x: np.ndarray) -> np.ndarray:
        return residual_field(p, grid, x.reshape(shape)).ravel()

    def assemble(x: np.ndarray) -> scipy.sparse.spmatrix:
        data = x.reshape(shape)
        P = model.reaction_jacobian(p, data[:-1], data[-1]).reshape(N + 1, N + 1, n)
        blocks = [[None] * (N + 1) for _ in range(N + 1)]
        for i in range(N + 1):
            for j in range(N + 1):
                diag = scipy.sparse.diags(P[i, j])
                blocks[i][j] = diag + diffs[i] * L if i == j else diag
        return scipy.sparse.bmat(blocks, format="csc")

    x = _newton(F, assemble, guess.data.ravel(), tol, max_iters)
    return Field(grid, x.reshape(shape))


def _reduced_diffusivities(p: ModelParams, diffusivities) -> tuple[float, float]:
    if diffusivities is None:
        return p.d, p.D
    a, b = diffusivities
    if a <= 0 or b <= 0:
        raise ValueError(f"diffusivities must be positive, got {diffusivities!r}")
    return float(a), float(b)


def reduced_residual_field(
    p: ModelParams, grid: Grid, data: np.ndarray, beta_eff: float, diffusivities=None
) -> np.ndarray:
    """Steady defect of the two-component reduced system on (H, u) data."""
    dH, du = _reduced_diffusivities(p, diffusivities)
    rates = model.reduced_reaction_terms(p, data[0], data[1], beta_eff)
    lap = laplacian_apply(grid, data)
    lap[0] *= dH
    lap[1] *= du
    return lap + rates


def reduced_newton_steady(
    p: ModelParams,
    grid: Grid,
    beta_eff: float,
    guess: Field,
    diffusivities=None,
    tol: float = DEFAULT_STEADY_TOL,
    max_iters: int = 50,
) -> Field:
    """Newton solver for the reduced (H, u) system.

    `diffusivities` picks which coefficient diffuses which component, as
    (diff_H, diff_u); the default pairs d with the predator aggregate H and
    D with the prey, matching the full system's convention.
    """
    model.require_valid(p)
    if guess.data.shape[0] != 2:
        raise ValueError("reduced guess needs exactly 2 components (H, u)")
    if beta_eff < 0:
        raise ValueError(f"beta_eff must be >= 0, got {beta_eff!r}")
    dH, du = _reduced_diffusivities(p, diffusivities)
    L = laplacian_matrix(grid)
    shape = (2,) + grid.shape

    def F(x: np.ndarray) -> np.ndarray:
        return reduced_residual_field(p, grid, x.reshape(shape), beta_eff, (dH, du)).ravel()

    def assemble(x: np.ndarray) -> scipy.sparse.spmatrix:
        H, u = x.reshape(shape)
        H, u = H.ravel(), u.ravel()
        j_hh = -p.omega + p.k * u - 2.0 * beta_eff * H
        j_hu = p.k * H
        j_uh = -p.k * u
        j_uu = p.lam - 2.0 * p.mu * u - p.k * H
        return scipy.sparse.bmat(
            [
                [dH * L + scipy.sparse.diags(j_hh), scipy.sparse.diags(j_hu)],
                [scipy.sparse.diags(j_uh), du * L + scipy.sparse.diags(j_uu)],
            ],
            format="csc",
        )

    x = _newton(F, assemble, guess.data.ravel(), tol, max_iters)
    return Field(grid, x.reshape(shape))


# ---------------------------------------------------------------------------
# Diagnostics


def _dirichlet_quotient(grid: Grid, a: np.ndarray) -> float:
    """Face quadrature of integral |grad a|^2 / a^2 with arithmetic face means."""
    total = 0.0
    for axis in range(-grid.dim, 0):
        h = grid.h[axis]
        da = np.diff(a, axis=axis) / h
        mid = 0.5 * (
            np.take(a, range(0, a.shape[axis] - 1), axis=axis)
            + np.take(a, range(1, a.shape[axis]), axis=axis)
        )
        total += float(np.sum((da / mid) ** 2)) * grid.cell_volume
    return total


def reduced_steady_identity(
    p: ModelParams,
    grid: Grid,
    s: Field,
    beta_eff: float,
    diffusivities=None,
) -> tuple[float, float]:
    """Integral identity diagnostic for reduced steady states.

    For a positive steady state (H, u) of the reduced system, testing the
    equations against (1 - H0/H, 1 - u0/u) with (H0, u0) the coexistence
    constants gives two expressions for the same quantity:

        I_reaction  = int beta_eff*(H - H0)^2 + mu*(u - u0)^2
        I_dirichlet = -H0 * diff_H * int |grad H|^2 / H^2
                      -u0 * diff_u * int |grad u|^2 / u^2

    Both discrete quadratures are returned; on an actual steady state the
    first is >= 0, the second <= 0, which pins both near zero and makes the
    pair a cheap consistency check on any solver output.  The diffusivity
    pairing is explicit and must match the system the state solves.
    """
    if s.data.shape[0] != 2:
        raise ValueError("reduced state needs exactly 2 components (H, u)")
    H, u = s.data[0], s.data[1]
    if not (H > 0).all() or not (u > 0).all():
        raise ValueError("identity requires strictly positive H and u")
    dH, du = _reduced_diffusivities(p, diffusivities)
    H0, u0 = model.reduced_constant_states(p, beta_eff)[2]
    i_reaction = grid.integrate(beta_eff * (H - H0) ** 2 + p.mu * (u - u0) ** 2)
    i_dirichlet = -H0 * dH * _dirichlet_quotient(grid, H) - u0 * du * _dirichlet_quotient(grid, u)
    return i_reaction, i_dirichlet


def ordering_rigidity_probe(s: Field, delta: float = 1e-6) -> list[tuple[int, int]]:
    """Search a state for strictly ordered distinct pack pairs.

    Returns ordered pairs (i, j) with w_i >= w_j + delta everywhere while
    w_j is not extinct (max > delta) and the packs differ (max gap > delta).
    For true steady states no such pair can exist: ordered packs are either
    identical or the lower one vanishes, so anything reported points at a
    non-steady or under-resolved state.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    w = s.w.reshape(s.w.shape[0], -1)
    diff = w[:, None, :] - w[None, :, :]
    gaps_min = diff.min(axis=2)
    gaps_max = diff.max(axis=2)
    alive = w.max(axis=1) > delta
    hits = (gaps_min >= delta) & alive[None, :] & (gaps_max > delta)
    np.fill_diagonal(hits, False)
    return [(int(i), int(j)) for i, j in np.argwhere(hits)]
