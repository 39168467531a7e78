"""Reaction terms and closed-form constant states of the pack competition model.

The model couples one prey density u with N predator pack densities
w_1, ..., w_N on a box with no-flux boundaries:

    -d  Lap(w_i) = (-omega + k*u - beta * sum_{j != i} w_j) * w_i
    -D  Lap(u)   = (lambda - mu*u - k * sum_i w_i) * u

All packs share the same parameters; beta >= 0 is the strength of
competition between distinct packs.  Predators cannot persist on their
own (they decay at rate omega without prey), and coexistence requires
lambda*k > mu*omega.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Validation refuses pack counts above this; everything downstream is
# O(N) per grid node, but arrays of 1e6+ packs stop being meaningful.
N_MAX = 10**6


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of the system.

    Attributes
    ----------
    d : float
        Predator diffusivity (same for every pack).
    D : float
        Prey diffusivity.
    omega : float
        Predator death rate.
    k : float
        Predation / conversion rate.
    lam : float
        Prey intrinsic growth rate (the config key is ``lambda``).
    mu : float
        Prey self-limitation rate.
    beta : float
        Competition rate between distinct packs.
    N : int
        Number of predator packs.
    """

    d: float
    D: float
    omega: float
    k: float
    lam: float
    mu: float
    beta: float
    N: int


class ConstantState(NamedTuple):
    """Spatially constant coexistence state: every pack at w, prey at u."""

    w: float
    u: float
    N: int


class ReducedState(NamedTuple):
    """Constant state (H, u) of the two-component reduced system."""

    H: float
    u: float


class PopulationComparison(NamedTuple):
    """Total predator mass of the N-pack state vs. the single-pack state."""

    total_n: float
    total_one: float
    ratio: float


def validate_params(p: ModelParams) -> list[str]:
    """Check parameter invariants; return a list of violation messages.

    An empty list means the parameters are admissible.  Checks: all rates
    positive, beta >= 0, integer 1 <= N <= N_MAX, and the coexistence
    condition lambda*k > mu*omega.
    """
    errors = []
    for name in ("d", "D", "omega", "k", "lam", "mu"):
        value = getattr(p, name)
        if not np.isfinite(value) or value <= 0:
            errors.append(f"{name} must be a positive finite number, got {value!r}")
    if not np.isfinite(p.beta) or p.beta < 0:
        errors.append(f"beta must be >= 0, got {p.beta!r}")
    if not isinstance(p.N, (int, np.integer)):
        errors.append(f"N must be an integer, got {p.N!r}")
    else:
        if p.N < 1:
            errors.append(f"N must be >= 1, got {p.N}")
        if p.N > N_MAX:
            errors.append(f"N must be <= {N_MAX}, got {p.N}")
    if not errors and not p.lam * p.k > p.mu * p.omega:
        errors.append(
            "coexistence requires lambda*k > mu*omega "
            f"(lambda*k = {p.lam * p.k!r}, mu*omega = {p.mu * p.omega!r})"
        )
    return errors


def require_valid(p: ModelParams) -> ModelParams:
    """Raise ValueError on the first invalid parameter set; return p unchanged."""
    errors = validate_params(p)
    if errors:
        raise ValueError("invalid model parameters: " + "; ".join(errors))
    return p


def reaction_terms(p: ModelParams, w, u) -> np.ndarray:
    """Evaluate the kinetic right-hand side at a state.

    Parameters
    ----------
    p : ModelParams
    w : array_like
        Pack densities, shape (N,) or (N, ...) for a field of states.
    u : array_like
        Prey density, scalar or matching the trailing shape of ``w``.

    Returns
    -------
    ndarray of shape (N+1, ...): the N pack rates followed by the prey rate.
    """
    w = np.asarray(w, dtype=float)
    u = np.asarray(u, dtype=float)
    if w.shape[:1] != (p.N,):
        raise ValueError(f"w must have leading dimension N={p.N}, got shape {w.shape}")
    S = w.sum(axis=0)
    # sum_{j != i} w_j == S - w_i; keeps the whole evaluation O(N).
    fw = (-p.omega + p.k * u - p.beta * (S - w)) * w
    gu = (p.lam - p.mu * u - p.k * S) * u
    return np.concatenate([fw, gu[np.newaxis]], axis=0)


def reaction_jacobian(p: ModelParams, w, u) -> np.ndarray:
    """Jacobian of `reaction_terms` with respect to (w_1, ..., w_N, u).

    Accepts the same shapes as `reaction_terms`; the result has shape
    (N+1, N+1) for a point state and (N+1, N+1, ...) for a field, with
    the derivative taken pointwise at each node.
    """
    w = np.asarray(w, dtype=float)
    u = np.asarray(u, dtype=float)
    if w.shape[:1] != (p.N,):
        raise ValueError(f"w must have leading dimension N={p.N}, got shape {w.shape}")
    N = p.N
    S = w.sum(axis=0)
    tail = np.broadcast_shapes(w.shape[1:], u.shape)
    J = np.zeros((N + 1, N + 1) + tail, dtype=float)
    # d f_i / d w_m = -beta * w_i for m != i; the diagonal keeps only the
    # bracket because the -beta*(S - w_i) term loses its own w_i.
    J[:N, :N] = np.broadcast_to((-p.beta * w)[:, np.newaxis], (N, N) + tail).copy()
    diag = -p.omega + p.k * u - p.beta * (S - w)
    for i in range(N):
        J[i, i] = diag[i]
        J[i, N] = p.k * w[i]
        J[N, i] = -p.k * u
    J[N, N] = p.lam - 2.0 * p.mu * u - p.k * S
    return J


def constant_coexistence_state(p: ModelParams) -> ConstantState:
    """Closed-form positive constant solution with all packs equal.

    w = (lambda*k - mu*omega) / (mu*beta*(N-1) + N*k^2)
    u = (lambda*beta*(N-1) + omega*k*N) / (mu*beta*(N-1) + N*k^2)

    Requires valid parameters (in particular lambda*k > mu*omega, which
    makes w > 0).
    """
    require_valid(p)
    den = p.mu * p.beta * (p.N - 1) + p.N * p.k**2
    w = (p.lam * p.k - p.mu * p.omega) / den
    u = (p.lam * p.beta * (p.N - 1) + p.omega * p.k * p.N) / den
    return ConstantState(w=w, u=u, N=p.N)


def reduced_reaction_terms(p: ModelParams, H, u, beta_eff: float) -> np.ndarray:
    """Kinetics of the two-component reduced system.

    The reduced system tracks an aggregate predator density H against the
    prey u with a self-competition coefficient beta_eff:

        F = (-omega + k*u - beta_eff*H) * H
        G = (lambda - mu*u - k*H) * u
    """
    H = np.asarray(H, dtype=float)
    u = np.asarray(u, dtype=float)
    F = (-p.omega + p.k * u - beta_eff * H) * H
    G = (p.lam - p.mu * u - p.k * H) * u
    return np.stack([F, G], axis=0)


def reduced_constant_states(p: ModelParams, beta_eff: float) -> tuple[ReducedState, ReducedState, ReducedState]:
    """The three nonnegative constant states of the reduced system.

    Returns (extinction, prey-only, coexistence):

        (0, 0),  (0, lambda/mu),
        ((lambda*k - mu*omega) / (k^2 + mu*beta_eff),
         (omega*k + lambda*beta_eff) / (k^2 + mu*beta_eff))
    """
    require_valid(p)
    if beta_eff < 0:
        raise ValueError(f"beta_eff must be >= 0, got {beta_eff!r}")
    den = p.k**2 + p.mu * beta_eff
    H = (p.lam * p.k - p.mu * p.omega) / den
    u = (p.omega * p.k + p.lam * beta_eff) / den
    return (
        ReducedState(0.0, 0.0),
        ReducedState(0.0, p.lam / p.mu),
        ReducedState(H, u),
    )


def total_population(p: ModelParams, domain_volume: float = 1.0) -> PopulationComparison:
    """Aggregate predator mass of the N-pack constant state vs. one pack.

    total_n = N * w * volume for the N-pack state, total_one the same
    quantity for the single-pack model with identical rates.  Their ratio
    equals 1 when beta == 0 or N == 1 and drops below 1 otherwise: splitting
    a population into mutually hostile packs costs total biomass.
    """
    require_valid(p)
    if domain_volume <= 0:
        raise ValueError(f"domain_volume must be positive, got {domain_volume!r}")
    excess = p.lam * p.k - p.mu * p.omega
    total_n = excess * p.N / (p.mu * p.beta * (p.N - 1) + p.N * p.k**2) * domain_volume
    total_one = excess / p.k**2 * domain_volume
    return PopulationComparison(total_n, total_one, total_n / total_one)
