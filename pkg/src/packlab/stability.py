"""Linear stability of the constant coexistence state.

The linearization of the kinetics at the coexistence state has a closed-form
spectrum: a real eigenvalue beta*w of multiplicity N-1 carried by the
pack-difference directions, plus the two roots of a quadratic that always lie
in the left half plane.  For beta > 0 and N >= 2 the difference eigenvalue is
positive, so splitting into competing packs destabilizes the constant state no
matter how small the competition.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import model
from .model import ModelParams, constant_coexistence_state


class StabilityLabel(str, enum.Enum):
    STABLE_N1 = "StableN1"
    WEAKLY_STABLE_SIMPLEX = "WeaklyStableSimplex"
    STRONGLY_UNSTABLE = "StronglyUnstable"
    EXTINCTION_UNSTABLE = "ExtinctionUnstable"


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicities, as (eigenvalue, multiplicity) pairs."""

    entries: tuple[tuple[complex, int], ...]

    def eigenvalues(self) -> np.ndarray:
        """Expand multiplicities into a flat complex array."""
        out = []
        for value, mult in self.entries:
            out.extend([value] * mult)
        return np.array(out, dtype=complex)

    @property
    def dim(self) -> int:
        return sum(m for _, m in self.entries)


@dataclass(frozen=True)
class StabilityVerdict:
    label: StabilityLabel
    witness: Optional[np.ndarray] = None


def linearized_matrix(p: ModelParams) -> np.ndarray:
    """Kinetic Jacobian at the constant coexistence state, shape (N+1, N+1).

    Rows 0..N-1 are the packs, row N is the prey.  The pack block has zero
    diagonal and -beta*w off the diagonal; the prey column is k*w, the prey
    row is -k*u, and the corner is -mu*u.
    """
    w, u, N = constant_coexistence_state(p)
    A = np.full((N + 1, N + 1), -p.beta * w)
    np.fill_diagonal(A, 0.0)
    A[:N, N] = p.k * w
    A[N, :N] = -p.k * u
    A[N, N] = -p.mu * u
    return A


def _quadratic_roots(b: float, c: float) -> tuple[complex, complex]:
    """Roots of x^2 + b*x + c with a cancellation-safe real branch."""
    disc = b * b - 4.0 * c
    if disc < 0.0:
        root = complex(-0.5 * b, 0.5 * np.sqrt(-disc))
        return root, root.conjugate()
    # q and c/q avoid subtracting nearly equal numbers when b^2 >> 4c.
    q = -0.5 * (b + np.copysign(np.sqrt(disc), b))
    if q == 0.0:
        return complex(0.0), complex(0.0)
    return complex(q), complex(c / q)


def spectrum_closed_form(p: ModelParams) -> Spectrum:
    """Eigenvalues of `linearized_matrix` from the factored characteristic polynomial.

    det(A - g*I) = (beta*w - g)^(N-1) * (g^2 + b*g + c) with
    b = mu*u + (N-1)*beta*w and c = ((N-1)*beta*mu + N*k^2) * u * w.
    """
    w, u, N = constant_coexistence_state(p)
    b = p.mu * u + (N - 1) * p.beta * w
    c = ((N - 1) * p.beta * p.mu + N * p.k**2) * u * w
    lam1, lam2 = _quadratic_roots(b, c)
    entries = []
    if N >= 2:
        entries.append((complex(p.beta * w), N - 1))
    entries.append((lam1, 1))
    entries.append((lam2, 1))
    return Spectrum(entries=tuple(entries))


def spectrum_numeric(matrix: np.ndarray) -> np.ndarray:
    """Dense eigensolver route: eigenvalues of a general square matrix."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    return np.linalg.eigvals(matrix)


def classify_constant_stability(p: ModelParams) -> StabilityVerdict:
    """Stability trichotomy of the coexistence state.

    N == 1: linearly stable.  beta == 0, N >= 2: a neutral simplex of
    constant states (zero is an eigenvalue of multiplicity N-1).  beta > 0,
    N >= 2: strongly unstable; the witness is the normalized pack-difference
    direction (1, -1, 0, ..., 0)/sqrt(2), an eigenvector for beta*w > 0.
    """
    model.require_valid(p)
    if p.N == 1:
        return StabilityVerdict(StabilityLabel.STABLE_N1)
    if p.beta == 0.0:
        return StabilityVerdict(StabilityLabel.WEAKLY_STABLE_SIMPLEX)
    witness = np.zeros(p.N + 1)
    witness[0] = 1.0 / np.sqrt(2.0)
    witness[1] = -1.0 / np.sqrt(2.0)
    return StabilityVerdict(StabilityLabel.STRONGLY_UNSTABLE, witness=witness)


def classify_extinction_state(p: ModelParams, with_prey: bool) -> StabilityVerdict:
    """Verdict for the trivial constant states (all packs zero).

    with_prey False is total extinction (0, ..., 0, 0); True is the
    prey-only state (0, ..., 0, lambda/mu).  Both carry a positive kinetic
    eigenvalue whenever lambda*k > mu*omega, so both are unstable.
    """
    model.require_valid(p)
    w = np.zeros(p.N)
    u = p.lam / p.mu if with_prey else 0.0
    J = model.reaction_jacobian(p, w, u)
    growth = np.linalg.eigvals(J).real.max()
    if growth <= 0:
        raise AssertionError(
            f"trivial state unexpectedly stable (max Re = {growth!r}); "
            "parameters violate the coexistence condition?"
        )
    return StabilityVerdict(StabilityLabel.EXTINCTION_UNSTABLE)


def mode_block(p: ModelParams, nu: float) -> np.ndarray:
    """Linearized block for a single Neumann mode with eigenvalue nu >= 0.

    A_beta - nu * diag(d, ..., d, D).  Heuristic diagnostic: for nu > 0 it
    describes how diffusion shifts the kinetic spectrum mode by mode; the
    pack-difference eigenvalue becomes beta*w - nu*d, crossing zero at
    nu = beta*w/d.
    """
    if nu < 0:
        raise ValueError(f"nu must be >= 0, got {nu!r}")
    A = linearized_matrix(p)
    shift = np.full(p.N + 1, p.d)
    shift[p.N] = p.D
    return A - nu * np.diag(shift)


def mode_spectrum(p: ModelParams, nu: float) -> Spectrum:
    """Closed-form eigenvalues of `mode_block`.

    The difference eigenvalue shifts to beta*w - nu*d (multiplicity N-1);
    the symmetric 2x2 block contributes the roots of
    g^2 + b*g + c with b = mu*u + nu*D + (N-1)*beta*w + nu*d and
    c = ((N-1)*beta*w + nu*d) * (mu*u + nu*D) + N*k^2*u*w.
    """
    if nu < 0:
        raise ValueError(f"nu must be >= 0, got {nu!r}")
    w, u, N = constant_coexistence_state(p)
    a_diff = (N - 1) * p.beta * w + nu * p.d
    a_prey = p.mu * u + nu * p.D
    lam1, lam2 = _quadratic_roots(a_diff + a_prey, a_diff * a_prey + N * p.k**2 * u * w)
    entries = []
    if N >= 2:
        entries.append((complex(p.beta * w - nu * p.d), N - 1))
    entries.append((lam1, 1))
    entries.append((lam2, 1))
    return Spectrum(entries=tuple(entries))
