import numpy as np
import pytest

from packlab import (
    Field,
    ModelParams,
    NewtonNoConvergence,
    SolutionLabel,
    build_grid,
    classify_solution,
    constant_coexistence_state,
    eigen_perturbed_start,
    evolve,
    mode_block,
    neumann_eigenvalues,
    neumann_eigenvector,
    newton_steady,
    noise_start,
    ordering_rigidity_probe,
    reduced_constant_states,
    reduced_newton_steady,
    reduced_steady_identity,
    residual_max,
    step_imex,
)

from conftest import random_valid_params


def test_constant_states_are_fixed_points():
    """step_imex leaves every constant coexistence state unchanged."""
    rng = np.random.default_rng(71)
    g = build_grid(1, [1.0], [20])
    for _ in range(15):
        p = random_valid_params(rng, n_max=12)
        w, u, N = constant_coexistence_state(p)
        s = Field.from_constant(g, [w] * N + [u])
        out = step_imex(p, g, s, dt=0.2)
        assert np.abs(out.data - s.data).max() < 1e-14 * max(1.0, u)


def test_evolve_stable_single_pack_returns_flat(p0, grid100):
    p1 = ModelParams(d=0.5, D=1.0, omega=0.5, k=1.0, lam=1.0, mu=1.0, beta=1.0, N=1)
    rep = evolve(p1, grid100, eigen_perturbed_start(p1, grid100))
    assert rep.converged
    verdict = classify_solution(rep.final, converged=rep.converged)
    assert verdict.label is SolutionLabel.CONSTANT
    assert verdict.flatness < 1e-6
    # residual history rows are (step, time, residual, max_u, sum_w_max)
    steps, times, residuals, max_us, sums = zip(*rep.residual_history)
    assert residuals[-1] < 1e-9
    assert all(m <= p1.lam / p1.mu * (1 + 1e-8) for m in max_us)


def _fit_mode_rate(p, grid, start, project, steps=100, dt=1e-3):
    s = start
    times, amps = [], []
    for step in range(steps + 1):
        times.append(step * dt)
        amps.append(project(s))
        s = step_imex(p, grid, s, dt)
    return np.polyfit(times, np.log(np.abs(amps)), 1)[0]


def test_linear_regime_rates_match_mode_spectrum(p0, grid100):
    """Measured growth/decay of seeded eigenmodes tracks the closed-form rates."""
    w, u, N = constant_coexistence_state(p0)
    amp = 1e-6

    # flat difference mode grows at beta*w
    s = Field.from_constant(grid100, [w, w, u])
    s.data[0] += amp
    s.data[1] -= amp
    project = lambda f: grid100.integrate(f.data[0] - f.data[1])
    rate = _fit_mode_rate(p0, grid100, s, project)
    assert abs(rate - p0.beta * w) < 0.05 * p0.beta * w

    # first-cosine difference mode decays at beta*w - nu_1 * d (discrete nu)
    _, nu = neumann_eigenvalues(grid100, 1)
    vec = neumann_eigenvector(grid100, 1)
    s = Field.from_constant(grid100, [w, w, u])
    s.data[0] += amp * vec
    s.data[1] -= amp * vec
    project = lambda f: grid100.integrate((f.data[0] - f.data[1]) * vec)
    rate = _fit_mode_rate(p0, grid100, s, project)
    expect = p0.beta * w - nu * p0.d
    assert abs(rate - expect) < 0.05 * abs(expect)

    # prey-coupled real mode at nu_1, rate from the mode block itself
    B = mode_block(p0, nu)
    vals, vecs = np.linalg.eig(B)
    idx = int(np.argmin(vals.real))
    lam_i, v = float(vals[idx].real), vecs[:, idx].real
    s = Field.from_constant(grid100, [w, w, u])
    for c in range(3):
        s.data[c] += amp * v[c] * vec
    base = np.array([w, w, u])
    project = lambda f: sum(
        grid100.integrate((f.data[c] - base[c]) * vec) * v[c] for c in range(3)
    )
    rate = _fit_mode_rate(p0, grid100, s, project)
    assert abs(rate - lam_i) < 0.05 * abs(lam_i)


def test_bounds_hold_along_noise_trajectories(p0, grid100):
    rng = np.random.default_rng(83)
    s0 = noise_start(p0, grid100, rng, amplitude=1e-2)
    rep = evolve(p0, grid100, s0, T=20.0, steady_tol=0.0)
    kinds = {kind for _, kind in rep.bound_violations}
    assert "u_bound" not in kinds
    assert "negative_clamp" not in kinds
    assert np.isfinite(rep.final.data).all()
    assert rep.final.data.min() >= 0.0


def test_evolve_rejects_mismatched_field(p0, grid100):
    s = Field.from_constant(grid100, [0.1, 0.6])  # one pack only
    with pytest.raises(ValueError):
        evolve(p0, grid100, s, T=1.0)


def test_classify_solution_labels(grid100):
    flat = Field.from_constant(grid100, [0.2, 0.2, 0.5])
    c = classify_solution(flat)
    assert c.label is SolutionLabel.CONSTANT and c.flatness < 1e-14

    bumpy = flat.copy()
    bumpy.data[0] *= 1.0 + 0.01 * np.cos(np.pi * grid100.coordinates(0))
    assert classify_solution(bumpy).label is SolutionLabel.NONCONSTANT

    assert classify_solution(flat, converged=False).label is SolutionLabel.NO_CONVERGENCE

    # extinct component: flatness floor avoids 0/0
    extinct = Field.from_constant(grid100, [0.0, 0.2, 0.5])
    assert classify_solution(extinct).label is SolutionLabel.CONSTANT


def test_newton_steady_recovers_constant(p0, grid100):
    guess = eigen_perturbed_start(p0, grid100, amplitude=1e-2)
    sol = newton_steady(p0, grid100, guess, tol=1e-11)
    assert residual_max(p0, grid100, sol) < 1e-11
    w, u, N = constant_coexistence_state(p0)
    assert np.abs(sol.w - w).max() < 1e-9
    assert np.abs(sol.u - u).max() < 1e-9


def test_newton_reports_no_convergence(p0):
    g = build_grid(1, [1.0], [16])
    guess = eigen_perturbed_start(p0, g, amplitude=1e-2)
    with pytest.raises(NewtonNoConvergence) as err:
        newton_steady(p0, g, guess, tol=0.0, max_iters=4)
    assert err.value.iterations <= 4
    assert err.value.residual >= 0.0


def test_reduced_newton_and_identity(p0, grid100):
    for beta_eff in (0.0, 0.5, 3.0):
        coexist = reduced_constant_states(p0, beta_eff)[2]
        x = grid100.coordinates(0)
        guess = Field(
            grid=grid100,
            data=np.stack(
                [
                    coexist.H * (1.0 + 0.3 * np.cos(np.pi * x)),
                    coexist.u * (1.0 - 0.2 * np.cos(np.pi * x)),
                ]
            ),
        )
        sol = reduced_newton_steady(p0, grid100, beta_eff, guess, tol=1e-12)
        i_reaction, i_dirichlet = reduced_steady_identity(p0, grid100, sol, beta_eff)
        assert i_reaction >= 0.0
        assert i_dirichlet <= 0.0
        assert abs(i_reaction - i_dirichlet) < 1e-12


def test_identity_requires_positive_state(p0, grid100):
    bad = Field.from_constant(grid100, [0.0, 0.5])
    with pytest.raises(ValueError):
        reduced_steady_identity(p0, grid100, bad, 1.0)


def test_identity_diffusivity_pairing(p0, grid100):
    """Swapping which coefficient diffuses H vs u changes only I_dirichlet."""
    x = grid100.coordinates(0)
    data = np.stack(
        [0.4 + 0.05 * np.cos(np.pi * x), 0.6 + 0.02 * np.cos(2 * np.pi * x)]
    )
    s = Field(grid=grid100, data=data)
    ir_a, id_a = reduced_steady_identity(p0, grid100, s, 1.0)
    ir_b, id_b = reduced_steady_identity(
        p0, grid100, s, 1.0, diffusivities=(p0.D, p0.d)
    )
    assert ir_a == ir_b
    assert id_a != id_b


def test_ordering_rigidity_probe(grid100):
    x = grid100.coordinates(0)
    wiggle = 0.01 * np.cos(np.pi * x)
    clean = Field.from_constant(grid100, [0.3, 0.3, 0.5])
    assert ordering_rigidity_probe(clean) == []

    ordered = Field(
        grid=grid100,
        data=np.stack([0.4 + wiggle, 0.2 + wiggle, np.full_like(x, 0.5)]),
    )
    assert (0, 1) in ordering_rigidity_probe(ordered)

    # strict ordering above an extinct pack is legitimate, not a rigidity breach
    extinct = Field(
        grid=grid100,
        data=np.stack([0.4 + wiggle, np.zeros_like(x), np.full_like(x, 0.5)]),
    )
    assert ordering_rigidity_probe(extinct) == []
