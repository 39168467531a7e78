"""Command-line front end.

Every run is driven by an INI config file (see config.py).  Subcommands:

    constant   print the constant coexistence state and its stability label
    spectrum   CSV spectrum (closed form + numeric) of the linearization
    evolve     time-march from a perturbed constant state, write snapshots
    steady     Newton-solve the steady system, write the state
    sweep      classify the (beta, N) plane, write sweep.csv (+ SVG heatmap)
    cover      ball-overlap pigeonhole bound on random point clouds
    identity   reduced-system integral identity at a Newton steady state

Exit codes: 0 on success, 1 when a solver fails to converge (evolve not
steady by the horizon, Newton breakdown, any NoConvergence sweep cell),
2 for configuration or usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np
import scipy

from . import config as cfg
from . import covering, dynamics, model, seeding, stability, sweep as sweep_mod
from .grids import Field, build_grid


def _fail(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _load(args) -> tuple[cfg.RunConfig, str]:
    raw = Path(args.config).read_text(encoding="utf-8")
    return cfg.parse_config(raw), raw


def _write_manifest(out_dir: Path, raw_config: str, seed: int) -> None:
    from . import __version__

    payload = {
        "config_sha256": hashlib.sha256(raw_config.encode("utf-8")).hexdigest(),
        "seed": seed,
        "versions": {
            "packlab": __version__,
            "python": "%d.%d.%d" % sys.version_info[:3],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def save_state(path, p: model.ModelParams, s: Field, time: float = 0.0) -> None:
    """JSON snapshot: grid geometry, parameters, and all component fields."""
    payload = {
        "grid": {
            "dim": s.grid.dim,
            "lengths": list(s.grid.lengths),
            "cells": list(s.grid.cells),
        },
        "params": {
            "d": p.d,
            "D": p.D,
            "omega": p.omega,
            "k": p.k,
            "lambda": p.lam,
            "mu": p.mu,
            "beta": p.beta,
            "N": p.N,
        },
        "time": time,
        "components": s.data.tolist(),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")


def load_state(path) -> tuple[model.ModelParams, Field, float]:
    """Inverse of save_state."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    raw = dict(payload["params"])
    raw["lam"] = raw.pop("lambda")
    p = model.ModelParams(**raw)
    g = payload["grid"]
    grid = build_grid(g["dim"], g["lengths"], g["cells"])
    data = np.asarray(payload["components"], dtype=float)
    return p, Field(grid=grid, data=data), float(payload["time"])


def _write_residuals(path, report: dynamics.EvolveReport) -> None:
    lines = ["step,time,residual,max_u,sum_w_max"]
    for step, time, residual, max_u, sum_w_max in report.residual_history:
        lines.append(f"{step},{time:.10g},{residual:.6e},{max_u:.10g},{sum_w_max:.10g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _out_dir(args, run: cfg.RunConfig) -> Path:
    out = Path(args.out) if args.out else Path(run.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_constant(args) -> int:
    run, _ = _load(args)
    w, u, N = model.constant_coexistence_state(run.params)
    verdict = stability.classify_constant_stability(run.params)
    rates = model.reaction_terms(run.params, np.full(N, w), np.asarray(u))
    print(f"w = {w!r}")
    print(f"u = {u!r}")
    print(f"N = {N}")
    print(f"residual = {float(np.abs(rates).max()):.6e}")
    print(f"label = {verdict.label.value}")
    return 0


def _spectrum_rows(spec: stability.Spectrum, source: str) -> list[str]:
    entries = sorted(spec.entries, key=lambda e: (e[0].real, e[0].imag))
    return [
        f"{val.real:.17g},{val.imag:.17g},{mult},{source}" for val, mult in entries
    ]


def _cmd_spectrum(args) -> int:
    run, _ = _load(args)
    p = run.params
    if args.nu is None:
        closed = stability.spectrum_closed_form(p)
        numeric = stability.spectrum_numeric(stability.linearized_matrix(p))
    else:
        if args.nu < 0:
            _fail("--nu must be >= 0")
            return 2
        closed = stability.mode_spectrum(p, args.nu)
        numeric = stability.spectrum_numeric(stability.mode_block(p, args.nu))
    print("re,im,multiplicity,source")
    for line in _spectrum_rows(closed, "closed"):
        print(line)
    numeric = sorted(numeric, key=lambda z: (z.real, z.imag))
    for val in numeric:
        print(f"{val.real:.17g},{val.imag:.17g},1,numeric")
    return 0


def _initial_state(run: cfg.RunConfig, kind: str) -> Field:
    if kind == "noise":
        rng = np.random.default_rng(seeding.derive_seed(run.solver.seed, "evolve", 0))
        return sweep_mod.noise_start(run.params, run.grid, rng, run.sweep.amplitude)
    return sweep_mod.eigen_perturbed_start(run.params, run.grid, run.sweep.amplitude)


def _cmd_evolve(args) -> int:
    run, raw = _load(args)
    out = _out_dir(args, run)
    s0 = _initial_state(run, args.start)
    try:
        report = dynamics.evolve(
            run.params,
            run.grid,
            s0,
            T=run.solver.T,
            dt=run.solver.dt,
            steady_tol=run.solver.steady_tol,
        )
    except dynamics.BlowUpError as exc:
        _fail(f"evolve blew up at step {exc.step}: {exc}")
        return 1
    verdict = dynamics.classify_solution(
        report.final, run.solver.flatness_tol, converged=report.converged
    )
    save_state(out / "state.json", run.params, report.final, report.time)
    _write_residuals(out / "residuals.csv", report)
    _write_manifest(out, raw, run.solver.seed)
    residual = report.residual_history[-1][2] if report.residual_history else float("nan")
    print(f"steps = {report.steps}")
    print(f"time = {report.time:.10g}")
    print(f"residual = {residual:.6e}")
    print(f"converged = {report.converged}")
    print(f"label = {verdict.label.value}")
    print(f"flatness = {verdict.flatness:.6e}")
    if not report.converged:
        _fail(f"no steady state reached by T = {run.solver.T:g}")
        return 1
    return 0


def _cmd_steady(args) -> int:
    run, raw = _load(args)
    out = _out_dir(args, run)
    guess = _initial_state(run, args.start)
    try:
        final = dynamics.newton_steady(
            run.params, run.grid, guess, tol=run.solver.steady_tol
        )
    except dynamics.NewtonNoConvergence as exc:
        _fail(f"Newton stalled after {exc.iterations} iterations (residual {exc.residual:.3e})")
        return 1
    verdict = dynamics.classify_solution(final, run.solver.flatness_tol)
    save_state(out / "state.json", run.params, final, 0.0)
    _write_manifest(out, raw, run.solver.seed)
    print(f"residual = {dynamics.residual_max(run.params, run.grid, final):.6e}")
    print(f"label = {verdict.label.value}")
    print(f"flatness = {verdict.flatness:.6e}")
    return 0


def _cmd_sweep(args) -> int:
    run, raw = _load(args)
    out = _out_dir(args, run)
    protocol = sweep_mod.SweepProtocol(
        runs=run.sweep.runs,
        horizon=run.solver.T,
        dt=run.solver.dt,
        steady_tol=run.solver.steady_tol,
        flatness_tol=run.solver.flatness_tol,
        amplitude=run.sweep.amplitude,
    )
    result = sweep_mod.run_sweep(
        run.params,
        run.grid,
        beta_grid=run.sweep.beta_grid,
        N_grid=run.sweep.N_grid,
        protocol=protocol,
        seed=run.solver.seed,
        workers=args.workers,
    )
    (out / "sweep.csv").write_text(sweep_mod.to_csv(result), encoding="utf-8")
    if args.svg:
        sweep_mod.write_heatmap_svg(result, out / "heatmap.svg")
    _write_manifest(out, raw, run.solver.seed)
    thresholds = sweep_mod.estimate_thresholds(result)
    print(f"beta_bar = {thresholds.beta_bar!r} ({thresholds.beta_status})")
    print(f"n_bar = {thresholds.n_bar!r} ({thresholds.n_status})")
    for note in sweep_mod.monotonicity_anomalies(result):
        print(f"anomaly: {note}")
    bad = sum(
        1
        for cell in result.cells
        if cell.classification.label is dynamics.SolutionLabel.NO_CONVERGENCE
    )
    if bad:
        _fail(f"{bad} cell(s) did not converge")
        return 1
    return 0


def _cmd_cover(args) -> int:
    if args.n < 1:
        _fail("--n must be >= 1")
        return 2
    if args.count < 2:
        _fail("--count must be >= 2")
        return 2
    if args.radius <= 0:
        _fail("--radius must be positive")
        return 2
    print("trial,m,bound,ok")
    failures = 0
    for trial in range(args.trials):
        rng = np.random.default_rng(seeding.derive_seed(args.seed, "cover", trial))
        cloud = covering.PointCloud(rng.uniform(0.0, 1.0, size=(args.count, args.n)))
        m, _ = covering.max_overlap(cloud, args.radius, sampler=args.sampler, seed=trial)
        bound = covering.covering_lower_bound(cloud.count, args.radius, cloud.diam, cloud.n)
        ok = m >= bound - 1e-12
        failures += not ok
        print(f"{trial},{m},{bound:.10g},{int(ok)}")
    if failures:
        _fail(f"{failures} trial(s) fell below the pigeonhole bound")
        return 1
    return 0


def _cmd_identity(args) -> int:
    run, _ = _load(args)
    p, grid = run.params, run.grid
    beta_eff = args.beta_eff if args.beta_eff is not None else p.beta * (p.N - 1) / p.N
    if beta_eff < 0:
        _fail("--beta-eff must be >= 0")
        return 2
    coexist = model.reduced_constant_states(p, beta_eff)[2]
    x = grid.coordinates(0) / grid.lengths[0]
    bump = np.cos(np.pi * x).reshape((-1,) + (1,) * (grid.dim - 1))
    guess = Field.from_constant(grid, [coexist.H, coexist.u])
    guess.data[0] *= 1.0 + 0.3 * bump
    guess.data[1] *= 1.0 - 0.2 * bump
    try:
        state = dynamics.reduced_newton_steady(
            p, grid, beta_eff, guess, tol=run.solver.steady_tol
        )
    except dynamics.NewtonNoConvergence as exc:
        _fail(f"Newton stalled after {exc.iterations} iterations (residual {exc.residual:.3e})")
        return 1
    i_reaction, i_dirichlet = dynamics.reduced_steady_identity(p, grid, state, beta_eff)
    print(f"beta_eff = {beta_eff!r}")
    print(f"H0 = {coexist.H!r}")
    print(f"u0 = {coexist.u!r}")
    print(f"I_reaction = {i_reaction:.6e}")
    print(f"I_dirichlet = {i_dirichlet:.6e}")
    print(f"mismatch = {i_reaction - i_dirichlet:.6e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="packlab",
        description="Numerical laboratory for N competing predator packs and one prey.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("-c", "--config", required=True, help="path to INI run config")
        return p

    with_config(sub.add_parser("constant", help="constant coexistence state")).set_defaults(
        func=_cmd_constant
    )

    p = with_config(sub.add_parser("spectrum", help="linearization spectrum as CSV"))
    p.add_argument("--nu", type=float, default=None, help="Laplacian eigenvalue for one spatial mode")
    p.set_defaults(func=_cmd_spectrum)

    p = with_config(sub.add_parser("evolve", help="time-march to a steady state"))
    p.add_argument("--out", default=None, help="output directory (default from config)")
    p.add_argument("--start", choices=("eigen", "noise"), default="eigen")
    p.set_defaults(func=_cmd_evolve)

    p = with_config(sub.add_parser("steady", help="Newton-solve the steady system"))
    p.add_argument("--out", default=None)
    p.add_argument("--start", choices=("eigen", "noise"), default="eigen")
    p.set_defaults(func=_cmd_steady)

    p = with_config(sub.add_parser("sweep", help="classify the (beta, N) plane"))
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--svg", action="store_true", help="also write heatmap.svg")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("cover", help="ball-overlap pigeonhole bound on random clouds")
    p.add_argument("--n", type=int, required=True, help="ambient dimension")
    p.add_argument("--count", type=int, required=True, help="points per cloud")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sampler", type=int, default=0, help="extra random probe points")
    p.set_defaults(func=_cmd_cover)

    p = with_config(sub.add_parser("identity", help="reduced-system integral identity"))
    p.add_argument("--beta-eff", type=float, default=None, dest="beta_eff")
    p.set_defaults(func=_cmd_identity)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return 2 if code not in (0, None) else int(code or 0)
    try:
        return args.func(args)
    except cfg.ConfigError as exc:
        for line in exc.errors:
            print(f"config error: {line}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        _fail(str(exc))
        return 2
    except ValueError as exc:
        _fail(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
