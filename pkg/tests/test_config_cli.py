import json
import math

import numpy as np
import pytest

from packlab import (
    ConfigError,
    Field,
    ModelParams,
    RunConfig,
    SolverSettings,
    build_grid,
    parse_config,
    render_config,
)
from packlab.cli import load_state, main, save_state

P0_TEXT = """[model]
d = 0.5
D = 1.0
omega = 0.5
k = 1.0
lambda = 1.0
mu = 1.0
beta = 1.0
N = 2

[domain]
dim = 1
lengths = 1.0
cells = 100
"""


def _write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_parse_minimal_fills_defaults():
    run = parse_config(P0_TEXT)
    assert run.params == ModelParams(d=0.5, D=1.0, omega=0.5, k=1.0, lam=1.0, mu=1.0, beta=1.0, N=2)
    assert run.grid.cells == (100,)
    assert run.solver == SolverSettings()
    assert run.solver.dt == 0.2 and run.solver.steady_tol == 1e-9
    assert run.sweep.runs == 3 and run.sweep.amplitude == 1e-3
    assert run.output.directory == "out"


def test_comments_and_blank_lines_ignored():
    text = "# header comment\n; alt comment\n\n" + P0_TEXT
    assert parse_config(text).params.beta == 1.0


def test_render_parse_round_trip():
    base = parse_config(P0_TEXT)
    config = RunConfig(
        params=ModelParams(d=0.3, D=1.7, omega=0.45, k=1.1, lam=0.9, mu=1.3, beta=0.07, N=5),
        grid=build_grid(2, [1.0, 2.5], [16, 40]),
        solver=SolverSettings(dt=0.07, T=123.0, steady_tol=3e-8, flatness_tol=2e-5, seed=9),
        sweep=base.sweep,
        output=base.output,
    )
    assert parse_config(render_config(config)) == config


def test_duplicate_key_names_both_lines():
    text = P0_TEXT + "\n[solver]\ndt = 0.1\ndt = 0.2\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    (message,) = [e for e in info.value.errors if "duplicate key 'dt'" in e]
    assert "line 18" in message and "first set at line 17" in message


def test_semantic_error_points_at_value_line():
    with pytest.raises(ConfigError) as info:
        parse_config(P0_TEXT.replace("beta = 1.0", "beta = -1.0"))
    (message,) = info.value.errors
    assert message.startswith("line 8:") and "beta must be >= 0" in message


def test_malformed_values_and_unknowns_collected_together():
    text = P0_TEXT.replace("N = 2", "N = 2.5") + "\n[foo]\nx = 1\n\n[solver]\nzeta = 3\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    joined = "\n".join(info.value.errors)
    assert "expected an integer" in joined
    assert "unknown section [foo]" in joined
    assert "unknown key 'zeta'" in joined


def test_missing_section_and_keys():
    with pytest.raises(ConfigError) as info:
        parse_config("[model]\nd = 0.5\n")
    joined = "\n".join(info.value.errors)
    assert "missing required section [domain]" in joined
    assert "missing required keys" in joined and "lambda" in joined


def test_solver_and_sweep_cross_checks():
    text = P0_TEXT + "\n[solver]\ndt = -0.1\n\n[sweep]\nruns = 0\nN_grid = 0, 2\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    joined = "\n".join(info.value.errors)
    assert "'dt': must be positive" in joined
    assert "'runs': must be >= 1" in joined
    assert "'N_grid': entries must be >= 1" in joined


def test_cli_constant_prints_state(tmp_path, capsys):
    assert main(["constant", "-c", _write(tmp_path, P0_TEXT)]) == 0
    out = capsys.readouterr().out
    assert "w = 0.16666666666666666" in out
    assert "u = 0.6666666666666666" in out
    assert "N = 2" in out
    assert "label = StronglyUnstable" in out
    residual = float(out.split("residual = ")[1].splitlines()[0])
    assert residual < 1e-15


def test_cli_spectrum_csv(tmp_path, capsys):
    assert main(["spectrum", "-c", _write(tmp_path, P0_TEXT)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "re,im,multiplicity,source"
    closed = [l for l in lines[1:] if l.endswith(",closed")]
    numeric = [l for l in lines[1:] if l.endswith(",numeric")]
    assert len(closed) == 3 and len(numeric) == 3
    assert "0.16666666666666666,0,1,closed" in closed
    pair = [l for l in closed if l.startswith("-0.41666666666666")]
    assert len(pair) == 2
    assert any("0.39965262694272" in l for l in pair)
    # numeric eigenvalues agree with the closed rows
    for got, want in zip(sorted(numeric), sorted(closed)):
        gr, gi = map(float, got.split(",")[:2])
        wr, wi = map(float, want.split(",")[:2])
        assert math.hypot(gr - wr, gi - wi) < 1e-12


def test_cli_spectrum_rejects_negative_nu(tmp_path):
    assert main(["spectrum", "-c", _write(tmp_path, P0_TEXT), "--nu", "-1"]) == 2


def test_cli_usage_and_config_errors(tmp_path, capsys):
    assert main(["no-such-command"]) == 2
    assert main(["constant", "-c", str(tmp_path / "missing.ini")]) == 2
    bad = _write(tmp_path, P0_TEXT.replace("beta = 1.0", "beta = -1.0"), "bad.ini")
    assert main(["constant", "-c", bad]) == 2
    err = capsys.readouterr().err
    assert "config error: line 8" in err


STABLE_N1_TEXT = """[model]
d = 0.5
D = 1.0
omega = 0.5
k = 1.0
lambda = 1.0
mu = 1.0
beta = 0.0
N = 1

[domain]
dim = 1
lengths = 1.0
cells = 40

[solver]
dt = 0.2
T = 80.0
steady_tol = 1e-8
flatness_tol = 1e-5
seed = 0
"""


def test_cli_evolve_writes_artifacts(tmp_path, capsys):
    config = _write(tmp_path, STABLE_N1_TEXT)
    out = tmp_path / "run1"
    assert main(["evolve", "-c", config, "--out", str(out), "--start", "noise"]) == 0
    printed = capsys.readouterr().out
    assert "converged = True" in printed and "label = Constant" in printed

    p, s, t = load_state(out / "state.json")
    assert p.N == 1 and s.grid.cells == (40,) and t > 0
    assert np.all(np.isfinite(s.data))

    rows = (out / "residuals.csv").read_text().strip().splitlines()
    assert rows[0] == "step,time,residual,max_u,sum_w_max"
    assert len(rows) > 2 and float(rows[-1].split(",")[2]) <= 1e-8

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 0
    assert len(manifest["config_sha256"]) == 64
    assert set(manifest["versions"]) == {"packlab", "python", "numpy", "scipy"}


def test_cli_evolve_reports_no_convergence(tmp_path, capsys):
    text = STABLE_N1_TEXT.replace("T = 80.0", "T = 1.0").replace("steady_tol = 1e-8", "steady_tol = 1e-13")
    out = tmp_path / "short"
    assert main(["evolve", "-c", _write(tmp_path, text), "--out", str(out)]) == 1
    assert "no steady state" in capsys.readouterr().err
    assert (out / "state.json").exists()  # artifacts still written for inspection


def test_cli_steady_newton(tmp_path, capsys):
    out = tmp_path / "newton"
    assert main(["steady", "-c", _write(tmp_path, STABLE_N1_TEXT), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "label = Constant" in printed
    assert float(printed.split("residual = ")[1].splitlines()[0]) < 1e-8
    p, s, _ = load_state(out / "state.json")
    w0, u0, _ = __import__("packlab").constant_coexistence_state(p)
    assert abs(s.u.mean() - u0) < 1e-6 and abs(s.w[0].mean() - w0) < 1e-6


SWEEP_TEXT = """[model]
d = 0.5
D = 1.0
omega = 0.5
k = 1.0
lambda = 1.0
mu = 1.0
beta = 1.0
N = 2

[domain]
dim = 1
lengths = 1.0
cells = 40

[solver]
dt = 0.2
T = 50.0
steady_tol = 1e-6
flatness_tol = 1e-5
seed = 7

[sweep]
beta_grid = 0.0, 0.01
N_grid = 1, 2
runs = 2
amplitude = 1e-3
"""


def test_cli_sweep_outputs_and_reproducibility(tmp_path, capsys):
    config = _write(tmp_path, SWEEP_TEXT)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["sweep", "-c", config, "--out", str(out_a), "--svg"]) == 0
    assert main(["sweep", "-c", config, "--out", str(out_b)]) == 0
    capsys.readouterr()
    csv_a = (out_a / "sweep.csv").read_bytes()
    assert csv_a == (out_b / "sweep.csv").read_bytes()
    header, *rows = csv_a.decode().strip().splitlines()
    assert header == "beta,N,label,flatness,runs,runtime_s"
    assert len(rows) == 4 and all(r.split(",")[2] == "Constant" for r in rows)
    assert "<svg" in (out_a / "heatmap.svg").read_text()
    manifest = json.loads((out_a / "manifest.json").read_text())
    assert manifest["seed"] == 7


def test_cli_cover_table(tmp_path, capsys):
    assert main(["cover", "--n", "2", "--count", "40", "--radius", "0.2", "--trials", "3", "--seed", "42"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "trial,m,bound,ok"
    assert len(lines) == 4
    for trial, row in enumerate(lines[1:]):
        fields = row.split(",")
        assert int(fields[0]) == trial
        assert int(fields[1]) >= math.ceil(float(fields[2]))
        assert fields[3] == "1"
    assert main(["cover", "--n", "2", "--count", "40", "--radius", "-0.2"]) == 2
    assert main(["cover", "--n", "0", "--count", "40", "--radius", "0.2"]) == 2


def test_cli_identity_reports_matching_integrals(tmp_path, capsys):
    assert main(["identity", "-c", _write(tmp_path, P0_TEXT)]) == 0
    out = capsys.readouterr().out
    assert "beta_eff = 0.5" in out  # beta (N-1)/N for beta=1, N=2

    def grab(name):
        return float(out.split(f"{name} = ")[1].splitlines()[0])

    assert abs(grab("mismatch")) < 1e-3
    assert abs(grab("I_reaction")) < 1e-3 and abs(grab("I_dirichlet")) < 1e-3
    assert main(["identity", "-c", _write(tmp_path, P0_TEXT), "--beta-eff", "-2"]) == 2


def test_save_load_state_round_trip(tmp_path, p0):
    grid = build_grid(1, [1.0], [12])
    rng = np.random.default_rng(5)
    field = Field(grid=grid, data=rng.uniform(0.1, 1.0, size=(p0.N + 1, 12)))
    path = tmp_path / "state.json"
    save_state(path, p0, field, time=3.25)
    p, s, t = load_state(path)
    assert p == p0 and t == 3.25
    assert s.grid == grid
    assert np.array_equal(s.data, field.data)
