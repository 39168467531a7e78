"""INI-style run configuration: parse, validate, render.

A run file looks like

    [model]
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

with optional [solver], [sweep] and [output] sections.  Parsing is strict:
unknown sections or keys, duplicate keys, malformed values and inconsistent
cross-field combinations are all collected (with line numbers) and raised
together in a single ConfigError, so a bad file is diagnosed in one pass.
``parse_config(render_config(c))`` reproduces ``c`` exactly; floats are
rendered with repr, which round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grids import Grid, build_grid
from .model import ModelParams, validate_params
from .sweep import DEFAULT_BETA_GRID, DEFAULT_N_GRID


class ConfigError(ValueError):
    """All problems found in a config file, one message per line-located issue."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class SolverSettings:
    dt: float = 0.2
    T: float = 500.0
    steady_tol: float = 1e-9
    flatness_tol: float = 1e-5
    seed: int = 0


@dataclass(frozen=True)
class SweepSettings:
    beta_grid: tuple = DEFAULT_BETA_GRID
    N_grid: tuple = DEFAULT_N_GRID
    runs: int = 3
    amplitude: float = 1e-3


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    grid: Grid
    solver: SolverSettings = SolverSettings()
    sweep: SweepSettings = SweepSettings()
    output: OutputSettings = OutputSettings()


# value kinds: "float", "int", "floats", "ints", "str"
_SCHEMA = {
    "model": {
        "d": "float",
        "D": "float",
        "omega": "float",
        "k": "float",
        "lambda": "float",
        "mu": "float",
        "beta": "float",
        "N": "int",
    },
    "domain": {"dim": "int", "lengths": "floats", "cells": "ints"},
    "solver": {
        "dt": "float",
        "T": "float",
        "steady_tol": "float",
        "flatness_tol": "float",
        "seed": "int",
    },
    "sweep": {"beta_grid": "floats", "N_grid": "ints", "runs": "int", "amplitude": "float"},
    "output": {"directory": "str"},
}
_REQUIRED_SECTIONS = ("model", "domain")


def _convert(kind: str, raw: str):
    """Parse one value; raises ValueError with a short reason."""
    if kind == "str":
        if not raw:
            raise ValueError("empty value")
        return raw
    if kind in ("floats", "ints"):
        parts = [part.strip() for part in raw.split(",")]
        if any(not part for part in parts):
            raise ValueError("empty entry in comma-separated list")
        scalar = "float" if kind == "floats" else "int"
        return tuple(_convert(scalar, part) for part in parts)
    if kind == "int":
        try:
            return int(raw, 10)
        except ValueError:
            raise ValueError(f"expected an integer, got {raw!r}") from None
    # float
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"expected a number, got {raw!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError(f"expected a finite number, got {raw!r}")
    return value


def parse_config(text: str) -> RunConfig:
    """Parse config text into a RunConfig; raises ConfigError listing every problem."""
    errors: list[str] = []
    # sections[name] = (header_line, {key: (line, value)})
    sections: dict[str, tuple[int, dict]] = {}
    broken: set[str] = set()  # sections with a bad entry; skip deeper checks there
    failed: dict[str, set] = {}  # section -> keys present but unparseable
    current = None

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SCHEMA:
                errors.append(f"line {lineno}: unknown section [{name}]")
                current = None
                continue
            if name in sections:
                errors.append(
                    f"line {lineno}: duplicate section [{name}]"
                    f" (first seen at line {sections[name][0]})"
                )
                current = None
                continue
            sections[name] = (lineno, {})
            current = name
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value' or '[section]', got {line!r}")
            continue
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if current is None:
            errors.append(f"line {lineno}: key {key!r} outside any recognized section")
            continue
        schema = _SCHEMA[current]
        if key not in schema:
            errors.append(f"line {lineno}: unknown key {key!r} in [{current}]")
            continue
        entries = sections[current][1]
        if key in entries:
            errors.append(
                f"line {lineno}: duplicate key {key!r} in [{current}]"
                f" (first set at line {entries[key][0]})"
            )
            continue
        try:
            entries[key] = (lineno, _convert(schema[key], raw))
        except ValueError as exc:
            errors.append(f"line {lineno}: key {key!r}: {exc}")
            broken.add(current)
            failed.setdefault(current, set()).add(key)

    for name in _REQUIRED_SECTIONS:
        if name not in sections:
            errors.append(f"missing required section [{name}]")

    def section_values(name: str) -> dict:
        if name not in sections:
            return {}
        return {key: value for key, (_, value) in sections[name][1].items()}

    params = None
    if "model" in sections:
        header, entries = sections["model"]
        seen = set(entries) | failed.get("model", set())
        missing = [key for key in _SCHEMA["model"] if key not in seen]
        if missing:
            errors.append(
                f"line {header}: [model] is missing required keys: {', '.join(missing)}"
            )
        elif "model" not in broken:
            values = section_values("model")
            values["lam"] = values.pop("lambda")
            params = ModelParams(**values)
            for problem in validate_params(params):
                # messages start with the field name; point at its line
                key = problem.split()[0].replace("lam", "lambda")
                if key in entries:
                    errors.append(f"line {entries[key][0]}: key {key!r}: {problem}")
                else:
                    errors.append(f"line {header}: [model]: {problem}")
                params = None

    grid = None
    if "domain" in sections:
        header, entries = sections["domain"]
        seen = set(entries) | failed.get("domain", set())
        missing = [key for key in _SCHEMA["domain"] if key not in seen]
        if missing:
            errors.append(
                f"line {header}: [domain] is missing required keys: {', '.join(missing)}"
            )
        elif "domain" not in broken:
            values = section_values("domain")
            try:
                grid = build_grid(values["dim"], values["lengths"], values["cells"])
            except ValueError as exc:
                errors.append(f"line {header}: [domain]: {exc}")

    solver = SolverSettings(**section_values("solver"))
    sweep = SweepSettings(**section_values("sweep"))
    output = OutputSettings(**section_values("output"))
    if "solver" in sections:
        entries = sections["solver"][1]
        if "dt" in entries and solver.dt <= 0:
            errors.append(f"line {entries['dt'][0]}: key 'dt': must be positive")
        if "T" in entries and solver.T <= 0:
            errors.append(f"line {entries['T'][0]}: key 'T': must be positive")
        if "steady_tol" in entries and solver.steady_tol < 0:
            errors.append(f"line {entries['steady_tol'][0]}: key 'steady_tol': must be >= 0")
    if "sweep" in sections:
        entries = sections["sweep"][1]
        if "runs" in entries and sweep.runs < 1:
            errors.append(f"line {entries['runs'][0]}: key 'runs': must be >= 1")
        if "N_grid" in entries and any(n < 1 for n in sweep.N_grid):
            errors.append(f"line {entries['N_grid'][0]}: key 'N_grid': entries must be >= 1")
        if "beta_grid" in entries and any(b < 0 for b in sweep.beta_grid):
            errors.append(f"line {entries['beta_grid'][0]}: key 'beta_grid': entries must be >= 0")

    if errors:
        raise ConfigError(errors)
    return RunConfig(params=params, grid=grid, solver=solver, sweep=sweep, output=output)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(_fmt(entry) for entry in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_config(config: RunConfig) -> str:
    """Inverse of parse_config: text such that parsing it reproduces `config`."""
    p, g = config.params, config.grid
    lines = ["[model]"]
    for key, value in (
        ("d", p.d),
        ("D", p.D),
        ("omega", p.omega),
        ("k", p.k),
        ("lambda", p.lam),
        ("mu", p.mu),
        ("beta", p.beta),
        ("N", p.N),
    ):
        lines.append(f"{key} = {_fmt(value)}")
    lines += ["", "[domain]"]
    lines.append(f"dim = {g.dim}")
    lines.append(f"lengths = {_fmt(g.lengths)}")
    lines.append(f"cells = {_fmt(g.cells)}")
    s = config.solver
    lines += ["", "[solver]"]
    for key, value in (
        ("dt", s.dt),
        ("T", s.T),
        ("steady_tol", s.steady_tol),
        ("flatness_tol", s.flatness_tol),
        ("seed", s.seed),
    ):
        lines.append(f"{key} = {_fmt(value)}")
    w = config.sweep
    lines += ["", "[sweep]"]
    lines.append(f"beta_grid = {_fmt(w.beta_grid)}")
    lines.append(f"N_grid = {_fmt(w.N_grid)}")
    lines.append(f"runs = {w.runs}")
    lines.append(f"amplitude = {_fmt(w.amplitude)}")
    lines += ["", "[output]"]
    lines.append(f"directory = {config.output.directory}")
    lines.append("")
    return "\n".join(lines)
