import numpy as np
import pytest

from packlab import ModelParams, build_grid

# acceptance pass/fail lines, echoed in the terminal summary so they are
# visible without -s
_CRITERION_LINES = []


@pytest.fixture
def p0():
    """Anchor parameter point: all rates O(1), two packs, unit competition."""
    return ModelParams(d=0.5, D=1.0, omega=0.5, k=1.0, lam=1.0, mu=1.0, beta=1.0, N=2)


@pytest.fixture
def grid100():
    return build_grid(1, [1.0], [100])


@pytest.fixture
def record_criterion():
    def _record(number, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        _CRITERION_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)


def random_valid_params(rng, n_max=64, beta_max=10.0):
    """Draw an admissible parameter set (coexistence condition built in)."""
    lam = float(rng.uniform(0.2, 5.0))
    k = float(rng.uniform(0.2, 5.0))
    mu = float(rng.uniform(0.2, 5.0))
    omega = float(lam * k / mu * rng.uniform(0.05, 0.95))
    return ModelParams(
        d=float(rng.uniform(0.1, 5.0)),
        D=float(rng.uniform(0.1, 5.0)),
        omega=omega,
        k=k,
        lam=lam,
        mu=mu,
        beta=float(rng.uniform(0.0, beta_max)),
        N=int(rng.integers(1, n_max + 1)),
    )
