import pytest

from randnet.model import ModelParams, TimeGrid, builtin_drift, builtin_kernel


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    lines = request.config._acceptance_lines

    def record(name, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
        lines.append(line)
        print(line)
        return passed

    return record


@pytest.fixture
def kuramoto():
    return builtin_kernel("kuramoto")


@pytest.fixture
def zero_drift():
    return builtin_drift("zero")


@pytest.fixture
def small_params():
    return ModelParams(j_bar=1.0, sigma=0.5, lam=1.0, horizon=0.5, n_steps=16, init_spread=1.0)


@pytest.fixture
def small_grid(small_params):
    return TimeGrid.from_params(small_params)


def random_gram(rng, n, rank=None, scale=1.0):
    rank = n if rank is None else rank
    A = rng.standard_normal((n, rank))
    return scale * A @ A.T / rank
