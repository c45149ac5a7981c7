import numpy as np
import pytest


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_row_unitary(rng, n_p, n_s):
    Q, _ = np.linalg.qr(crandn(rng, n_s, n_s))
    return Q[:n_p, :]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# One line per acceptance criterion, collected during the run and repeated
# in the terminal summary so it survives output capturing.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def emit(criterion: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
