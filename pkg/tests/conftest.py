import numpy as np
import pytest


def dense_circulant(col):
    """N×N matrix with column i equal to `col` cyclically delayed by i."""
    col = np.asarray(col, dtype=complex)
    n = col.size
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        out[:, i] = np.roll(col, i)
    return out


def dense_expander(n, l):
    e = np.zeros((n, n // l))
    for i in range(n // l):
        e[i * l, i] = 1.0
    return e


def padded(h, n):
    out = np.zeros(n, dtype=complex)
    out[: len(h)] = h
    return out


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def rng():
    return np.random.default_rng(20200113)


_ACCEPTANCE = []


@pytest.fixture
def acceptance_report():
    def report(criterion, passed, detail):
        _ACCEPTANCE.append((criterion, passed, detail))

    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
