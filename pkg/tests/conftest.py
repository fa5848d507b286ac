import numpy as np
import pytest
import scipy.linalg as sla

from edrlab.qmodel import DensityOperator

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def rho_of(m):
    return DensityOperator(np.asarray(m, dtype=complex))


# Oracles below deliberately take a different numerical route from the package:
# plain traces of squared operators and scipy's sqrtm/svd.


def oracle_second_moment(op, rho, xi):
    state = np.kron(rho, proj(xi))
    return float(np.trace(op @ op @ state).real)


def oracle_rms(op, rho, xi):
    return np.sqrt(max(oracle_second_moment(op, rho, xi), 0.0))


def oracle_d_bound(a, b, rho):
    s = sla.sqrtm(rho)
    return 0.5 * float(np.sum(sla.svdvals(s @ (a @ b - b @ a) @ s)))


def oracle_c_bound(a, b, rho):
    return float((np.trace((a @ b - b @ a) @ rho) / 2j).real)


def oracle_std(a, rho):
    m1 = np.trace(a @ rho).real
    return np.sqrt(max(np.trace(a @ a @ rho).real - m1 * m1, 0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for res in sorted(RESULTS, key=lambda r: r.number):
            terminalreporter.write_line(res.line())
