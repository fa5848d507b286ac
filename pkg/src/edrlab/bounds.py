"""Commutator lower bounds and the canonical-purification extension.

``c_bound`` is the usual state expectation of the commutator;
``d_bound`` is half the trace norm of the commutator sandwiched between
square roots of the state, which dominates ``|c_bound|`` and coincides with
it on pure states.  :func:`build_extension` constructs the purified
doubled-space observables for which the extended commutator expectation
equals ``d_bound``, and :func:`verify_extension_identities` checks that
claim together with the accompanying spread and disturbance identities by
explicit computation on the doubled space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import DimensionMismatchError, InconsistentInputError
from .qmodel import (
    DensityOperator,
    MeasuringProcess,
    Observable,
    as_observable,
    rms_disturbance,
    rms_error,
    std_dev,
)

IMAG_TOL = 1e-10
DEFAULT_COMPOSITE_CAP = 256


def _pair(a, b, rho: DensityOperator) -> tuple[Observable, Observable]:
    a, b = as_observable(a), as_observable(b)
    if not (a.dim == b.dim == rho.dim):
        raise DimensionMismatchError(f"dimensions A={a.dim}, B={b.dim}, rho={rho.dim} differ")
    return a, b


def c_bound(a, b, rho: DensityOperator) -> float:
    """``Tr([A, B] rho) / 2i``."""
    a, b = _pair(a, b, rho)
    val = np.trace(linalg.commutator(a.matrix, b.matrix) @ rho.rho) / 2j
    if abs(val.imag) > IMAG_TOL:
        raise InconsistentInputError(f"commutator expectation has real part {val.imag:.3e}")
    return float(val.real)


def sandwiched_commutator(a, b, rho: DensityOperator) -> np.ndarray:
    """``-i sqrt(rho) [A, B] sqrt(rho)``, a Hermitian matrix."""
    a, b = _pair(a, b, rho)
    s = rho.sqrt_rho
    h = -1j * (s @ linalg.commutator(a.matrix, b.matrix) @ s)
    return (h + h.conj().T) / 2


def d_bound(a, b, rho: DensityOperator) -> float:
    return 0.5 * linalg.trace_norm(sandwiched_commutator(a, b, rho))


@dataclass(frozen=True)
class BoundPair:
    c_ab: float
    d_ab: float


def bound_pair(a, b, rho: DensityOperator) -> BoundPair:
    return BoundPair(c_ab=c_bound(a, b, rho), d_ab=d_bound(a, b, rho))


def canonical_purification(rho: DensityOperator) -> np.ndarray:
    """``sum_j sqrt(p_j) |phi_j> (x) conj(|phi_j>)`` on system (x) system.

    The second factor stands for the dual space: the bra ``<phi|`` is stored
    as the complex-conjugated component vector.
    """
    p, v = rho.eigenvalues, rho.eigenvectors
    psi = np.zeros(rho.dim * rho.dim, dtype=complex)
    for j in range(rho.dim):
        psi += np.sqrt(p[j]) * np.kron(v[:, j], v[:, j].conj())
    return psi


def dual_operator(w: np.ndarray) -> np.ndarray:
    """Matrix of the dual-space operator ``<eta| -> <eta| W`` in the conjugated representation."""
    return np.asarray(w).T.copy()


@dataclass(frozen=True, eq=False)
class PurifiedExtension:
    w: np.ndarray
    psi: np.ndarray
    a_ext: Observable
    b_ext_w: Observable

    @property
    def sys_dim(self) -> int:
        return self.w.shape[0]

    @property
    def state(self) -> DensityOperator:
        return DensityOperator.from_vector(self.psi)


def sign_operator(a, b, rho: DensityOperator) -> np.ndarray:
    """Self-adjoint unitary ``W`` with ``-i W sqrt(rho)[A,B]sqrt(rho) = |sqrt(rho)[A,B]sqrt(rho)|``."""
    w, _ = linalg.polar_selfadjoint(sandwiched_commutator(a, b, rho))
    return w


def build_extension(a, b, rho: DensityOperator) -> PurifiedExtension:
    a, b = _pair(a, b, rho)
    d = rho.dim
    w = sign_operator(a, b, rho)
    psi = canonical_purification(rho)
    mean_b = np.trace(b.matrix @ rho.rho).real
    a_ext = np.kron(a.matrix, np.eye(d))
    b_ext = np.kron(b.matrix - mean_b * np.eye(d), dual_operator(w))
    return PurifiedExtension(w=w, psi=psi, a_ext=Observable(a_ext), b_ext_w=Observable(b_ext))


def extend_process(p: MeasuringProcess, ancilla_dim: int) -> MeasuringProcess:
    """Same probe and meter acting on (system (x) ancilla) with ``U (x) I_ancilla``."""
    d, k = p.sys_dim, p.probe_dim
    u4 = np.asarray(p.interaction).reshape(d, k, d, k)
    u_ext = np.einsum("spxq,ab->sapxbq", u4, np.eye(ancilla_dim))
    n = d * ancilla_dim * k
    return MeasuringProcess(
        sys_dim=d * ancilla_dim,
        probe_dim=k,
        probe_state=p.probe_state,
        interaction=u_ext.reshape(n, n),
        meter=p.meter,
    )


@dataclass(frozen=True)
class ExtensionReport:
    """Doubled-space quantities next to the originals they are compared with."""

    sigma_a_ext: float
    sigma_a: float
    eps_a_ext: float
    eps_a: float
    sigma_bw: float
    sigma_b: float
    eta_bw: float
    eta_b: float
    c_prime: float
    c_ab: float
    d_ab: float

    def holds(self, tol: float = 1e-9) -> bool:
        return (
            self.sigma_bw <= self.sigma_b + 1e-10
            and abs(self.eta_bw - self.eta_b) <= tol
            and abs(self.c_prime - self.d_ab) <= tol
            and abs(self.sigma_a_ext - self.sigma_a) <= tol
            and abs(self.eps_a_ext - self.eps_a) <= tol
        )


def verify_extension_identities(
    ext: PurifiedExtension,
    p: MeasuringProcess,
    a,
    b,
    rho: DensityOperator,
    composite_cap: int = DEFAULT_COMPOSITE_CAP,
) -> ExtensionReport:
    a, b = _pair(a, b, rho)
    d = rho.dim
    if p.sys_dim != d or ext.sys_dim != d:
        raise DimensionMismatchError("process, extension and state disagree on the system dimension")
    if d * d * p.probe_dim > composite_cap:
        raise DimensionMismatchError(
            f"doubled composite dimension {d * d * p.probe_dim} exceeds cap {composite_cap}"
        )
    big = extend_process(p, d)
    pure = ext.state
    return ExtensionReport(
        sigma_a_ext=std_dev(ext.a_ext, pure),
        sigma_a=std_dev(a, rho),
        eps_a_ext=rms_error(big, ext.a_ext, pure),
        eps_a=rms_error(p, a, rho),
        sigma_bw=std_dev(ext.b_ext_w, pure),
        sigma_b=std_dev(b, rho),
        eta_bw=rms_disturbance(big, ext.b_ext_w, pure),
        eta_b=rms_disturbance(p, b, rho),
        c_prime=c_bound(ext.a_ext, ext.b_ext_w, pure),
        c_ab=c_bound(a, b, rho),
        d_ab=d_bound(a, b, rho),
    )
