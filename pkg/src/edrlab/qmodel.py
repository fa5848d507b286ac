"""States, observables, measuring processes and joint measurement models.

A measuring process couples the system to a probe prepared in a pure state
``xi``, lets them interact through a unitary ``U`` and then reads a meter
observable ``M`` on the probe.  All error and disturbance quantities are
second (or first) moments of Heisenberg-picture difference operators in
the product state ``rho (x) |xi><xi|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .exceptions import (
    DimensionMismatchError,
    NotPSDError,
    NotUnitaryError,
    PreconditionError,
    ValidationError,
)

TRACE_TOL = 1e-10
NORM_TOL = 1e-12
COMMUTE_TOL = 1e-8
SIGMA_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian matrix on a finite-dimensional space."""

    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.require_hermitian(self.matrix, "observable")
        object.__setattr__(self, "matrix", linalg.frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"Observable(dim={self.dim})"


_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(name: str) -> Observable:
    """``"I"``, ``"X"``, ``"Y"`` or ``"Z"`` as an :class:`Observable`."""
    try:
        return Observable(_PAULI[name.upper()])
    except KeyError:
        raise ValueError(f"unknown Pauli operator {name!r}") from None


def as_observable(a) -> Observable:
    return a if isinstance(a, Observable) else Observable(a)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Trace-one positive matrix with cached spectral data."""

    rho: np.ndarray

    def __post_init__(self):
        r = linalg.require_hermitian(self.rho, "density matrix")
        tr = np.trace(r)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density matrix has trace {tr.real:.12g}, expected 1")
        w = np.linalg.eigvalsh(r)
        if w[0] < -linalg.PSD_CLIP:
            raise NotPSDError(f"density matrix has negative eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "rho", linalg.frozen(r))

    @classmethod
    def from_vector(cls, psi) -> DensityOperator:
        psi = np.asarray(psi, dtype=complex).ravel()
        nrm = np.linalg.norm(psi)
        if nrm == 0:
            raise ValidationError("zero state vector")
        psi = psi / nrm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> DensityOperator:
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def from_bloch(cls, x: float, y: float, z: float) -> DensityOperator:
        return cls((_PAULI["I"] + x * _PAULI["X"] + y * _PAULI["Y"] + z * _PAULI["Z"]) / 2)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @cached_property
    def _spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        w, v = np.linalg.eigh(self.rho)
        return np.clip(w, 0.0, None), v

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._spectrum[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._spectrum[1]

    @cached_property
    def sqrt_rho(self) -> np.ndarray:
        w, v = self._spectrum
        return linalg.frozen((v * np.sqrt(w)) @ v.conj().T)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def is_pure(self, tol: float = 1e-10) -> bool:
        return abs(self.purity - 1.0) <= tol

    def expect(self, op) -> complex:
        op = op.matrix if isinstance(op, Observable) else np.asarray(op)
        _check_dim(op.shape[0], self.dim, "operator", "state")
        return complex(np.trace(op @ self.rho))

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim}, purity={self.purity:.6g})"


def _check_dim(got: int, want: int, what: str, against: str) -> None:
    if got != want:
        raise DimensionMismatchError(f"{what} has dimension {got}, {against} has {want}")


def _unit_vector(xi, name: str) -> np.ndarray:
    xi = np.asarray(xi, dtype=complex).ravel()
    if xi.size == 0 or not np.all(np.isfinite(xi)):
        raise ValidationError(f"{name} must be a finite non-empty vector")
    if abs(np.linalg.norm(xi) - 1.0) > NORM_TOL:
        raise ValidationError(f"{name} has norm {np.linalg.norm(xi):.15g}, expected 1")
    out = xi.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class MeasuringProcess:
    """Indirect measurement model: probe state, interaction and meter."""

    sys_dim: int
    probe_dim: int
    probe_state: np.ndarray
    interaction: np.ndarray
    meter: Observable

    def __post_init__(self):
        if self.sys_dim < 1 or self.probe_dim < 1:
            raise ValidationError("dimensions must be positive")
        xi = _unit_vector(self.probe_state, "probe state")
        _check_dim(xi.size, self.probe_dim, "probe state", "probe")
        u = linalg.as_square(self.interaction, "interaction")
        _check_dim(u.shape[0], self.sys_dim * self.probe_dim, "interaction", "system (x) probe")
        if not linalg.is_unitary(u):
            raise NotUnitaryError("interaction is not unitary to 1e-10")
        meter = as_observable(self.meter)
        _check_dim(meter.dim, self.probe_dim, "meter", "probe")
        object.__setattr__(self, "probe_state", xi)
        object.__setattr__(self, "interaction", linalg.frozen(u))
        object.__setattr__(self, "meter", meter)

    @property
    def dim(self) -> int:
        return self.sys_dim * self.probe_dim

    def __repr__(self) -> str:
        return f"MeasuringProcess(sys_dim={self.sys_dim}, probe_dim={self.probe_dim})"


@dataclass(frozen=True, eq=False)
class JointModel:
    """Commuting pair of observables on system (x) probe with a probe state."""

    sys_dim: int
    probe_dim: int
    probe_state: np.ndarray
    cal_a: Observable
    cal_b: Observable

    def __post_init__(self):
        xi = _unit_vector(self.probe_state, "probe state")
        _check_dim(xi.size, self.probe_dim, "probe state", "probe")
        a, b = as_observable(self.cal_a), as_observable(self.cal_b)
        n = self.sys_dim * self.probe_dim
        _check_dim(a.dim, n, "joint observable A", "system (x) probe")
        _check_dim(b.dim, n, "joint observable B", "system (x) probe")
        comm = np.linalg.norm(linalg.commutator(a.matrix, b.matrix))
        scale = 1.0 + np.linalg.norm(a.matrix) * np.linalg.norm(b.matrix)
        if comm > COMMUTE_TOL * scale:
            raise ValidationError(f"joint observables do not commute: ||[A, B]||_F = {comm:.3e}")
        object.__setattr__(self, "probe_state", xi)
        object.__setattr__(self, "cal_a", a)
        object.__setattr__(self, "cal_b", b)

    @property
    def dim(self) -> int:
        return self.sys_dim * self.probe_dim

    def __repr__(self) -> str:
        return f"JointModel(sys_dim={self.sys_dim}, probe_dim={self.probe_dim})"


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of a joint measurement of ``(A, B)`` in ``rho``.

    For a model built from a measuring process ``eps_b`` is the rms
    disturbance of ``B``.
    """

    eps_a: float
    eps_b: float
    sigma_a: float
    sigma_b: float
    sigma_cal_a: float
    sigma_cal_b: float
    delta_a: float
    delta_b: float

    @property
    def eta_b(self) -> float:
        return self.eps_b

    @property
    def sigma_cal_nonzero(self) -> bool:
        return self.sigma_cal_a >= SIGMA_FLOOR and self.sigma_cal_b >= SIGMA_FLOOR


# -- Heisenberg picture ------------------------------------------------------


def _lift_system(a: Observable, probe_dim: int) -> np.ndarray:
    return np.kron(a.matrix, np.eye(probe_dim))


def _product_state(rho: DensityOperator, xi: np.ndarray) -> np.ndarray:
    return np.kron(rho.rho, np.outer(xi, xi.conj()))


def _check_system(p, op: Observable, what: str = "observable") -> None:
    _check_dim(op.dim, p.sys_dim, what, "system")


def heisenberg_evolve(p: MeasuringProcess, which: str = "meter", b=None) -> Observable:
    """``U^dag (I (x) M) U`` for ``which="meter"``, ``U^dag (B (x) I) U`` for ``"system_obs"``."""
    u = p.interaction
    if which == "meter":
        op = np.kron(np.eye(p.sys_dim), p.meter.matrix)
    elif which == "system_obs":
        if b is None:
            raise ValueError("a system observable is required for which='system_obs'")
        b = as_observable(b)
        _check_system(p, b)
        op = _lift_system(b, p.probe_dim)
    else:
        raise ValueError(f"which must be 'meter' or 'system_obs', got {which!r}")
    out = u.conj().T @ op @ u
    return Observable((out + out.conj().T) / 2)


def error_observable(p: MeasuringProcess, a) -> Observable:
    a = as_observable(a)
    _check_system(p, a)
    return Observable(heisenberg_evolve(p, "meter").matrix - _lift_system(a, p.probe_dim))


def disturbance_observable(p: MeasuringProcess, b) -> Observable:
    b = as_observable(b)
    _check_system(p, b)
    return Observable(heisenberg_evolve(p, "system_obs", b).matrix - _lift_system(b, p.probe_dim))


def _amplitude(rho: DensityOperator, xi: np.ndarray) -> np.ndarray:
    """``sqrt(rho) (x) |xi>`` as a (d*k) x d matrix; ``X X^dag = rho (x) |xi><xi|``."""
    return np.kron(rho.sqrt_rho, xi.reshape(-1, 1))


def _rms(op: np.ndarray, amp: np.ndarray) -> float:
    # ||op amp||_F^2 = Tr[op^2 rho (x) |xi><xi|] without cancellation in the square
    return float(np.linalg.norm(op @ amp))


def rms_error(p: MeasuringProcess, a, rho: DensityOperator) -> float:
    a = as_observable(a)
    _check_dim(rho.dim, p.sys_dim, "state", "system")
    n = error_observable(p, a).matrix
    return _rms(n, _amplitude(rho, p.probe_state))


def rms_disturbance(p: MeasuringProcess, b, rho: DensityOperator) -> float:
    b = as_observable(b)
    _check_dim(rho.dim, p.sys_dim, "state", "system")
    d = disturbance_observable(p, b).matrix
    return _rms(d, _amplitude(rho, p.probe_state))


def std_dev(a, rho: DensityOperator) -> float:
    a = as_observable(a)
    _check_dim(a.dim, rho.dim, "observable", "state")
    m1 = np.trace(a.matrix @ rho.rho).real
    return _rms(a.matrix - m1 * np.eye(a.dim), rho.sqrt_rho)


# -- joint models --------------------------------------------------------------


def to_joint_model(p: MeasuringProcess, b) -> JointModel:
    """Output observable ``M(dt)`` paired with the evolved ``B(dt)``."""
    return JointModel(
        sys_dim=p.sys_dim,
        probe_dim=p.probe_dim,
        probe_state=p.probe_state,
        cal_a=heisenberg_evolve(p, "meter"),
        cal_b=heisenberg_evolve(p, "system_obs", b),
    )


def as_joint_model(model, b) -> JointModel:
    if isinstance(model, JointModel):
        return model
    if isinstance(model, MeasuringProcess):
        return to_joint_model(model, b)
    raise TypeError(f"expected MeasuringProcess or JointModel, got {type(model).__name__}")


def _channel(j: JointModel, channel: str) -> Observable:
    if channel == "A":
        return j.cal_a
    if channel == "B":
        return j.cal_b
    raise ValueError(f"channel must be 'A' or 'B', got {channel!r}")


def joint_rms_error(j: JointModel, target, channel: str, rho: DensityOperator) -> float:
    target = as_observable(target)
    _check_dim(target.dim, j.sys_dim, "target observable", "system")
    _check_dim(rho.dim, j.sys_dim, "state", "system")
    diff = _channel(j, channel).matrix - _lift_system(target, j.probe_dim)
    return _rms(diff, _amplitude(rho, j.probe_state))


def moments(j: JointModel, a, b, rho: DensityOperator, require_spread: bool = False) -> MomentSet:
    """All first/second moment quantities of a joint model.

    With ``require_spread`` a :class:`PreconditionError` is raised when an
    output observable has standard deviation below 1e-10.
    """
    a, b = as_observable(a), as_observable(b)
    for op, name in ((a, "A"), (b, "B")):
        _check_dim(op.dim, j.sys_dim, f"observable {name}", "system")
    _check_dim(rho.dim, j.sys_dim, "state", "system")
    state = _product_state(rho, j.probe_state)
    amp = _amplitude(rho, j.probe_state)
    eye = np.eye(j.dim)

    def spread(op):
        return _rms(op - np.trace(op @ state).real * eye, amp)

    na = j.cal_a.matrix - _lift_system(a, j.probe_dim)
    nb = j.cal_b.matrix - _lift_system(b, j.probe_dim)
    ms = MomentSet(
        eps_a=_rms(na, amp),
        eps_b=_rms(nb, amp),
        sigma_a=std_dev(a, rho),
        sigma_b=std_dev(b, rho),
        sigma_cal_a=spread(j.cal_a.matrix),
        sigma_cal_b=spread(j.cal_b.matrix),
        delta_a=float(np.trace(na @ state).real),
        delta_b=float(np.trace(nb @ state).real),
    )
    if require_spread and not ms.sigma_cal_nonzero:
        raise PreconditionError(
            f"output standard deviations must be nonzero, got {ms.sigma_cal_a:.3e}, {ms.sigma_cal_b:.3e}"
        )
    return ms


def contract_probe(op: np.ndarray, xi: np.ndarray, sys_dim: int, probe_dim: int) -> np.ndarray:
    """System operator ``<xi| op |xi>`` with the probe factor contracted."""
    t = np.asarray(op).reshape(sys_dim, probe_dim, sys_dim, probe_dim)
    return np.einsum("k,ikjl,l->ij", xi.conj(), t, xi)


def first_moment_operators(p, a, b) -> tuple[Observable, Observable]:
    """First-moment operators of the error of ``A`` and the disturbance of ``B``.

    Accepts a :class:`MeasuringProcess` or a :class:`JointModel`; for the
    latter the second operator belongs to the error of ``B``.
    """
    a, b = as_observable(a), as_observable(b)
    j = as_joint_model(p, b)
    _check_system(j, a)
    _check_system(j, b)
    na = j.cal_a.matrix - _lift_system(a, j.probe_dim)
    db = j.cal_b.matrix - _lift_system(b, j.probe_dim)
    n_a = contract_probe(na, j.probe_state, j.sys_dim, j.probe_dim)
    d_b = contract_probe(db, j.probe_state, j.sys_dim, j.probe_dim)
    return Observable((n_a + n_a.conj().T) / 2), Observable((d_b + d_b.conj().T) / 2)
