"""Uniform evaluation of the error-disturbance and error-tradeoff inequalities.

Every relation is written as ``lhs >= rhs`` and reported with
``residual = lhs - rhs``; a relation is satisfied when the residual is at
least ``-tol``.  The quantities entering all relations are gathered once per
``(model, A, B, rho)`` in :class:`RelationInputs` and shared by
:func:`evaluate_all`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds, linalg, qmodel
from .exceptions import InconsistentInputError, PreconditionError
from .qmodel import DensityOperator, MomentSet

DEFAULT_TOL = 1e-9
PRECONDITION_TOL = 1e-10
RADICAND_TOL = 1e-10
ZERO_ERROR_TOL = 1e-9
INFO_CONSTANT = 16.0 / (math.pi**2 * math.e**2)


class RelationId(enum.Enum):
    """One member per inequality; the value is a short human description."""

    OZAWA_EDR = "eps*eta + eps*sigma(B) + sigma(A)*eta >= |C|"
    OZAWA_SECOND = "eps*eta + |<[n(A),B]> + <[A,d(B)]>| >= |C|"
    ERROR_FREE_COROLLARY = "eps(A)=0  =>  sigma(A)*eta(B) >= |C|"
    NONDISTURBING_COROLLARY = "eta(B)=0  =>  eps(A)*sigma(B) >= |C|"
    HEISENBERG_EDR = "eps*eta >= |C|  (comparator, violable)"
    BRANCIARD = "eps^2 sB^2 + sA^2 eta^2 + 2 eps eta sqrt(sA^2 sB^2 - C^2) >= C^2"
    BRANCIARD_BINARY = "epsh^2 + etah^2 + 2 epsh etah sqrt(1 - C^2) >= C^2  (binary)"
    INFO_THEORETIC_ZX = "(eps^2 + 1/3)(eta^2 + 1/3) >= 16/(pi^2 e^2)  (comparator, Z/X at I/2)"
    MIXED_EDR = "eps^2 sB^2 + sA^2 eta^2 + 2 eps eta sqrt(sA^2 sB^2 - D^2) >= D^2"
    MIXED_BINARY = "epsh^2 + etah^2 + 2 epsh etah sqrt(1 - D^2) >= D^2  (binary)"
    SPIN_CIRCLE = "4 >= (eps^2 - 2)^2 + (eta^2 - 2)^2  (binary, D = 1)"
    GETRM = "E_A^2 sB^2 + sA^2 E_B^2 + 2 E_A E_B sqrt(sA^2 sB^2 - D^2) >= D^2"
    ROBERTSON = "sigma(A) sigma(B) >= |C|"
    ROBERTSON_D = "sigma(A) sigma(B) >= D"
    ETRM = "eps_A^2 sB^2 + sA^2 eps_B^2 + 2 eps_A eps_B sqrt(sA^2 sB^2 - D^2) >= D^2  (joint)"
    ETRMB = "epsh_A^2 + epsh_B^2 + 2 epsh_A epsh_B sqrt(1 - D^2) >= D^2  (joint, binary)"

    @property
    def is_comparator(self) -> bool:
        return self in COMPARATORS

    @classmethod
    def parse(cls, name: str) -> RelationId:
        try:
            return cls[name.strip().upper().replace("-", "_")]
        except KeyError:
            raise ValueError(f"unknown relation {name!r}") from None


COMPARATORS = frozenset({RelationId.HEISENBERG_EDR, RelationId.INFO_THEORETIC_ZX})
BINARY_FAMILY = frozenset(
    {RelationId.BRANCIARD_BINARY, RelationId.MIXED_BINARY, RelationId.SPIN_CIRCLE, RelationId.ETRMB}
)
UNIVERSAL = tuple(r for r in RelationId if r not in COMPARATORS)


@dataclass(frozen=True)
class RelationInputs:
    """Snapshot of every quantity any relation needs."""

    moments: MomentSet
    bounds: bounds.BoundPair
    first_moment_term: float
    mean_a: float
    mean_b: float
    binary_defect: float
    is_zx_half: bool

    @property
    def binary_ok(self) -> bool:
        return self.binary_defect <= PRECONDITION_TOL


def _square_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m @ m - np.eye(m.shape[0]))))


def compute_inputs(model, a, b, rho: DensityOperator) -> RelationInputs:
    """Gather moments, bounds and precondition data for ``model`` in ``rho``.

    ``model`` may be a :class:`MeasuringProcess` (errors of the meter and
    disturbance of ``B``) or a :class:`JointModel`.
    """
    a, b = qmodel.as_observable(a), qmodel.as_observable(b)
    j = qmodel.as_joint_model(model, b)
    ms = qmodel.moments(j, a, b, rho)
    bp = bounds.bound_pair(a, b, rho)
    n_a, d_b = qmodel.first_moment_operators(j, a, b)
    term = rho.expect(linalg.commutator(n_a.matrix, b.matrix)) + rho.expect(
        linalg.commutator(a.matrix, d_b.matrix)
    )
    defect = max(
        _square_defect(a.matrix),
        _square_defect(b.matrix),
        _square_defect(j.cal_a.matrix),
        _square_defect(j.cal_b.matrix),
    )
    zx = (
        a.dim == 2
        and np.max(np.abs(a.matrix - qmodel.pauli("Z").matrix)) <= PRECONDITION_TOL
        and np.max(np.abs(b.matrix - qmodel.pauli("X").matrix)) <= PRECONDITION_TOL
        and np.max(np.abs(rho.rho - np.eye(2) / 2)) <= PRECONDITION_TOL
    )
    return RelationInputs(
        moments=ms,
        bounds=bp,
        first_moment_term=float(abs(term)),
        mean_a=float(rho.expect(a).real),
        mean_b=float(rho.expect(b).real),
        binary_defect=defect,
        is_zx_half=bool(zx),
    )


@dataclass(frozen=True)
class RelationReport:
    id: RelationId
    lhs: float
    rhs: float
    residual: float
    satisfied: bool
    inputs: RelationInputs | None
    preconditions_met: bool = True
    diagnostic: str = ""
    tolerance: float = DEFAULT_TOL

    @property
    def skipped(self) -> bool:
        return not self.preconditions_met

    @property
    def comparator(self) -> bool:
        return self.id.is_comparator


def _root(x: float, what: str) -> float:
    if x < -RADICAND_TOL:
        raise InconsistentInputError(f"radicand of {what} is {x:.3e} < 0")
    return math.sqrt(max(x, 0.0))


def hat(e: float) -> float:
    """``e * sqrt(1 - e^2/4)``, the binary-rescaled error."""
    return e * _root(1.0 - e * e / 4.0, "binary rescaling")


def error_profile(sigma: float, sigma_out: float, eps: float, delta: float) -> float:
    """Bias- and spread-adjusted error ``E_{sigma_out, delta}``."""
    proj = (sigma**2 + sigma_out**2 - (eps**2 - delta**2)) / (2.0 * sigma_out)
    return _root(sigma**2 - proj**2, "adjusted error")


def _tradeoff(ea: float, eb: float, sa: float, sb: float, bound: float) -> tuple[float, float]:
    cross = _root(sa * sa * sb * sb - bound * bound, "uncertainty product")
    lhs = ea * ea * sb * sb + sa * sa * eb * eb + 2.0 * ea * eb * cross
    return lhs, bound * bound


def _binary_tradeoff(ea: float, eb: float, bound: float) -> tuple[float, float]:
    ha, hb = hat(ea), hat(eb)
    cross = _root(1.0 - bound * bound, "binary bound")
    return ha * ha + hb * hb + 2.0 * ha * hb * cross, bound * bound


def _require_binary(inp: RelationInputs) -> None:
    if not inp.binary_ok:
        raise PreconditionError(
            f"precondition A^2=B^2=I and output squares = I failed (defect {inp.binary_defect:.3e})"
        )
    if abs(inp.mean_a) > PRECONDITION_TOL:
        raise PreconditionError(f"precondition ⟨A⟩=0 failed (⟨A⟩ = {inp.mean_a:.6g})")
    if abs(inp.mean_b) > PRECONDITION_TOL:
        raise PreconditionError(f"precondition ⟨B⟩=0 failed (⟨B⟩ = {inp.mean_b:.6g})")


def _sides(rid: RelationId, inp: RelationInputs) -> tuple[float, float]:
    m, c, d = inp.moments, abs(inp.bounds.c_ab), inp.bounds.d_ab
    ea, eb, sa, sb = m.eps_a, m.eps_b, m.sigma_a, m.sigma_b

    if rid is RelationId.OZAWA_EDR:
        return ea * eb + ea * sb + sa * eb, c
    if rid is RelationId.OZAWA_SECOND:
        return ea * eb + inp.first_moment_term, c
    if rid is RelationId.ERROR_FREE_COROLLARY:
        if ea > ZERO_ERROR_TOL:
            raise PreconditionError(f"precondition eps(A)=0 failed (eps = {ea:.3e})")
        return sa * eb, c
    if rid is RelationId.NONDISTURBING_COROLLARY:
        if eb > ZERO_ERROR_TOL:
            raise PreconditionError(f"precondition eta(B)=0 failed (eta = {eb:.3e})")
        return ea * sb, c
    if rid is RelationId.HEISENBERG_EDR:
        return ea * eb, c
    if rid is RelationId.BRANCIARD:
        return _tradeoff(ea, eb, sa, sb, c)
    if rid in (RelationId.MIXED_EDR, RelationId.ETRM):
        return _tradeoff(ea, eb, sa, sb, d)
    if rid is RelationId.BRANCIARD_BINARY:
        _require_binary(inp)
        return _binary_tradeoff(ea, eb, c)
    if rid in (RelationId.MIXED_BINARY, RelationId.ETRMB):
        _require_binary(inp)
        return _binary_tradeoff(ea, eb, d)
    if rid is RelationId.SPIN_CIRCLE:
        _require_binary(inp)
        if abs(d - 1.0) > PRECONDITION_TOL:
            raise PreconditionError(f"precondition D_AB=1 failed (D = {d:.12g})")
        return 4.0, (ea * ea - 2.0) ** 2 + (eb * eb - 2.0) ** 2
    if rid is RelationId.INFO_THEORETIC_ZX:
        if not inp.is_zx_half:
            raise PreconditionError("precondition A=Z, B=X, rho=I/2 failed")
        return (ea * ea + 1.0 / 3.0) * (eb * eb + 1.0 / 3.0), INFO_CONSTANT
    if rid is RelationId.GETRM:
        if not m.sigma_cal_nonzero:
            raise PreconditionError(
                f"precondition sigma of outputs nonzero failed ({m.sigma_cal_a:.3e}, {m.sigma_cal_b:.3e})"
            )
        e_a = error_profile(sa, m.sigma_cal_a, ea, m.delta_a)
        e_b = error_profile(sb, m.sigma_cal_b, eb, m.delta_b)
        return _tradeoff(e_a, e_b, sa, sb, d)
    if rid is RelationId.ROBERTSON:
        return sa * sb, c
    if rid is RelationId.ROBERTSON_D:
        return sa * sb, d
    raise ValueError(f"unhandled relation {rid}")  # pragma: no cover


def evaluate_inputs(rid: RelationId, inp: RelationInputs, tol: float = DEFAULT_TOL) -> RelationReport:
    """Evaluate one relation on precomputed inputs; raises on failed preconditions."""
    lhs, rhs = _sides(rid, inp)
    residual = lhs - rhs
    return RelationReport(
        id=rid,
        lhs=lhs,
        rhs=rhs,
        residual=residual,
        satisfied=bool(residual >= -tol),
        inputs=inp,
        tolerance=tol,
    )


def evaluate(rid: RelationId, model, a, b, rho: DensityOperator, tol: float = DEFAULT_TOL) -> RelationReport:
    """Evaluate a single relation.

    Raises
    ------
    PreconditionError
        If the inputs lie outside the relation's domain.
    InconsistentInputError
        If a radicand that is nonnegative for valid inputs is clearly negative.
    """
    return evaluate_inputs(rid, compute_inputs(model, a, b, rho), tol)


def skipped_report(rid: RelationId, inp: RelationInputs | None, reason: str, tol: float = DEFAULT_TOL) -> RelationReport:
    nan = float("nan")
    return RelationReport(
        id=rid,
        lhs=nan,
        rhs=nan,
        residual=nan,
        satisfied=False,
        inputs=inp,
        preconditions_met=False,
        diagnostic=reason,
        tolerance=tol,
    )


def evaluate_all(model, a, b, rho: DensityOperator, ids=None, tol: float = DEFAULT_TOL) -> list[RelationReport]:
    """One report per requested relation, in request order.

    Relations whose preconditions fail come back as skipped reports carrying
    the reason instead of being dropped.
    """
    ids = list(RelationId) if ids is None else list(ids)
    inp = compute_inputs(model, a, b, rho)
    out = []
    for rid in ids:
        try:
            out.append(evaluate_inputs(rid, inp, tol))
        except PreconditionError as exc:
            out.append(skipped_report(rid, inp, str(exc), tol))
    return out


@dataclass(frozen=True)
class CorollaryReport:
    error_free: RelationReport
    nondisturbing: RelationReport
    commutator_half: float = field(default=0.0)

    @property
    def applicable(self) -> bool:
        return not (self.error_free.skipped and self.nondisturbing.skipped)

    @property
    def satisfied(self) -> bool:
        return all(r.satisfied for r in (self.error_free, self.nondisturbing) if not r.skipped)


def corollary_check(p, a, b, rho: DensityOperator, tol: float = DEFAULT_TOL) -> CorollaryReport:
    """Check the error-free and non-disturbing special cases where they apply."""
    ef, nd = evaluate_all(
        p, a, b, rho, [RelationId.ERROR_FREE_COROLLARY, RelationId.NONDISTURBING_COROLLARY], tol
    )
    return CorollaryReport(error_free=ef, nondisturbing=nd, commutator_half=abs(ef.inputs.bounds.c_ab))
