"""Real inner-product geometry on operator space.

Operators are treated as real vectors with ``(X, Y) = Re Tr(X^dag Y)``.
The two geometric inequalities below hold for any vectors ``a, b, m, n``
with ``m`` orthogonal to ``n``; :func:`construct_proof_vectors` builds the
particular operator vectors whose inner products and norms are exactly the
moments and commutator bound of a joint measurement, which turns the
geometric inequalities into the error-tradeoff relations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bounds, qmodel
from .exceptions import DimensionMismatchError, PreconditionError
from .qmodel import DensityOperator, JointModel

ORTHO_TOL = 1e-8
NORM_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class OperatorVector:
    """An operator (or any complex/real array) viewed as a real vector."""

    value: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "value", np.asarray(self.value, dtype=complex))

    @property
    def norm(self) -> float:
        return math.sqrt(max(op_inner(self, self), 0.0))

    def __sub__(self, other: OperatorVector) -> OperatorVector:
        return OperatorVector(self.value - other.value)

    def __add__(self, other: OperatorVector) -> OperatorVector:
        return OperatorVector(self.value + other.value)

    def __rmul__(self, c: float) -> OperatorVector:
        return OperatorVector(c * self.value)


def _vec(x) -> np.ndarray:
    return x.value if isinstance(x, OperatorVector) else np.asarray(x)


def op_inner(x, y) -> float:
    """``Re Tr(x^dag y)``."""
    xv, yv = _vec(x), _vec(y)
    if xv.shape != yv.shape:
        raise DimensionMismatchError(f"inner product of shapes {xv.shape} and {yv.shape}")
    return float(np.vdot(xv, yv).real)


@dataclass(frozen=True, eq=False)
class ProofVectors:
    a: OperatorVector
    b: OperatorVector
    m: OperatorVector
    n: OperatorVector


def _root(x: float) -> float:
    return math.sqrt(max(x, 0.0))


def bgi_residuals(v: ProofVectors, with_normalized: bool = True) -> tuple[float | None, float]:
    """Residuals ``lhs - rhs`` of the two geometric inequalities.

    The first uses the normalized directions of ``m`` and ``n`` and is only
    computed when ``with_normalized`` is set (``None`` otherwise).
    """
    a, b, m, n = v.a, v.b, v.m, v.n
    if abs(op_inner(m, n)) > ORTHO_TOL * max(1.0, m.norm * n.norm):
        raise PreconditionError(f"m and n are not orthogonal: (m, n) = {op_inner(m, n):.3e}")
    na2, nb2, ab = op_inner(a, a), op_inner(b, b), op_inner(a, b)
    gram = _root(na2 * nb2 - ab * ab)

    first = None
    if with_normalized:
        if m.norm < NORM_FLOOR or n.norm < NORM_FLOOR:
            raise PreconditionError("m and n must be nonzero for the normalized inequality")
        pa = na2 - (op_inner(a, m) / m.norm) ** 2
        pb = nb2 - (op_inner(b, n) / n.norm) ** 2
        lhs1 = pa * nb2 + na2 * pb + 2.0 * _root(pa) * _root(pb) * gram
        first = lhs1 - ab * ab

    am, bn = (a - m).norm, (b - n).norm
    lhs3 = am * am * nb2 + na2 * bn * bn + 2.0 * am * bn * gram
    return first, lhs3 - ab * ab


def construct_proof_vectors(
    j: JointModel, a, b, rho: DensityOperator, variant: str = "tradeoff"
) -> ProofVectors:
    """Operator vectors on system (x) probe tying the joint model to the geometry.

    ``tradeoff`` centres the outputs at the system means of ``A`` and ``B``;
    ``getrm`` centres each output at its own mean.
    """
    a, b = qmodel.as_observable(a), qmodel.as_observable(b)
    if variant not in ("tradeoff", "getrm"):
        raise ValueError(f"variant must be 'tradeoff' or 'getrm', got {variant!r}")
    d, k = j.sys_dim, j.probe_dim
    if not (a.dim == b.dim == rho.dim == d):
        raise DimensionMismatchError("observables, state and joint model disagree on the system dimension")

    w = bounds.sign_operator(a, b, rho)
    s = rho.sqrt_rho
    proj = np.outer(j.probe_state, j.probe_state.conj())
    eye_d, eye_n = np.eye(d), np.eye(d * k)
    mean_a = rho.expect(a).real
    mean_b = rho.expect(b).real
    a0 = a.matrix - mean_a * eye_d
    b0 = b.matrix - mean_b * eye_d

    if variant == "tradeoff":
        shift_a, shift_b = mean_a, mean_b
    else:
        state = np.kron(rho.rho, proj)
        shift_a = np.trace(j.cal_a.matrix @ state).real
        shift_b = np.trace(j.cal_b.matrix @ state).real
    cal_a0 = j.cal_a.matrix - shift_a * eye_n
    cal_b0 = j.cal_b.matrix - shift_b * eye_n

    s_xi = np.kron(s, proj)
    sw_xi = np.kron(s @ w, proj)
    return ProofVectors(
        a=OperatorVector(np.kron(a0 @ s, proj)),
        b=OperatorVector(-1j * np.kron(b0 @ s @ w, proj)),
        m=OperatorVector(cal_a0 @ s_xi),
        n=OperatorVector(-1j * cal_b0 @ sw_xi),
    )
