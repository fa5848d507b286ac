"""The one-parameter qubit measurement family that saturates the spin circle.

A controlled-NOT preceded by the probe rotation
``cos(theta) Z' + sin(theta) X'`` measures ``Z`` with
``eps(Z)^2 = 4 sin^2(theta)`` while disturbing ``X`` by
``eta(X)^2 = 4 sin^2(pi/4 - theta)`` in every input state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import sampling
from .qmodel import (
    DensityOperator,
    JointModel,
    MeasuringProcess,
    Observable,
    pauli,
    rms_disturbance,
    rms_error,
)
from .relations import (
    BINARY_FAMILY,
    RelationId,
    RelationReport,
    evaluate_all,
)

_KET0 = np.array([1.0, 0.0], dtype=complex)


@dataclass(frozen=True)
class SpinModelParams:
    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")

    @property
    def reduced_theta(self) -> float:
        """``theta`` modulo pi; both closed forms have period pi."""
        return math.fmod(self.theta, math.pi) % math.pi


def _params(p) -> SpinModelParams:
    return p if isinstance(p, SpinModelParams) else SpinModelParams(float(p))


def controlled_not() -> np.ndarray:
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return np.kron(p0, np.eye(2)) + np.kron(p1, pauli("X").matrix)


def probe_rotation(theta: float) -> np.ndarray:
    return math.cos(theta) * pauli("Z").matrix + math.sin(theta) * pauli("X").matrix


def build_spin_model(params) -> MeasuringProcess:
    theta = _params(params).theta
    u = controlled_not() @ np.kron(np.eye(2), probe_rotation(theta))
    return MeasuringProcess(sys_dim=2, probe_dim=2, probe_state=_KET0, interaction=u, meter=pauli("Z"))


def closed_form(params) -> tuple[float, float]:
    """``(eps(Z)^2, eta(X)^2)`` of the spin model, independent of the state."""
    theta = _params(params).theta
    return 4.0 * math.sin(theta) ** 2, 4.0 * math.sin(math.pi / 4 - theta) ** 2


def circle_residual(eps_sq: float, eta_sq: float) -> float:
    """Signed deviation ``(eps^2-2)^2 + (eta^2-2)^2 - 4``; zero on the tight boundary."""
    return (eps_sq - 2.0) ** 2 + (eta_sq - 2.0) ** 2 - 4.0


def state_independence_check(params, states) -> float:
    p = build_spin_model(params)
    eps_sq, eta_sq = closed_form(params)
    z, x = pauli("Z"), pauli("X")
    dev = 0.0
    for rho in states:
        if rho.dim != 2:
            raise ValueError("spin model states must be qubit states")
        dev = max(dev, abs(rms_error(p, z, rho) ** 2 - eps_sq), abs(rms_disturbance(p, x, rho) ** 2 - eta_sq))
    return dev


@dataclass(frozen=True)
class SweepPoint:
    theta: float
    eps_sq: float
    eta_sq: float
    circle_residual: float
    residuals: dict = field(default_factory=dict)
    reports: tuple = ()


@dataclass(frozen=True)
class SweepResult:
    grid: list
    min_abs_circle_residual: float
    argmin_theta: float
    max_abs_circle_residual: float


def sweep(theta_min: float, theta_max: float, steps: int, rho: DensityOperator, ids=()) -> SweepResult:
    """Evaluate the spin family on an evenly spaced theta grid.

    ``eps_sq``/``eta_sq`` come from the explicit 4x4 model, not the closed
    form.  Relations whose preconditions fail at ``rho`` are left out of
    ``residuals`` (their reports still carry the reason).
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    z, x = pauli("Z"), pauli("X")
    ids = list(ids)
    grid = []
    for theta in np.linspace(theta_min, theta_max, steps):
        p = build_spin_model(float(theta))
        eps_sq = rms_error(p, z, rho) ** 2
        eta_sq = rms_disturbance(p, x, rho) ** 2
        reports = tuple(evaluate_all(p, z, x, rho, ids)) if ids else ()
        grid.append(
            SweepPoint(
                theta=float(theta),
                eps_sq=eps_sq,
                eta_sq=eta_sq,
                circle_residual=circle_residual(eps_sq, eta_sq),
                residuals={r.id: r.residual for r in reports if not r.skipped},
                reports=reports,
            )
        )
    abs_res = [abs(pt.circle_residual) for pt in grid]
    best = int(np.argmin(abs_res))  # first index wins ties, i.e. smaller theta
    return SweepResult(
        grid=grid,
        min_abs_circle_residual=abs_res[best],
        argmin_theta=grid[best].theta,
        max_abs_circle_residual=max(abs_res),
    )


# -- random search -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModelDescriptor:
    draw: int
    scenario: str
    model: MeasuringProcess | JointModel
    a: Observable
    b: Observable
    rho: DensityOperator
    report: RelationReport


_SCENARIO_FOR = {
    RelationId.HEISENBERG_EDR: "zx",
    RelationId.INFO_THEORETIC_ZX: "zx",
    RelationId.SPIN_CIRCLE: "circle",
    RelationId.ERROR_FREE_COROLLARY: "error_free",
    RelationId.NONDISTURBING_COROLLARY: "nondisturbing",
}


def default_scenario(objective: RelationId) -> str:
    if objective in _SCENARIO_FOR:
        return _SCENARIO_FOR[objective]
    return "binary" if objective in BINARY_FAMILY else "generic"


def random_model_search(
    sys_dim: int,
    probe_dim: int,
    draws: int,
    seed: int | None,
    objective: RelationId,
    scenario: str | None = None,
) -> tuple[float, ModelDescriptor | None]:
    """Smallest residual of ``objective`` over seeded random models.

    Scenarios are those of :func:`edrlab.sampling.draw_scenario`; the
    default depends on the objective.  Ties keep the earlier draw.  Draws
    whose preconditions fail are skipped; if all do, ``(inf, None)`` is
    returned.
    """
    if draws < 1:
        raise ValueError("draws must be at least 1")
    scenario = scenario or default_scenario(objective)
    best, best_desc = math.inf, None
    for i, rng in enumerate(sampling.draw_streams(seed, draws)):
        p, a, b, rho = sampling.draw_scenario(scenario, sys_dim, probe_dim, rng)
        (rep,) = evaluate_all(p, a, b, rho, [objective])
        if rep.skipped:
            continue
        if rep.residual < best:
            best = rep.residual
            best_desc = ModelDescriptor(draw=i, scenario=scenario, model=p, a=a, b=b, rho=rho, report=rep)
    return best, best_desc
