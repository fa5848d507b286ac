"""Acceptance criteria as runnable checks.

Each ``criterion_*`` function returns a :class:`CriterionResult`; the same
functions back ``tests/test_acceptance.py`` and the ``edrlab suite``
command.  Tolerances are fixed here and are not meant to be tuned.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import bounds, geometry, qmodel, sampling, spinlab
from .qmodel import DensityOperator, pauli
from .relations import INFO_CONSTANT, RelationId, compute_inputs, evaluate_all, evaluate_inputs

N_THETA = 101
UNIVERSAL_TOL = 1e-9


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.number}. {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(number: int, name: str, fn) -> CriterionResult:
    t0 = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)


def _theta_grid() -> np.ndarray:
    return np.linspace(0.0, math.pi / 4, N_THETA)


def criterion_closed_forms(seed: int = 1, states_per_theta: int = 20) -> CriterionResult:
    z, x = pauli("Z"), pauli("X")

    def run():
        worst = 0.0
        rngs = sampling.draw_streams(seed, N_THETA)
        for theta, rng in zip(_theta_grid(), rngs):
            p = spinlab.build_spin_model(float(theta))
            eps_sq = 4 * math.sin(theta) ** 2
            eta_sq = 4 * math.sin(math.pi / 4 - theta) ** 2
            for _ in range(states_per_theta):
                rho = sampling.random_density(2, rng, rank=int(rng.integers(1, 3)))
                worst = max(
                    worst,
                    abs(qmodel.rms_error(p, z, rho) ** 2 - eps_sq),
                    abs(qmodel.rms_disturbance(p, x, rho) ** 2 - eta_sq),
                )
        return worst <= 1e-9, f"max deviation {worst:.2e} <= 1e-9"

    res = _timed(1, "spin closed forms", run)
    if res.seconds >= 5.0:
        return CriterionResult(1, res.name, False, res.detail + f"; runtime {res.seconds:.2f}s >= 5s", res.seconds)
    return res


CIRCLE_STATES = {
    "I/2": (0.0, 0.0, 0.0),
    "(I+Y)/2": (0.0, 1.0, 0.0),
    "(I-Y)/2": (0.0, -1.0, 0.0),
    "(I+0.5Y)/2": (0.0, 0.5, 0.0),
}


def criterion_circle_tightness() -> CriterionResult:
    def run():
        worst = 0.0
        for bloch in CIRCLE_STATES.values():
            rho = DensityOperator.from_bloch(*bloch)
            res = spinlab.sweep(0.0, math.pi / 4, N_THETA, rho)
            worst = max(worst, res.max_abs_circle_residual)
        return worst <= 1e-9, f"max |circle - 4| {worst:.2e} <= 1e-9 over {len(CIRCLE_STATES)} states"

    return _timed(2, "spin-circle tightness", run)


def criterion_mixed_separation() -> CriterionResult:
    def run():
        z, x = pauli("Z"), pauli("X")
        rho = DensityOperator.maximally_mixed(2)
        c, d = bounds.c_bound(z, x, rho), bounds.d_bound(z, x, rho)
        reps = {r.id: r for r in evaluate_all(spinlab.build_spin_model(math.pi / 8), z, x, rho,
                                              [RelationId.MIXED_EDR, RelationId.BRANCIARD])}
        ok = (
            abs(c) <= 1e-12
            and abs(d - 1.0) <= 1e-12
            and abs(reps[RelationId.MIXED_EDR].rhs - 1.0) <= 1e-12
            and abs(reps[RelationId.BRANCIARD].rhs) <= 1e-12
        )
        return ok, (
            f"C={c:.3g}, D={d:.15g}, mixed RHS={reps[RelationId.MIXED_EDR].rhs:.15g}, "
            f"Branciard RHS={reps[RelationId.BRANCIARD].rhs:.3g}"
        )

    return _timed(3, "mixed-state separation", run)


def criterion_extremal_points() -> CriterionResult:
    def run():
        z, x = pauli("Z"), pauli("X")
        rho = DensityOperator.maximally_mixed(2)
        p0, p1 = spinlab.build_spin_model(0.0), spinlab.build_spin_model(math.pi / 4)
        e0, h0 = qmodel.rms_error(p0, z, rho), qmodel.rms_disturbance(p0, x, rho)
        e1, h1 = qmodel.rms_error(p1, z, rho), qmodel.rms_disturbance(p1, x, rho)
        ok = (
            e0 <= 1e-9
            and abs(h0 - math.sqrt(2)) <= 1e-9
            and h1 <= 1e-9
            and abs(e1 - math.sqrt(2)) <= 1e-9
        )
        return ok, f"theta=0: eps={e0:.2e}, eta={h0:.15g}; theta=pi/4: eta={h1:.2e}, eps={e1:.15g}"

    return _timed(4, "extremal points", run)


# scenario -> relations checked on it; every listed relation is applicable there
UNIVERSALITY_PLAN = {
    "generic": (
        RelationId.OZAWA_EDR,
        RelationId.OZAWA_SECOND,
        RelationId.BRANCIARD,
        RelationId.MIXED_EDR,
        RelationId.GETRM,
        RelationId.ROBERTSON,
        RelationId.ROBERTSON_D,
        RelationId.ETRM,
    ),
    "joint": (
        RelationId.OZAWA_EDR,
        RelationId.OZAWA_SECOND,
        RelationId.BRANCIARD,
        RelationId.MIXED_EDR,
        RelationId.GETRM,
        RelationId.ETRM,
    ),
    "binary": (RelationId.BRANCIARD_BINARY, RelationId.MIXED_BINARY, RelationId.ETRMB, RelationId.GETRM),
    "joint_binary": (RelationId.BRANCIARD_BINARY, RelationId.MIXED_BINARY, RelationId.ETRMB),
    "circle": (RelationId.SPIN_CIRCLE, RelationId.MIXED_BINARY),
    "error_free": (RelationId.ERROR_FREE_COROLLARY,),
    "nondisturbing": (RelationId.NONDISTURBING_COROLLARY,),
}


def universality_scan(scenario: str, ids, draws: int, seed: int) -> dict:
    """Per relation: ``(evaluated, min residual, skipped)`` over seeded draws."""
    stats = {rid: [0, math.inf, 0] for rid in ids}
    for rng in sampling.draw_streams([seed, sum(map(ord, scenario))], draws):
        d = 2 if scenario == "circle" else int(rng.integers(2, 4))
        k = int(rng.integers(2, 4))
        model, a, b, rho = sampling.draw_scenario(scenario, d, k, rng)
        for rep in evaluate_all(model, a, b, rho, ids):
            st = stats[rep.id]
            if rep.skipped:
                st[2] += 1
                continue
            st[0] += 1
            st[1] = min(st[1], rep.residual)
    return {rid: tuple(v) for rid, v in stats.items()}


def criterion_universality(draws: int = 1000, seed: int = 2024) -> CriterionResult:
    def run():
        ok, worst, worst_id, total = True, math.inf, None, 0
        for scenario, ids in UNIVERSALITY_PLAN.items():
            for rid, (n, lo, skipped) in universality_scan(scenario, ids, draws, seed).items():
                total += n
                # every draw of a planned scenario must meet the relation's preconditions
                if skipped or n != draws or lo < -UNIVERSAL_TOL:
                    ok = False
                if lo < worst:
                    worst, worst_id = lo, f"{rid.name}/{scenario}"
        return ok, f"{total} evaluations, {draws} per (relation, scenario); min residual {worst:.2e} ({worst_id})"

    res = _timed(5, "universality suite", run)
    if res.seconds >= 60.0:
        return CriterionResult(5, res.name, False, res.detail + f"; runtime {res.seconds:.1f}s >= 60s", res.seconds)
    return res


def criterion_heisenberg_violation() -> CriterionResult:
    def run():
        rho = DensityOperator.from_bloch(0.0, 1.0, 0.0)
        (rep,) = evaluate_all(spinlab.build_spin_model(0.0), pauli("Z"), pauli("X"), rho, [RelationId.HEISENBERG_EDR])
        ok = abs(rep.residual + 1.0) <= 1e-9 and not rep.satisfied
        return ok, f"eps*eta={rep.lhs:.3g}, |C|={rep.rhs:.15g}, residual={rep.residual:.15g}"

    return _timed(6, "Heisenberg violability", run)


def bridge_errors(model: qmodel.MeasuringProcess, a, b, rho) -> dict:
    """Absolute defects of the proof-vector and purified-extension identities."""
    j = qmodel.to_joint_model(model, b)
    ms = qmodel.moments(j, a, b, rho)
    d_ab = bounds.d_bound(a, b, rho)
    v = geometry.construct_proof_vectors(j, a, b, rho, "tradeoff")
    ext = bounds.verify_extension_identities(bounds.build_extension(a, b, rho), model, a, b, rho)
    return {
        "(a,b)-D": abs(geometry.op_inner(v.a, v.b) - d_ab),
        "(m,n)": abs(geometry.op_inner(v.m, v.n)),
        "|a|-sigma(A)": abs(v.a.norm - ms.sigma_a),
        "|b|-sigma(B)": abs(v.b.norm - ms.sigma_b),
        "|m-a|-eps": abs((v.m - v.a).norm - ms.eps_a),
        "|n-b|-eta": abs((v.n - v.b).norm - ms.eps_b),
        "sigma(B'w)-sigma(B)": max(ext.sigma_bw - ext.sigma_b, 0.0),
        "eta(B'w)-eta": abs(ext.eta_bw - ext.eta_b),
        "C'-D": abs(ext.c_prime - ext.d_ab),
    }


BRIDGE_TOL = {"sigma(B'w)-sigma(B)": 1e-10}


def criterion_supplemental_bridge(draws: int = 500, seed: int = 7) -> CriterionResult:
    def run():
        worst: dict = {}
        for rng in sampling.draw_streams(seed, draws):
            d, k = int(rng.integers(2, 4)), int(rng.integers(2, 4))
            p, a, b, rho = sampling.draw_scenario("generic", d, k, rng)
            for key, val in bridge_errors(p, a, b, rho).items():
                worst[key] = max(worst.get(key, 0.0), val)
        ok = all(v <= BRIDGE_TOL.get(k, 1e-9) for k, v in worst.items())
        top = max(worst, key=worst.get)
        return ok, f"{draws} models; largest defect {worst[top]:.2e} ({top})"

    return _timed(7, "supplemental bridge", run)


def criterion_pure_collapse(draws: int = 500, seed: int = 11) -> CriterionResult:
    def run():
        worst_d, worst_rep = 0.0, 0.0
        for rng in sampling.draw_streams(seed, draws):
            d, k = int(rng.integers(2, 4)), int(rng.integers(2, 4))
            p, a, b, rho = sampling.draw_scenario("pure", d, k, rng)
            inp = compute_inputs(p, a, b, rho)
            worst_d = max(worst_d, abs(inp.bounds.d_ab - abs(inp.bounds.c_ab)))
            mixed = evaluate_inputs(RelationId.MIXED_EDR, inp)
            bran = evaluate_inputs(RelationId.BRANCIARD, inp)
            worst_rep = max(
                worst_rep,
                abs(mixed.lhs - bran.lhs),
                abs(mixed.rhs - bran.rhs),
                abs(mixed.residual - bran.residual),
            )
        ok = worst_d <= 1e-9 and worst_rep <= 1e-9
        return ok, f"max |D-|C|| {worst_d:.2e}, max report gap {worst_rep:.2e} (tol 1e-9)"

    return _timed(8, "pure-state collapse", run)


def info_theoretic_min_eta_sq(eps_sq: float = 0.0) -> float:
    """Smallest ``eta^2`` the entropic comparator allows at a given ``eps^2``."""
    return INFO_CONSTANT / (eps_sq + 1.0 / 3.0) - 1.0 / 3.0


def circle_min_eta_sq(eps_sq: float = 0.0) -> float:
    """Smallest ``eta^2`` allowed by the spin circle at a given ``eps^2`` (in [0, 4])."""
    return 2.0 - math.sqrt(max(4.0 - (eps_sq - 2.0) ** 2, 0.0))


def criterion_comparator_dominance() -> CriterionResult:
    def run():
        z, x = pauli("Z"), pauli("X")
        rho = DensityOperator.maximally_mixed(2)
        p = spinlab.build_spin_model(0.0)
        reps = {r.id: r for r in evaluate_all(p, z, x, rho, [RelationId.SPIN_CIRCLE, RelationId.INFO_THEORETIC_ZX])}
        circle, info = reps[RelationId.SPIN_CIRCLE], reps[RelationId.INFO_THEORETIC_ZX]
        eps_sq = qmodel.rms_error(p, z, rho) ** 2
        eta_sq = qmodel.rms_disturbance(p, x, rho) ** 2
        need_circle = circle_min_eta_sq(eps_sq)
        need_info = info_theoretic_min_eta_sq(eps_sq)
        ok = (
            abs(INFO_CONSTANT - 0.219) < 5e-4
            and circle.satisfied
            and abs(circle.residual) <= 1e-9
            and info.satisfied
            and abs(eta_sq - 2.0) <= 1e-9
            and abs(need_circle - 2.0) <= 1e-9
            and need_circle > need_info
        )
        return ok, (
            f"at eps=0 circle forces eta^2={need_circle:.12g}, comparator allows eta^2>={need_info:.6f}; "
            f"model eta^2={eta_sq:.12g}"
        )

    return _timed(9, "comparator dominance", run)


def run_all(draws: int = 1000, bridge_draws: int = 500, seed: int = 2024) -> list[CriterionResult]:
    return [
        criterion_closed_forms(),
        criterion_circle_tightness(),
        criterion_mixed_separation(),
        criterion_extremal_points(),
        criterion_universality(draws=draws, seed=seed),
        criterion_heisenberg_violation(),
        criterion_supplemental_bridge(draws=bridge_draws),
        criterion_pure_collapse(draws=bridge_draws),
        criterion_comparator_dominance(),
    ]
