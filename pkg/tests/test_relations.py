import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edrlab import relations
from edrlab.exceptions import InconsistentInputError, PreconditionError
from edrlab.qmodel import DensityOperator, JointModel, MeasuringProcess, Observable, pauli
from edrlab.relations import (
    BINARY_FAMILY,
    COMPARATORS,
    INFO_CONSTANT,
    RelationId,
    compute_inputs,
    corollary_check,
    evaluate,
    evaluate_all,
)
from edrlab.sampling import draw_scenario
from edrlab.spinlab import build_spin_model

from conftest import I2, KET0, X, Z, oracle_c_bound, oracle_d_bound, oracle_rms, oracle_std

seeds = st.integers(min_value=0, max_value=2**32 - 1)
HALF = DensityOperator.maximally_mixed(2)
Y_UP = DensityOperator.from_bloch(0, 1, 0)
ZOP, XOP = pauli("Z"), pauli("X")


def by_id(reports):
    return {r.id: r for r in reports}


def oracle_quantities(p, a, b, rho):
    u, xi = p.interaction, p.probe_state
    k = p.probe_dim
    m_out = u.conj().T @ np.kron(np.eye(p.sys_dim), p.meter.matrix) @ u
    b_out = u.conj().T @ np.kron(b, np.eye(k)) @ u
    eps = oracle_rms(m_out - np.kron(a, np.eye(k)), rho, xi)
    eta = oracle_rms(b_out - np.kron(b, np.eye(k)), rho, xi)
    return eps, eta, oracle_std(a, rho), oracle_std(b, rho), oracle_c_bound(a, b, rho), oracle_d_bound(a, b, rho)


class TestSpinExamples:
    def test_circle_equality_at_zero(self):
        rep = evaluate(RelationId.SPIN_CIRCLE, build_spin_model(0.0), ZOP, XOP, HALF)
        assert rep.lhs == 4
        assert rep.rhs == pytest.approx(4, abs=1e-12)
        assert rep.residual == pytest.approx(0, abs=1e-12)
        assert rep.satisfied

    def test_mixed_binary_tight_off_axis(self):
        p = build_spin_model(math.pi / 8)
        rep = evaluate(RelationId.MIXED_BINARY, p, ZOP, XOP, HALF)
        eps_sq = 4 * math.sin(math.pi / 8) ** 2
        assert eps_sq * (1 - eps_sq / 4) == pytest.approx(0.5)
        assert rep.lhs == pytest.approx(1, abs=1e-12)
        assert rep.rhs == pytest.approx(1, abs=1e-12)
        assert rep.residual == pytest.approx(0, abs=1e-12)

    def test_heisenberg_violated(self):
        rep = evaluate(RelationId.HEISENBERG_EDR, build_spin_model(0.0), ZOP, XOP, Y_UP)
        assert rep.lhs == pytest.approx(0, abs=1e-12)
        assert rep.rhs == pytest.approx(1)
        assert rep.residual == pytest.approx(-1, abs=1e-9)
        assert not rep.satisfied
        assert rep.comparator

    def test_mixed_vs_branciard(self):
        reps = by_id(
            evaluate_all(build_spin_model(math.pi / 8), ZOP, XOP, HALF, [RelationId.MIXED_EDR, RelationId.BRANCIARD])
        )
        assert reps[RelationId.BRANCIARD].rhs == pytest.approx(0, abs=1e-15)
        assert reps[RelationId.MIXED_EDR].rhs == pytest.approx(1, abs=1e-12)
        # sigma = 1 and D = 1 kill the cross term, leaving eps^2 + eta^2
        assert reps[RelationId.MIXED_EDR].lhs == pytest.approx(8 * math.sin(math.pi / 8) ** 2, abs=1e-12)
        assert reps[RelationId.MIXED_EDR].lhs == pytest.approx(1.1716, abs=1e-4)

    def test_evaluate_all_at_zero(self):
        reps = by_id(evaluate_all(build_spin_model(0.0), ZOP, XOP, HALF))
        assert reps[RelationId.SPIN_CIRCLE].residual == pytest.approx(0, abs=1e-12)
        assert reps[RelationId.BRANCIARD].rhs == pytest.approx(0, abs=1e-15)
        # with C = 0 the comparator holds with equality at I/2; it fails once <Y> != 0
        assert reps[RelationId.HEISENBERG_EDR].residual == pytest.approx(0, abs=1e-12)
        for r in reps.values():
            assert r.skipped or r.satisfied or r.comparator, r.id
        assert reps[RelationId.INFO_THEORETIC_ZX].lhs == pytest.approx(7 / 9)

    def test_all_pass_except_comparator_at_y_state(self):
        reps = evaluate_all(build_spin_model(0.0), ZOP, XOP, Y_UP)
        failing = {r.id for r in reps if not r.skipped and not r.satisfied}
        assert failing == {RelationId.HEISENBERG_EDR}

    @pytest.mark.parametrize("theta", np.linspace(0, math.pi / 4, 9))
    def test_getrm_reduces_to_mixed_binary(self, theta):
        reps = by_id(
            evaluate_all(build_spin_model(theta), ZOP, XOP, HALF, [RelationId.GETRM, RelationId.MIXED_BINARY])
        )
        assert reps[RelationId.GETRM].residual == pytest.approx(reps[RelationId.MIXED_BINARY].residual, abs=1e-9)


class TestCommutingPair:
    def test_all_vacuous(self, rng):
        p = draw_scenario("generic", 2, 2, rng)[0]
        for r in evaluate_all(p, ZOP, ZOP, HALF):
            if r.skipped:
                continue
            if r.id is not RelationId.INFO_THEORETIC_ZX:
                assert r.rhs == 0
            assert r.residual >= 0
            assert r.satisfied

    def test_corollary_trivial(self):
        p = MeasuringProcess(2, 2, KET0, np.eye(4), ZOP)
        rep = corollary_check(p, ZOP, ZOP, HALF)
        # U = I: meter Z' on |0'> misses Z, but Z is never disturbed
        assert rep.error_free.skipped
        assert not rep.nondisturbing.skipped
        assert rep.nondisturbing.rhs == 0
        assert rep.satisfied


class TestCorollaries:
    def test_error_free(self):
        rep = corollary_check(build_spin_model(0.0), ZOP, XOP, Y_UP)
        ef = rep.error_free
        assert not ef.skipped
        assert ef.lhs == pytest.approx(math.sqrt(2))
        assert ef.rhs == pytest.approx(1)
        assert rep.nondisturbing.skipped
        assert rep.satisfied and rep.applicable

    def test_nondisturbing(self):
        rep = corollary_check(build_spin_model(math.pi / 4), ZOP, XOP, Y_UP)
        nd = rep.nondisturbing
        assert not nd.skipped
        assert nd.lhs == pytest.approx(math.sqrt(2))
        assert nd.rhs == pytest.approx(1)
        assert rep.satisfied

    def test_evaluate_raises_outside_domain(self):
        with pytest.raises(PreconditionError, match="eps"):
            evaluate(RelationId.ERROR_FREE_COROLLARY, build_spin_model(0.4), ZOP, XOP, HALF)


class TestPreconditions:
    def test_mean_a_message(self):
        rho = DensityOperator.from_bloch(0, 0, 0.3)
        (rep,) = evaluate_all(build_spin_model(0.0), ZOP, XOP, rho, [RelationId.MIXED_BINARY])
        assert rep.skipped
        assert "precondition ⟨A⟩=0 failed" in rep.diagnostic
        assert math.isnan(rep.residual)
        assert not rep.satisfied

    def test_binary_spectrum(self, rng):
        p, a, b, rho = draw_scenario("generic", 2, 2, rng)
        with pytest.raises(PreconditionError, match="A\\^2=B\\^2=I"):
            evaluate(RelationId.BRANCIARD_BINARY, p, a, b, rho)

    def test_spin_circle_needs_unit_d(self):
        # D = 0 for a Z eigenstate
        rho = DensityOperator.from_bloch(0, 0, 0)
        rho_z = DensityOperator(np.diag([1.0, 0.0]))
        with pytest.raises(PreconditionError):
            evaluate(RelationId.SPIN_CIRCLE, build_spin_model(0.2), ZOP, XOP, rho_z)
        assert evaluate(RelationId.SPIN_CIRCLE, build_spin_model(0.2), ZOP, XOP, rho).satisfied

    def test_info_needs_zx_half(self):
        with pytest.raises(PreconditionError, match="A=Z, B=X"):
            evaluate(RelationId.INFO_THEORETIC_ZX, build_spin_model(0.2), ZOP, XOP, Y_UP)

    def test_getrm_needs_output_spread(self):
        j = JointModel(2, 2, KET0, Observable(np.eye(4)), Observable(np.kron(X, I2)))
        with pytest.raises(PreconditionError, match="sigma of outputs"):
            evaluate(RelationId.GETRM, j, ZOP, XOP, HALF)


class TestFormulas:
    def test_info_constant(self):
        assert INFO_CONSTANT == pytest.approx(0.219, abs=5e-4)
        assert INFO_CONSTANT == pytest.approx(16 / (math.pi**2 * math.e**2), rel=1e-15)

    def test_hat(self):
        assert relations.hat(0.0) == 0
        assert relations.hat(math.sqrt(2)) == pytest.approx(1)
        assert relations.hat(2.0) == 0
        with pytest.raises(InconsistentInputError):
            relations.hat(2.5)

    def test_error_profile_unbiased_binary(self):
        # sigma = sigma_out = 1, no bias: E^2 = eps^2 - eps^4/4
        for eps in np.linspace(0, 2, 11):
            assert relations.error_profile(1.0, 1.0, eps, 0.0) ** 2 == pytest.approx(eps**2 - eps**4 / 4, abs=1e-12)

    def test_error_profile_inconsistent(self):
        with pytest.raises(InconsistentInputError):
            relations.error_profile(1.0, 1.0, 5.0, 0.0)

    def test_parse(self):
        assert RelationId.parse("mixed-edr") is RelationId.MIXED_EDR
        with pytest.raises(ValueError):
            RelationId.parse("nope")

    def test_groups(self):
        assert COMPARATORS == {RelationId.HEISENBERG_EDR, RelationId.INFO_THEORETIC_ZX}
        assert RelationId.SPIN_CIRCLE in BINARY_FAMILY
        assert not set(relations.UNIVERSAL) & COMPARATORS


class TestOracleFormulas:
    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_general_relations(self, seed):
        r = np.random.default_rng(seed)
        p, a, b, rho = draw_scenario("generic", int(r.integers(2, 4)), int(r.integers(2, 4)), r)
        eps, eta, sa, sb, c, d = oracle_quantities(p, a.matrix, b.matrix, rho.rho.copy())
        reps = by_id(evaluate_all(p, a, b, rho))

        oz = reps[RelationId.OZAWA_EDR]
        assert oz.lhs == pytest.approx(eps * eta + eps * sb + sa * eta, abs=1e-6)
        assert oz.rhs == pytest.approx(abs(c), abs=1e-9)
        br = reps[RelationId.BRANCIARD]
        assert br.lhs == pytest.approx(
            eps**2 * sb**2 + sa**2 * eta**2 + 2 * eps * eta * math.sqrt(sa**2 * sb**2 - c**2), abs=1e-6
        )
        mx = reps[RelationId.MIXED_EDR]
        assert mx.rhs == pytest.approx(d**2, abs=1e-6)
        rd = reps[RelationId.ROBERTSON_D]
        assert rd.lhs == pytest.approx(sa * sb, abs=1e-9)
        # a process-derived joint model gives ETRM exactly MIXED_EDR
        assert reps[RelationId.ETRM].residual == pytest.approx(mx.residual, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_second_relation_term(self, seed):
        r = np.random.default_rng(seed)
        p, a, b, rho = draw_scenario("generic", 2, 3, r)
        inp = compute_inputs(p, a, b, rho)
        # <[n(A), B]> + <[A, d(B)]> rebuilt from full-space traces
        k = p.probe_dim
        state = np.kron(rho.rho, np.outer(p.probe_state, p.probe_state.conj()))
        u = p.interaction
        n = u.conj().T @ np.kron(np.eye(2), p.meter.matrix) @ u - np.kron(a.matrix, np.eye(k))
        dist = u.conj().T @ np.kron(b.matrix, np.eye(k)) @ u - np.kron(b.matrix, np.eye(k))
        bb, aa = np.kron(b.matrix, np.eye(k)), np.kron(a.matrix, np.eye(k))
        term = np.trace((n @ bb - bb @ n) @ state) + np.trace((aa @ dist - dist @ aa) @ state)
        assert inp.first_moment_term == pytest.approx(abs(term), abs=1e-10)


SCENARIO_CHECKS = [
    ("generic", [RelationId.OZAWA_EDR, RelationId.OZAWA_SECOND, RelationId.BRANCIARD, RelationId.MIXED_EDR,
                 RelationId.GETRM, RelationId.ROBERTSON, RelationId.ROBERTSON_D, RelationId.ETRM]),
    ("joint", [RelationId.MIXED_EDR, RelationId.GETRM, RelationId.ETRM, RelationId.OZAWA_EDR]),
    ("binary", [RelationId.BRANCIARD_BINARY, RelationId.MIXED_BINARY, RelationId.ETRMB]),
    ("joint_binary", [RelationId.MIXED_BINARY, RelationId.ETRMB]),
    ("circle", [RelationId.SPIN_CIRCLE]),
    ("error_free", [RelationId.ERROR_FREE_COROLLARY]),
    ("nondisturbing", [RelationId.NONDISTURBING_COROLLARY]),
]


@pytest.mark.parametrize("scenario,ids", SCENARIO_CHECKS, ids=[s for s, _ in SCENARIO_CHECKS])
@settings(max_examples=60, deadline=None)
@given(seed=seeds)
def test_universal_relations_hold(scenario, ids, seed):
    r = np.random.default_rng(seed)
    d = 2 if scenario == "circle" else int(r.integers(2, 4))
    model, a, b, rho = draw_scenario(scenario, d, int(r.integers(2, 4)), r)
    for rep in evaluate_all(model, a, b, rho, ids):
        assert not rep.skipped, rep.diagnostic
        assert rep.residual >= -1e-9, (rep.id, rep.residual)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_mixed_dominates_pure_bound(seed):
    # D >= |C| makes the mixed-state relation at least as strong
    r = np.random.default_rng(seed)
    p, a, b, rho = draw_scenario("generic", 3, 2, r)
    reps = by_id(evaluate_all(p, a, b, rho, [RelationId.MIXED_EDR, RelationId.BRANCIARD]))
    assert reps[RelationId.MIXED_EDR].rhs >= reps[RelationId.BRANCIARD].rhs - 1e-12
    assert reps[RelationId.MIXED_EDR].lhs <= reps[RelationId.BRANCIARD].lhs + 1e-9
