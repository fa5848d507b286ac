import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from edrlab import bounds, geometry, qmodel
from edrlab.exceptions import DimensionMismatchError, PreconditionError
from edrlab.geometry import OperatorVector, ProofVectors, bgi_residuals, construct_proof_vectors, op_inner
from edrlab.qmodel import DensityOperator
from edrlab.sampling import draw_scenario
from edrlab.spinlab import build_spin_model

from conftest import I2, X, Y, Z

seeds = st.integers(min_value=0, max_value=2**32 - 1)
HALF = DensityOperator.maximally_mixed(2)


def vec(*xs):
    return OperatorVector(np.array(xs, dtype=float))


class TestInner:
    def test_examples(self):
        assert op_inner(I2, I2) == 2
        assert op_inner(X, Z) == 0
        assert op_inner(1j * Y, 1j * Y) == pytest.approx(2)

    def test_real_part_only(self):
        assert op_inner(I2, 1j * I2) == 0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            op_inner(I2, np.eye(3))

    def test_vector_algebra(self):
        u = vec(3, 4)
        assert u.norm == 5
        assert (u - vec(3, 0)).norm == 4
        assert (2 * u).norm == 10


class TestBgi:
    def test_exact_limit(self):
        e1, e2 = vec(1, 0), vec(0, 1)
        first, third = bgi_residuals(ProofVectors(a=e1, b=e2, m=e1, n=e2))
        assert first == pytest.approx(0)
        assert third == pytest.approx(0)

    def test_hand_example(self):
        e1, e2 = vec(1, 0), vec(0, 1)
        _, third = bgi_residuals(ProofVectors(a=e1, b=e1, m=e1, n=e2))
        # |a-m|^2 |b|^2 + |a|^2 |b-n|^2 + 0 - (a,b)^2 = 0 + 2 - 1
        assert third == pytest.approx(1)

    def test_needs_orthogonal_mn(self):
        e1 = vec(1, 0)
        with pytest.raises(PreconditionError, match="orthogonal"):
            bgi_residuals(ProofVectors(a=e1, b=e1, m=e1, n=e1))

    def test_normalized_needs_nonzero(self):
        e1, zero = vec(1, 0), vec(0, 0)
        with pytest.raises(PreconditionError):
            bgi_residuals(ProofVectors(a=e1, b=e1, m=e1, n=zero))
        first, third = bgi_residuals(ProofVectors(a=e1, b=e1, m=e1, n=zero), with_normalized=False)
        assert first is None
        assert third >= 0

    @settings(max_examples=200, deadline=None)
    @given(seeds, st.integers(2, 6))
    def test_random_vectors(self, seed, dim):
        r = np.random.default_rng(seed)
        a, b, m, n = (r.standard_normal(dim) for _ in range(4))
        n = n - (n @ m) / (m @ m) * m
        first, third = bgi_residuals(ProofVectors(*(OperatorVector(x) for x in (a, b, m, n))))
        scale = 1 + (a @ a) * (b @ b)
        assert first >= -1e-9 * scale
        assert third >= -1e-9 * scale


class TestProofVectors:
    @pytest.mark.parametrize("theta", [0.0, 0.2, math.pi / 8, math.pi / 4])
    def test_spin_half_state(self, theta):
        j = qmodel.to_joint_model(build_spin_model(theta), X)
        v = construct_proof_vectors(j, Z, X, HALF)
        assert op_inner(v.a, v.b) == pytest.approx(1)
        assert v.a.norm == pytest.approx(1)
        assert v.b.norm == pytest.approx(1)
        assert op_inner(v.m, v.n) == pytest.approx(0, abs=1e-12)
        first, third = bgi_residuals(v, with_normalized=v.m.norm > 1e-9 and v.n.norm > 1e-9)
        assert third >= -1e-10
        assert first is None or first >= -1e-10

    def test_commuting_pair(self, rng):
        p, a, _, rho = draw_scenario("generic", 3, 2, rng)
        v = construct_proof_vectors(qmodel.to_joint_model(p, a), a, a, rho)
        assert op_inner(v.a, v.b) == pytest.approx(0, abs=1e-12)

    def test_bad_variant(self):
        j = qmodel.to_joint_model(build_spin_model(0.1), X)
        with pytest.raises(ValueError):
            construct_proof_vectors(j, Z, X, HALF, variant="other")

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.sampled_from(["generic", "joint", "pure"]))
    def test_identities(self, seed, scenario):
        r = np.random.default_rng(seed)
        model, a, b, rho = draw_scenario(scenario, int(r.integers(2, 4)), int(r.integers(2, 4)), r)
        j = qmodel.as_joint_model(model, b)
        ms = qmodel.moments(j, a, b, rho)
        v = construct_proof_vectors(j, a, b, rho)
        assert op_inner(v.a, v.b) == pytest.approx(bounds.d_bound(a, b, rho), abs=1e-9)
        assert op_inner(v.m, v.n) == pytest.approx(0, abs=1e-9)
        assert v.a.norm == pytest.approx(ms.sigma_a, abs=1e-9)
        assert v.b.norm == pytest.approx(ms.sigma_b, abs=1e-9)
        assert (v.m - v.a).norm == pytest.approx(ms.eps_a, abs=1e-9)
        assert (v.n - v.b).norm == pytest.approx(ms.eps_b, abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_getrm_variant(self, seed):
        r = np.random.default_rng(seed)
        model, a, b, rho = draw_scenario("joint", int(r.integers(2, 4)), 2, r)
        ms = qmodel.moments(model, a, b, rho)
        v = construct_proof_vectors(model, a, b, rho, "getrm")
        # outputs centred at their own means: |m| is the output spread
        assert v.m.norm == pytest.approx(ms.sigma_cal_a, abs=1e-9)
        assert v.n.norm == pytest.approx(ms.sigma_cal_b, abs=1e-9)
        assert op_inner(v.m, v.n) == pytest.approx(0, abs=1e-9)
        assert (v.m - v.a).norm ** 2 == pytest.approx(ms.eps_a**2 - ms.delta_a**2, abs=1e-9)
        first, _ = bgi_residuals(v)
        assert first >= -1e-9
