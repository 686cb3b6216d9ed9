"""Tests for mixed characteristic polynomials against enumeration oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from interlacing.errors import DimensionMismatch, InvalidSpec, NotPSD, SupportTooLarge, TooManyVectors
from interlacing.generators import isotropic_covariances, random_psd, random_specs
from interlacing.hermitian import char_poly, rank1
from interlacing.mixedchar import (
    RandomVectorSpec,
    brute_force_expected_charpoly,
    covariance,
    jameslee_identity_check,
    mixed_charpoly,
    mixed_discriminant,
    tree_polynomial,
)
from interlacing.mpoly import det_poly, evaluate, partial
from interlacing.solver import lifted_specs
from interlacing.upoly import is_real_rooted

seeds = st.integers(0, 2**32 - 1)


def assert_coeffs_close(p, q, rtol):
    scale = max(p.scale(), q.scale(), 1.0)
    np.testing.assert_allclose(p.coeffs, q.coeffs, rtol=0, atol=rtol * scale)


def e(d, i):
    v = np.zeros(d)
    v[i] = 1
    return v


class TestSpec:
    def test_rejects_bad_probs(self):
        with pytest.raises(InvalidSpec):
            RandomVectorSpec(np.eye(2), [0.6, 0.6])
        with pytest.raises(InvalidSpec):
            RandomVectorSpec(np.eye(2), [1.5, -0.5])
        with pytest.raises(InvalidSpec):
            RandomVectorSpec(np.eye(2), [1.0])

    def test_constructors(self):
        s = RandomVectorSpec.deterministic([1, 2])
        assert s.support_size == 1 and s.dim == 2
        u = RandomVectorSpec.uniform(np.eye(3))
        np.testing.assert_allclose(u.probs, [1 / 3] * 3)


class TestCovariance:
    def test_deterministic(self):
        v = np.array([1, 1j])
        np.testing.assert_allclose(covariance(RandomVectorSpec.deterministic(v)), rank1(v))

    def test_uniform_basis(self):
        np.testing.assert_allclose(covariance(RandomVectorSpec.uniform(np.eye(2))), np.eye(2) / 2)

    def test_lifted_block_diagonal(self, rng):
        us = [rng.standard_normal(2) + 1j * rng.standard_normal(2) for _ in range(3)]
        r = 3
        for u, spec in zip(us, lifted_specs(us, r)):
            np.testing.assert_allclose(covariance(spec), np.kron(np.eye(r), rank1(u)), atol=1e-14)


class TestMixedDiscriminant:
    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_identity_copies(self, d):
        assert mixed_discriminant([np.eye(d)] * d) == pytest.approx(math.factorial(d))

    def test_diagonal_pair(self):
        assert mixed_discriminant([np.diag([1, 0]), np.diag([0, 1])]) == pytest.approx(1)

    def test_single_matrix_is_trace(self, rng):
        a = random_psd(rng, 4)
        assert mixed_discriminant([a]) == pytest.approx(np.trace(a).real)

    def test_too_many(self):
        with pytest.raises(DimensionMismatch):
            mixed_discriminant([np.eye(2)] * 3)

    @given(seeds)
    def test_matches_mixed_partial(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(1, 4))
        mats = [random_psd(rng, d) for _ in range(d)]
        p = det_poly(mats, include_x=False)
        for i in range(d):
            p = partial(p, i)
        ref = evaluate(p, np.zeros(d)).real
        assert mixed_discriminant(mats) == pytest.approx(ref, rel=1e-8, abs=1e-10)


class TestMixedCharpoly:
    def test_scalars(self):
        mu = mixed_charpoly([[[0.5]], [[1.25]], [[2.0]]])
        np.testing.assert_allclose(mu.coeffs, [-3.75, 1])

    def test_deterministic_basis_vector(self):
        np.testing.assert_allclose(mixed_charpoly([rank1(e(2, 0))]).coeffs, [0, -1, 1])

    def test_diagonal_pair(self):
        np.testing.assert_allclose(mixed_charpoly([np.diag([1.0, 0]), np.diag([0, 1.0])]).coeffs, [1, -2, 1])

    def test_basis_rank_ones(self):
        d = 4
        mu = mixed_charpoly([rank1(e(d, i)) for i in range(d)])
        np.testing.assert_allclose(mu.coeffs, [1, -4, 6, -4, 1], atol=1e-12)

    def test_rejects_non_psd(self):
        with pytest.raises(NotPSD):
            mixed_charpoly([np.diag([1.0, -0.1])])

    def test_clips_roundoff(self):
        mixed_charpoly([np.diag([1.0, -1e-12])])

    def test_too_many(self):
        with pytest.raises(TooManyVectors):
            mixed_charpoly([np.eye(20) / 30] * 21)

    @given(seeds)
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        d, m = int(rng.integers(1, 5)), int(rng.integers(1, 7))
        specs = random_specs(rng, m, d)
        assert_coeffs_close(mixed_charpoly([covariance(s) for s in specs]), brute_force_expected_charpoly(specs), 1e-9)

    @given(seeds)
    def test_real_rooted_monic_trace(self, seed):
        rng = np.random.default_rng(seed)
        d, m = int(rng.integers(1, 6)), int(rng.integers(1, 9))
        mats = [random_psd(rng, d, int(rng.integers(1, d + 1))) for _ in range(m)]
        mu = mixed_charpoly(mats)
        assert mu.degree == d
        assert mu.coeffs[-1] == 1
        total = sum(np.trace(a).real for a in mats)
        assert mu.coeffs[-2] == pytest.approx(-total, rel=1e-9)
        assert is_real_rooted(mu, 1e-6)

    @given(seeds)
    def test_permutation_invariant(self, seed):
        rng = np.random.default_rng(seed)
        mats = [random_psd(rng, 3, 2) for _ in range(5)]
        perm = rng.permutation(5)
        assert_coeffs_close(mixed_charpoly(mats), mixed_charpoly([mats[i] for i in perm]), 1e-11)

    def test_block_diagonal_matches_dense(self, rng):
        # block structure triggers the factored path; scrambling by a unitary does not
        us = [rng.standard_normal(2) for _ in range(4)]
        mats = [covariance(s) for s in lifted_specs(us, 3)]
        q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        dense = [q @ a @ q.T for a in mats]
        assert_coeffs_close(mixed_charpoly(mats), mixed_charpoly(dense), 1e-9)

    @given(seeds)
    def test_isotropic_below_identity(self, seed):
        # sum A_i = I, so the expected char poly has roots in [0, inf) and mean root 1
        rng = np.random.default_rng(seed)
        d, m = int(rng.integers(1, 4)), int(rng.integers(2, 6))
        mats = isotropic_covariances(rng, m, d, rank=d)
        mu = mixed_charpoly(mats)
        assert -mu.coeffs[-2] / d == pytest.approx(1.0)


class TestBruteForce:
    def test_deterministic(self, rng):
        vs = [rng.standard_normal(3) for _ in range(4)]
        got = brute_force_expected_charpoly([RandomVectorSpec.deterministic(v) for v in vs])
        assert_coeffs_close(got, char_poly(sum(rank1(v) for v in vs)), 1e-12)

    def test_uniform_basis(self):
        got = brute_force_expected_charpoly([RandomVectorSpec.uniform(np.eye(2))])
        np.testing.assert_allclose(got.coeffs, [0, -1, 1], atol=1e-15)

    def test_budget(self):
        spec = RandomVectorSpec.uniform(np.eye(10))
        with pytest.raises(SupportTooLarge):
            brute_force_expected_charpoly([spec] * 7)


class TestTreePolynomial:
    def test_root(self, rng):
        specs = random_specs(rng, 3, 2)
        covs = [covariance(s) for s in specs]
        assert_coeffs_close(tree_polynomial([], covs), mixed_charpoly(covs), 1e-14)

    def test_leaf(self, rng):
        ws = [rng.standard_normal(3) for _ in range(3)]
        assert_coeffs_close(tree_polynomial(ws, []), char_poly(sum(rank1(w) for w in ws)), 1e-10)

    def test_empty(self):
        with pytest.raises(DimensionMismatch):
            tree_polynomial([], [])

    @given(seeds)
    def test_conditional_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        d, m = int(rng.integers(1, 4)), int(rng.integers(2, 6))
        specs = random_specs(rng, m, d)
        k = int(rng.integers(1, m))
        fixed = [s.values[int(rng.integers(s.support_size))] for s in specs[:k]]
        got = tree_polynomial(fixed, [covariance(s) for s in specs[k:]])
        ref = brute_force_expected_charpoly([RandomVectorSpec.deterministic(w) for w in fixed] + specs[k:])
        assert_coeffs_close(got, ref, 1e-9)


class TestExpectedRankOne:
    def test_deterministic_identity(self):
        v = np.array([0.6, 0.3j])
        assert jameslee_identity_check(np.eye(2), RandomVectorSpec.deterministic(v)) < 1e-14
        # both sides equal 1 - |v|^2
        assert np.linalg.det(np.eye(2) - rank1(v)).real == pytest.approx(1 - 0.45)

    def test_zero_vector(self, rng):
        a = random_psd(rng, 3)
        spec = RandomVectorSpec(np.zeros((2, 3)), [0.5, 0.5])
        assert jameslee_identity_check(a, spec) <= 1e-10 * abs(np.linalg.det(a))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            jameslee_identity_check(np.eye(3), RandomVectorSpec.deterministic([1, 0]))
