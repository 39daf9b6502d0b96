"""Tests for the seeded samplers."""

import math

import numpy as np
import pytest

from grassvol import (
    AnglePrescription,
    BadAngles,
    BadShape,
    RankDeficient,
    SeedSpec,
    Subspace,
    bartlett_logdet_sample,
    compress,
    log_product_principal_sines,
    log_volume,
    principal_angles,
    random_subspace,
    sample_measurement,
    subspace_pair_with_angles,
)
from grassvol.theory import volume_ratio_center


class TestSeedSpec:
    def test_same_pair_same_stream(self):
        a = SeedSpec(42, 7).generator().standard_normal(16)
        b = SeedSpec(42, 7).generator().standard_normal(16)
        assert np.array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = SeedSpec(42, 0).generator().standard_normal(16)
        b = SeedSpec(42, 1).generator().standard_normal(16)
        assert not np.array_equal(a, b)

    def test_range_validation(self):
        with pytest.raises(BadShape):
            SeedSpec(-1)
        with pytest.raises(BadShape):
            SeedSpec(0, 2**64)

    def test_stream_derivation(self):
        assert SeedSpec(9, 0).stream(5) == SeedSpec(9, 5)


class TestSampleMeasurement:
    def test_determinism_bit_for_bit(self):
        a = sample_measurement(20, 50, SeedSpec(3, 1))
        b = sample_measurement(20, 50, SeedSpec(3, 1))
        assert np.array_equal(a.matrix, b.matrix)

    def test_shape_and_metadata(self):
        phi = sample_measurement(10, 30, SeedSpec(0))
        assert phi.matrix.shape == (10, 30)
        assert (phi.m, phi.n) == (10, 30)

    @pytest.mark.parametrize("m,n", [(5, 5), (6, 5), (0, 5)])
    def test_bad_shapes(self, m, n):
        with pytest.raises(BadShape):
            sample_measurement(m, n, SeedSpec(0))

    def test_entry_moments(self):
        # 200 x 1000 = 2e5 entries: sample mean within 4 standard errors of
        # 0 and sample variance within 2% of 1/200.
        phi = sample_measurement(200, 1000, SeedSpec(12345)).matrix
        count = phi.size
        se_mean = math.sqrt(1.0 / 200 / count)
        assert abs(phi.mean()) <= 4 * se_mean
        assert abs(phi.var() - 1.0 / 200) <= 0.02 * (1.0 / 200)

    def test_compressed_norm_is_unbiased(self):
        # E ||phi s||^2 = ||s||^2: average over many independent draws for a
        # canonical direction and for an arbitrary fixed vector; the
        # chi-square mean has SE sqrt(2/m)/sqrt(N) after normalizing.
        m, n, reps = 25, 50, 4000
        s = SeedSpec(776).generator().standard_normal(n)
        s *= 3.0 / np.linalg.norm(s)
        basis_col = np.empty(reps)
        general = np.empty(reps)
        for i in range(reps):
            phi = sample_measurement(m, n, SeedSpec(777, i)).matrix
            basis_col[i] = np.sum(phi[:, 0] ** 2)
            general[i] = np.sum((phi @ s) ** 2) / 9.0
        se = math.sqrt(2.0 / m / reps)
        assert abs(basis_col.mean() - 1.0) <= 4 * se
        assert abs(general.mean() - 1.0) <= 4 * se


class TestCompress:
    def test_zero_column_input(self):
        phi = sample_measurement(4, 9, SeedSpec(1))
        out = compress(phi, np.zeros((9, 0)))
        assert out.shape == (4, 0)

    def test_identity_map_passthrough(self):
        S = np.arange(12.0).reshape(4, 3)
        assert np.array_equal(compress(np.eye(4), S), S)

    def test_dimension_mismatch(self):
        phi = sample_measurement(4, 9, SeedSpec(1))
        with pytest.raises(BadShape):
            compress(phi, np.zeros((8, 2)))

    def test_compression_preserves_rank_for_small_d(self):
        phi = sample_measurement(30, 100, SeedSpec(2))
        S = random_subspace(100, 5, False, SeedSpec(3)).basis
        lv = log_volume(compress(phi, S))
        assert math.isfinite(lv.log_value) and lv.dim == 5


class TestRandomSubspace:
    def test_determinism(self):
        a = random_subspace(30, 4, True, SeedSpec(5, 5))
        b = random_subspace(30, 4, True, SeedSpec(5, 5))
        assert np.array_equal(a.basis, b.basis)

    def test_unit_norm_line(self):
        sub = random_subspace(10, 1, True, SeedSpec(8))
        assert np.linalg.norm(sub.basis[:, 0]) == pytest.approx(1.0, abs=1e-12)
        assert sub.unit_norm

    def test_bad_shape(self):
        with pytest.raises(BadShape):
            random_subspace(5, 5, False, SeedSpec(0))
        with pytest.raises(BadShape):
            random_subspace(5, 0, False, SeedSpec(0))

    def test_rank_survives_many_draws(self):
        # orthonormalized basis keeps a healthy smallest singular value
        for i in range(1000):
            sub = random_subspace(100, 10, False, SeedSpec(99, i))
            q, _ = np.linalg.qr(sub.basis)
            svals = np.linalg.svd(q, compute_uv=False)
            assert svals[-1] > 0.99


class TestSubspacePairWithAngles:
    def test_prescribed_angles_recovered(self):
        pres = AnglePrescription([math.pi / 3, math.pi / 6])
        x, y = subspace_pair_with_angles(10, 2, pres, SeedSpec(21))
        got = principal_angles(x, y).angles
        want = np.sort(pres.angles)[::-1]
        assert np.max(np.abs(got - want)) <= 1e-8

    @pytest.mark.parametrize("seed", range(5))
    def test_random_prescriptions_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        k = 4
        pres = AnglePrescription(rng.uniform(0.05, math.pi / 2, k))
        x, y = subspace_pair_with_angles(20, k, pres, SeedSpec(31, seed))
        got = principal_angles(x, y).angles
        assert np.max(np.abs(got - np.sort(pres.angles)[::-1])) <= 1e-8

    def test_right_angles_give_zero_log_sines(self):
        pres = AnglePrescription([math.pi / 2] * 3)
        x, y = subspace_pair_with_angles(12, 3, pres, SeedSpec(4))
        assert log_product_principal_sines(x, y) == pytest.approx(0.0, abs=1e-10)

    def test_zero_angle_rejected(self):
        with pytest.raises(BadAngles):
            AnglePrescription([0.0, math.pi / 4])

    def test_overlarge_angle_rejected(self):
        with pytest.raises(BadAngles):
            AnglePrescription([math.pi / 2 + 1e-6])

    def test_ambient_too_small(self):
        with pytest.raises(BadShape):
            subspace_pair_with_angles(5, 3, AnglePrescription([0.5] * 3), SeedSpec(0))

    def test_prescription_length_checked(self):
        with pytest.raises(BadShape):
            subspace_pair_with_angles(10, 3, AnglePrescription([0.5] * 2), SeedSpec(0))

    def test_bases_are_unit_norm(self):
        pres = AnglePrescription([0.3, 1.1])
        x, y = subspace_pair_with_angles(9, 2, pres, SeedSpec(77))
        for sub in (x, y):
            assert sub.unit_norm
            assert np.allclose(np.linalg.norm(sub.basis, axis=0), 1.0, atol=1e-12)

    def test_determinism(self):
        pres = AnglePrescription([0.4, 0.9])
        a = subspace_pair_with_angles(8, 2, pres, SeedSpec(6, 1))
        b = subspace_pair_with_angles(8, 2, pres, SeedSpec(6, 1))
        assert np.array_equal(a[0].basis, b[0].basis)
        assert np.array_equal(a[1].basis, b[1].basis)


class TestBartlettSampler:
    def test_empty_sum(self):
        assert bartlett_logdet_sample(10, 0, SeedSpec(0)) == 0.0

    def test_bad_shapes(self):
        with pytest.raises(BadShape):
            bartlett_logdet_sample(10, 10, SeedSpec(0))
        with pytest.raises(BadShape):
            bartlett_logdet_sample(0, 0, SeedSpec(0))

    def test_determinism(self):
        a = bartlett_logdet_sample(50, 5, SeedSpec(1, 2))
        b = bartlett_logdet_sample(50, 5, SeedSpec(1, 2))
        assert a == b

    def test_mean_matches_digamma_sum(self):
        # mean of sum_p [log chi2_{m-p+1} - log m] is twice the volume-ratio
        # center; 20000 draws give a standard error around 0.003.
        m, d, reps = 100, 8, 20000
        vals = np.array(
            [bartlett_logdet_sample(m, d, SeedSpec(2024, i)) for i in range(reps)]
        )
        want = 2.0 * volume_ratio_center(m, d)
        se = vals.std(ddof=1) / math.sqrt(reps)
        assert abs(vals.mean() - want) <= 4 * se

    def test_single_dof_is_log_chisquare(self):
        # d=1: the draw is log(chi2_m / m), so exp of it averages to 1
        m, reps = 40, 20000
        vals = np.array(
            [bartlett_logdet_sample(m, 1, SeedSpec(55, i)) for i in range(reps)]
        )
        ratios = np.exp(vals)
        se = ratios.std(ddof=1) / math.sqrt(reps)
        assert abs(ratios.mean() - 1.0) <= 4 * se


class TestRatioDistributionInvariance:
    def test_log_volume_ratio_law_ignores_the_matrix(self):
        # the law of log(vol(phi S)/vol(S)) depends only on (m, d): two very
        # different fixed S of the same d give indistinguishable samples
        from scipy import stats as scipy_stats

        m, n, d, reps = 40, 70, 4, 5000
        rng = SeedSpec(31337).generator()
        s_a = rng.standard_normal((n, d))
        s_b = rng.standard_normal((n, d))
        s_b[:, 1] = s_b[:, 0] + 1e-3 * s_b[:, 1]  # nearly dependent columns
        s_b[:, 2] *= 50.0  # wildly uneven scales

        def ratios(S, offset):
            base = log_volume(S).log_value
            out = np.empty(reps)
            for i in range(reps):
                phi = sample_measurement(m, n, SeedSpec(41414, offset + i))
                out[i] = log_volume(compress(phi, S)).log_value - base
            return out

        a = ratios(s_a, 0)
        b = ratios(s_b, reps)
        assert scipy_stats.ks_2samp(a, b).pvalue > 0.01


class TestCompressedSubspaceRank:
    def test_rank_loss_after_compression_raises(self):
        # a rank-1 map collapses the subspace; the rank check must catch it
        sub = random_subspace(50, 3, False, SeedSpec(10))
        rng = SeedSpec(11).generator()
        phi = np.outer(rng.standard_normal(10), rng.standard_normal(50))
        with pytest.raises(RankDeficient):
            Subspace(phi @ sub.basis)
