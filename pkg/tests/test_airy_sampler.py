"""Airy point process sampler: reproducibility and agreement with analytic functionals."""

import csv
import math

import numpy as np
import pytest

from shemom.airy import AiryConfig, fredholm_multiplicative, laplace_R
from shemom.airy_sampler import (
    AirySampleSet,
    EnsembleConfig,
    sample_airy_points,
    conditional_laplace_mc,
    hk_mc,
    series_moment_mc,
    write_samples_csv,
)


@pytest.fixture(scope="module")
def sample():
    # moderate ensemble shared across tests; statistical tolerances are set
    # for this size
    cfg = EnsembleConfig(matrix_size=300, top_points=16, replicas=3000, seed=101)
    return sample_airy_points(cfg)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            EnsembleConfig(matrix_size=10)
        with pytest.raises(ValueError):
            EnsembleConfig(top_points=0)
        with pytest.raises(ValueError):
            EnsembleConfig(replicas=0)

    def test_sample_set_shape_guard(self):
        cfg = EnsembleConfig(matrix_size=100, top_points=4, replicas=5, seed=0)
        with pytest.raises(ValueError):
            AirySampleSet(cfg, np.zeros((5, 3)))


class TestSampling:
    def test_sorted_decreasing(self, sample):
        assert np.all(np.diff(sample.points, axis=1) <= 0)

    def test_reproducible(self):
        cfg = EnsembleConfig(matrix_size=100, top_points=4, replicas=8, seed=3)
        a = sample_airy_points(cfg)
        b = sample_airy_points(cfg)
        np.testing.assert_array_equal(a.points, b.points)

    def test_replica_extension_consistent(self):
        # replica r depends only on (seed, r), not on the total count
        small = sample_airy_points(EnsembleConfig(100, 4, 5, seed=3))
        large = sample_airy_points(EnsembleConfig(100, 4, 9, seed=3))
        np.testing.assert_array_equal(small.points, large.points[:5])

    def test_top_point_tracy_widom(self, sample):
        top = sample.points[:, 0]
        se = top.std(ddof=1) / math.sqrt(len(top))
        # recomputed Tracy-Widom mean; generous finite-size allowance
        assert abs(top.mean() - (-1.7711)) < 4.0 * se + 0.02


class TestFunctionals:
    def test_series_k1(self, sample):
        T = 1.0
        est = series_moment_mc(1, T, sample)
        truth = math.exp(T / 24.0) / math.sqrt(2.0 * math.pi * T)
        assert abs(est.value - truth) <= 4.0 * est.stderr + 0.01

    def test_series_reproducible(self, sample):
        a = series_moment_mc(1, 1.0, sample)
        b = series_moment_mc(1, 1.0, sample)
        assert a.value == b.value

    def test_series_order_cap(self, sample):
        with pytest.raises(ValueError):
            series_moment_mc(3, 1.0, sample)

    def test_hk_k1_matches_series_mean(self, sample):
        # h_1 = sum of weights, so hk and the exponential series share a mean
        T = 1.0
        h = hk_mc(1, T, sample)
        s = series_moment_mc(1, T, sample)
        combined = math.hypot(h.stderr, s.stderr)
        assert abs(h.value - s.value) <= 4.0 * combined

    def test_hk_k2_vs_laplace(self, sample):
        T = 1.0
        C = (T / 2.0) ** (1.0 / 3.0)
        truth = laplace_R(2.0 * C) + 0.5 * laplace_R([C, C])
        est = hk_mc(2, T, sample)
        assert abs(est.value - truth) <= 4.0 * est.stderr + 0.01

    def test_conditional_laplace_vs_fredholm(self, sample):
        T = 1.0
        cfg = AiryConfig.from_T(T)
        for u in (0.5, 1.0):
            est = conditional_laplace_mc(u, T, sample)
            det = fredholm_multiplicative(u, cfg)
            assert abs(est.value - det) <= 4.0 * est.stderr + 0.005

    def test_conditional_laplace_bounds(self, sample):
        est = conditional_laplace_mc(1.0, 1.0, sample)
        assert 0.0 < est.value < 1.0

    def test_guards(self, sample):
        with pytest.raises(ValueError):
            conditional_laplace_mc(-1.0, 1.0, sample)
        with pytest.raises(ValueError):
            hk_mc(4, 1.0, sample)


class TestTruncationWarning:
    def test_warns_when_cut_matters(self):
        cfg = EnsembleConfig(matrix_size=100, top_points=2, replicas=20, seed=0)
        sam = sample_airy_points(cfg)
        with pytest.warns(RuntimeWarning):
            hk_mc(2, 1.0, sam)


class TestCsvExport:
    def test_round_trip(self, tmp_path):
        cfg = EnsembleConfig(matrix_size=100, top_points=3, replicas=4, seed=2)
        sam = sample_airy_points(cfg)
        path = tmp_path / "points.csv"
        write_samples_csv(sam, str(path))
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["replica", "a1", "a2", "a3"]
        assert len(rows) == 5
        back = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
        np.testing.assert_allclose(back, sam.points, rtol=1e-10)
