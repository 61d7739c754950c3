"""Centers, Lloyd iteration, word-set quantizer."""

import math

import numpy as np
import pytest

from ifsquant import (ValidationError, assign, build_F_n,
                      constructive_quantizer, distortion, lloyd, r_center,
                      sample)
from ifsquant.transport import brute_force_vnr


def pts(*vals):
    return np.array([[float(v)] for v in vals])


class TestRCenter:
    def test_mean_r2(self):
        assert r_center(pts(0, 1), None, 2)[0] == pytest.approx(0.5)

    def test_median_r1(self):
        assert r_center(pts(0, 0, 1), None, 1)[0] == pytest.approx(0.0)

    def test_symmetric_r4(self):
        assert r_center(pts(0, 1), None, 4)[0] == pytest.approx(0.5, abs=1e-10)

    def test_weighted_mean(self):
        c = r_center(pts(0, 1), np.array([3.0, 1.0]), 2)
        assert c[0] == pytest.approx(0.25)

    def test_geometric_median_2d(self):
        # three unit vectors at 120 degrees: the median is the centroid 0
        ang = np.array([0, 2 * np.pi / 3, 4 * np.pi / 3])
        p = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        c = r_center(p, None, 1, tol=1e-13)
        assert np.linalg.norm(c) <= 1e-7

    def test_weiszfeld_coincidence_guard(self):
        # heavy repeated point: the optimum sits exactly on it
        p = np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        c = r_center(p, None, 1, tol=1e-13)
        assert np.linalg.norm(c) <= 1e-9

    def test_subunit_r_is_data_point(self):
        p = pts(0.0, 0.1, 0.9)
        c = r_center(p, None, 0.5)
        assert any(np.allclose(c, q) for q in p)

    def test_subunit_r_needs_1d(self):
        with pytest.raises(ValidationError):
            r_center(np.zeros((3, 2)), None, 0.5)

    def test_general_r_fixed_point(self):
        rng = np.random.default_rng(0)
        p = rng.random((20, 2))
        for r in (1.5, 3.0):
            c = r_center(p, None, r, tol=1e-13)
            # first-order optimality: gradient of sum |x-c|^r vanishes
            d = np.linalg.norm(p - c, axis=1)
            grad = (d[:, None] ** (r - 2) * (c - p)).sum(0) * r / len(p)
            assert np.linalg.norm(grad) <= 1e-6

    def test_empty_cell(self):
        with pytest.raises(ValidationError):
            r_center(np.empty((0, 1)), None, 2)


class TestAssign:
    def test_examples_and_ties(self):
        centers = pts(0, 1)
        assert assign(pts(0.4), centers)[0] == 0
        assert assign(pts(0.5), centers)[0] == 0  # tie -> lowest index
        assert assign(pts(0.6), centers)[0] == 1

    def test_no_centers(self):
        with pytest.raises(ValidationError):
            assign(pts(0.5), np.empty((0, 1)))


class TestDistortion:
    def test_examples(self):
        emp = pts(0, 1)
        assert distortion(emp, pts(0, 1), 2)[0] == 0.0
        assert distortion(emp, pts(0), 2)[0] == pytest.approx(0.5)
        assert distortion(emp, pts(0.5), 1)[0] == pytest.approx(0.5)


class TestLloyd:
    def test_two_points_two_centers(self):
        q = lloyd(pts(0, 1), 2, 2.0, seed=1, restarts=4)
        assert q.distortion_estimate == pytest.approx(0.0, abs=1e-15)
        assert sorted(q.centers[:, 0]) == [0.0, 1.0]

    def test_uniform_single_center(self):
        rng = np.random.default_rng(123)
        u = rng.random((10000, 1))
        q = lloyd(u, 1, 2.0, seed=2)
        assert q.centers[0, 0] == pytest.approx(0.5, abs=0.01)
        assert abs(q.distortion_estimate - 1 / 12) <= 3 * q.distortion_stderr

    def test_history_monotone(self, gamma3):
        emp = sample(gamma3, 20000, 1e-6, 8)
        q = lloyd(emp, 13, 2.0, seed=5, restarts=2)
        hist = np.array(q.meta["history"])
        assert np.all(np.diff(hist) <= 1e-12)

    def test_more_centers_than_points_warns(self):
        with pytest.warns(UserWarning):
            q = lloyd(pts(0, 1), 5, 2.0)
        assert q.distortion_estimate == 0.0

    def test_determinism(self, gamma3):
        emp = sample(gamma3, 5000, 1e-5, 11)
        a = lloyd(emp, 7, 2.0, seed=3, restarts=3)
        b = lloyd(emp, 7, 2.0, seed=3, restarts=3)
        assert np.array_equal(a.centers, b.centers)
        assert a.distortion_estimate == b.distortion_estimate

    def test_scaling_covariance(self):
        rng = np.random.default_rng(7)
        base = rng.random((2000, 1))
        lam = 3.7
        for r in (1.0, 2.0):
            q1 = lloyd(base, 4, r, seed=9, restarts=2)
            q2 = lloyd(base * lam, 4, r, seed=9, restarts=2)
            assert q2.distortion_estimate == pytest.approx(
                lam ** r * q1.distortion_estimate, rel=1e-9)

    def test_matches_brute_force_small(self):
        rng = np.random.default_rng(21)
        for trial in range(6):
            k = int(rng.integers(4, 13))
            d = 1 if trial % 2 == 0 else 2
            p = rng.random((k, d))
            n = int(rng.integers(1, 4))
            r = 1.0 if trial % 2 else 2.0
            q = lloyd(p, n, r, seed=trial, restarts=20)
            best, _, _ = brute_force_vnr(p, None, n, r)
            assert q.distortion_estimate <= best + 1e-8
            assert q.distortion_estimate >= best - 1e-8


class TestFnWordSet:
    def test_worked_example(self):
        fn = build_F_n([0.4, 0.3], 10)
        assert fn.words == ((2,), (1, 1), (1, 2))
        assert fn.gammas == pytest.approx((0.3, 0.16, 0.12))
        assert fn.rho == 0.3
        assert fn.card <= 10
        assert all(g > 1 / 10 for g in fn.gammas)

    def test_root_convention(self):
        fn = build_F_n([0.4, 0.3], 3)  # threshold 1/(3*0.3) > 1
        assert fn.words == ((),)
        assert fn.card == 1

    def test_antichain_and_bounds(self):
        rng = np.random.default_rng(4)
        for _ in range(12):
            k = int(rng.integers(2, 6))
            g = rng.dirichlet(np.ones(k)) * float(rng.uniform(0.5, 0.95))
            g = np.clip(g, 1e-4, 0.9)
            n = int(rng.integers(1, 400))
            fn = build_F_n(g, n)
            assert fn.card <= n
            words = set(fn.words)
            assert len(words) == fn.card
            for w in words:
                for v in words:
                    if w != v:
                        assert w != v[:len(w)]  # no word prefixes another
            if fn.words != ((),):
                for w, gw in zip(fn.words, fn.gammas):
                    assert gw <= fn.threshold
                    assert gw > 1 / n
            assert sum(fn.gammas) < 1.0 or fn.words == ((),)

    def test_invalid_gammas(self):
        with pytest.raises(ValidationError):
            build_F_n([0.5, 0.5], 10)  # sums to 1
        with pytest.raises(ValidationError):
            build_F_n([0.0, 0.3], 10)
        with pytest.raises(ValidationError):
            build_F_n([0.4, 0.3], 0)


class TestConstructive:
    def test_metadata_and_bounds(self, gamma3):
        q = constructive_quantizer(gamma3, 64, 1.0, samples=5000, seed=2)
        m = q.meta
        assert m["card"] <= 64
        assert 0.0 < m["eta"] < 1.0
        assert m["kappa_r"] < m["kappa"]
        assert 0.0 < m["alpha"] < 1.0
        # tail budget honored at the chosen truncation level
        tail = gamma3.probs.tail_sum(m["N"]) ** m["eta"]
        assert tail < 0.5 * (1.0 - m["alpha"])
        assert len(q.centers) == m["card"]

    def test_single_center_crude_bound(self, gamma3):
        q = constructive_quantizer(gamma3, 1, 2.0, samples=4000, seed=3)
        assert q.distortion_estimate <= gamma3.domain.diameter ** 2.0

    def test_kappa_below_dimension_rejected(self, gamma3):
        with pytest.raises(ValidationError):
            constructive_quantizer(gamma3, 8, 1.0, kappa=0.5)

    def test_nontrivial_antichain(self, gamma3):
        q = constructive_quantizer(gamma3, 256, 1.0, kappa=5.0, samples=4000, seed=1)
        assert q.meta["card"] > 1
        assert q.meta["card"] <= 256
        # centers live inside the domain
        assert gamma3.domain.contains(q.centers, slack=1e-9)

    def test_finite_system_rejected(self, uniform4):
        with pytest.raises(ValidationError):
            constructive_quantizer(uniform4, 8, 1.0)
