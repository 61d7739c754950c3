"""Exact transport distances and the quantization identity."""

from fractions import Fraction

import numpy as np
import pytest

from ifsquant import (DiscreteMeasure, InstanceTooLargeError, ValidationError,
                      best_discrete_approx, brute_force_vnr, transport_plan,
                      wasserstein, wasserstein_1d, wasserstein_assignment)


def dm1(xs, ms=None):
    xs = np.array([[float(x)] for x in xs])
    ms = np.full(len(xs), 1.0 / len(xs)) if ms is None else np.asarray(ms, float)
    return DiscreteMeasure(xs, ms)


def random_measure(rng, k, d=1):
    atoms = rng.random((k, d))
    return DiscreteMeasure(atoms, np.full(k, 1.0 / k))


class TestWasserstein1d:
    def test_identity(self):
        mu = dm1([0.1, 0.7, 0.9])
        assert wasserstein_1d(mu, mu, 2) == 0.0

    def test_point_to_point(self):
        assert wasserstein_1d(dm1([0.0]), dm1([1.0]), 2) == pytest.approx(1.0)

    def test_split_to_center(self):
        mu = dm1([0.0, 1.0])
        nu = dm1([0.5])
        assert wasserstein_1d(mu, nu, 1) == pytest.approx(0.5)

    def test_r_below_one_rejected(self):
        with pytest.raises(ValidationError):
            wasserstein_1d(dm1([0.0]), dm1([1.0]), 0.5)


class TestAssignment:
    def test_identity(self):
        mu = dm1([0.2, 0.4], [0.25, 0.75])
        assert wasserstein_assignment(mu, mu, 2) == pytest.approx(0.0, abs=1e-12)

    def test_agrees_with_quantile_coupling(self):
        rng = np.random.default_rng(14)
        for _ in range(15):
            mu = random_measure(rng, int(rng.integers(1, 7)))
            nu = random_measure(rng, int(rng.integers(1, 7)))
            for r in (1.0, 2.0, 3.0):
                a = wasserstein_1d(mu, nu, r)
                b = wasserstein_assignment(mu, nu, r)
                assert a == pytest.approx(b, abs=1e-10)

    def test_2d_symmetric_cross(self):
        mu = DiscreteMeasure(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([0.5, 0.5]))
        nu = DiscreteMeasure(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0.5, 0.5]))
        assert wasserstein_assignment(mu, nu, 2) == pytest.approx(1.0)

    def test_subunit_r(self):
        mu = dm1([0.0, 1.0])
        nu = dm1([0.25, 0.75])
        rho = wasserstein_assignment(mu, nu, 0.5)
        # both atoms travel 0.25: total cost 0.25^0.5, rho = cost^(1/0.5)
        assert rho == pytest.approx(0.25, abs=1e-12)

    def test_cap_enforced(self):
        mu = dm1([0.0], [1.0])
        nu = dm1(np.linspace(0, 1, 7), np.full(7, 1 / 7))
        with pytest.raises(InstanceTooLargeError):
            wasserstein_assignment(mu, nu, 2, cap=5)

    def test_irrational_masses_rejected(self):
        with pytest.raises((InstanceTooLargeError, ValidationError)):
            dm = DiscreteMeasure(np.array([[0.0], [1.0]]),
                                 np.array([1 / np.pi, 1 - 1 / np.pi]))
            wasserstein_assignment(dm, dm1([0.5]), 2)

    def test_coupling_marginals_exact(self):
        rng = np.random.default_rng(3)
        mu = DiscreteMeasure(np.array([[0.0], [0.3], [1.0]]),
                             np.array([0.5, 0.25, 0.25]))
        nu = DiscreteMeasure(rng.random((4, 1)), np.full(4, 0.25))
        _, plan = transport_plan(mu, nu, 2)
        row = {}
        col = {}
        for i, j, m in plan:
            assert isinstance(m, Fraction)
            row[i] = row.get(i, Fraction(0)) + m
            col[j] = col.get(j, Fraction(0)) + m
        assert row == {0: Fraction(1, 2), 1: Fraction(1, 4), 2: Fraction(1, 4)}
        assert col == {j: Fraction(1, 4) for j in range(4)}


class TestMetricAxioms:
    def test_symmetry_triangle_identity(self):
        rng = np.random.default_rng(77)
        for d in (1, 2):
            for r in (1.0, 2.0):
                mus = [random_measure(rng, int(rng.integers(2, 5)), d)
                       for _ in range(3)]
                dab = wasserstein(mus[0], mus[1], r)
                dba = wasserstein(mus[1], mus[0], r)
                dbc = wasserstein(mus[1], mus[2], r)
                dac = wasserstein(mus[0], mus[2], r)
                assert dab == pytest.approx(dba, abs=1e-10)
                assert dac <= dab + dbc + 1e-10
                assert wasserstein(mus[0], mus[0], r) <= 1e-12


class TestBestDiscreteApprox:
    def test_full_support_is_exact(self):
        P = dm1([0.0, 0.3, 1.0])
        Q, rho = best_discrete_approx(P, 3, 2)
        assert rho == 0.0
        assert Q is P

    def test_two_point_example(self):
        P = dm1([0.0, 1.0])
        Q, rho = best_discrete_approx(P, 1, 2)
        assert rho ** 2 == pytest.approx(0.25, abs=1e-12)
        assert Q.atoms[0, 0] == pytest.approx(0.5)

    def test_three_point_example(self):
        P = dm1([0.0, 1.0, 2.0])
        Q, rho = best_discrete_approx(P, 2, 2)
        assert rho ** 2 == pytest.approx(1 / 6, abs=1e-12)
        assert sorted(Q.masses) == pytest.approx([1 / 3, 2 / 3])

    def test_identity_with_partition_oracle(self):
        rng = np.random.default_rng(9)
        for trial in range(10):
            k = int(rng.integers(2, 9))
            d = 1 if trial % 2 == 0 else 2
            P = random_measure(rng, k, d)
            n = int(rng.integers(1, 4))
            r = 1.0 if trial % 3 == 0 else 2.0
            Q, rho = best_discrete_approx(P, n, r)
            err, _, _ = brute_force_vnr(P.atoms, P.masses, n, r)
            assert rho ** r == pytest.approx(err, abs=1e-8)

    def test_support_cap(self):
        P = random_measure(np.random.default_rng(0), 13)
        with pytest.raises(InstanceTooLargeError):
            best_discrete_approx(P, 2, 2)


class TestDiscreteMeasure:
    def test_validation(self):
        with pytest.raises(ValidationError):
            DiscreteMeasure(np.array([[0.0], [1.0]]), np.array([0.6, 0.6]))
        with pytest.raises(ValidationError):
            DiscreteMeasure(np.array([[0.0], [0.0]]), np.array([0.5, 0.5]))
        with pytest.raises(ValidationError):
            DiscreteMeasure(np.array([[0.0], [1.0]]), np.array([1.2, -0.2]))

    def test_from_points_merges(self):
        dm = DiscreteMeasure.from_points(np.array([[0.0], [0.0], [1.0]]))
        assert dm.size == 2
        assert sorted(dm.masses) == pytest.approx([1 / 3, 2 / 3])
