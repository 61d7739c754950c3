"""
Quantization error as a transport distance
===========================================

For a discrete measure P, the n-point quantization error V_{n,r}(P) equals
the infimum of rho_r(P, Q)^r over measures Q supported on at most n points.
The library verifies this identity exactly on small instances: the left
side by enumerating support partitions, the right side by exact transport
(quantile coupling on the line, minimum-cost assignment otherwise).
"""
import numpy as np

from ifsquant import (DiscreteMeasure, best_discrete_approx, brute_force_vnr,
                      transport_plan, wasserstein_1d)

###############################################################################
# A worked example: uniform on {0, 1, 2}, two centers allowed
# -------------------------------------------------------------

P = DiscreteMeasure(np.array([[0.0], [1.0], [2.0]]), np.full(3, 1 / 3))
Q, rho = best_discrete_approx(P, n=2, r=2.0)
print(f"best 2-point approximation: atoms {Q.atoms.ravel()}, masses {Q.masses}")
print(f"rho_2(P,Q)^2 = {rho ** 2:.12f}  (exact value 1/6 = {1 / 6:.12f})")

err, centers, masses = brute_force_vnr(P.atoms, P.masses, 2, 2.0)
print(f"partition-oracle error = {err:.12f}  ->  identity holds to "
      f"{abs(rho ** 2 - err):.1e}")

###############################################################################
# The optimal coupling, with exact rational masses
# --------------------------------------------------

rho2, plan = transport_plan(P, Q, 2.0)
print("\ncoupling (i, j, mass):")
for i, j, m in plan:
    print(f"  {i} -> {j}  mass {m}")

###############################################################################
# Random instances, two independent solvers
# -------------------------------------------

rng = np.random.default_rng(6)
print("\n k   n   r   quantile rho      assignment rho    |difference|")
for _ in range(5):
    k = int(rng.integers(2, 7))
    mu = DiscreteMeasure(rng.random((k, 1)), np.full(k, 1 / k))
    nu = DiscreteMeasure(rng.random((3, 1)), np.full(3, 1 / 3))
    r = float(rng.choice([1.0, 2.0]))
    a = wasserstein_1d(mu, nu, r)
    b, _ = transport_plan(mu, nu, r)
    print(f" {k}   3  {r:.0f}   {a:.12f}   {b:.12f}   {abs(a - b):.1e}")
