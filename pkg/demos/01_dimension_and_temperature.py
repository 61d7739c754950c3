"""
Temperature function and quantization dimension
================================================

Walk through the thermodynamic side of the library: evaluate the pressure
P(q, t) = log sum_j p_j^q s_j^t with certified tails, solve for the
temperature function beta(q), and compute the quantization dimension
kappa_r, which solves sum_j (p_j s_j^r)^(kappa/(r+kappa)) = 1.

For the built-in `gamma3` system (ratios 3^-j, masses 2^-j) the dimension
is log 2 / log 3 for every order r; for `dyadic` it is 1.
"""
import math

import numpy as np

from ifsquant import (beta, kappa_residual, kappa_via_beta, load_builtin,
                      pressure, quantization_dimension, temperature_curve)

###############################################################################
# Pressure evaluations carry a certified tail bound
# -------------------------------------------------

dyadic = load_builtin("dyadic")
pv = pressure(dyadic, 1.0, 0.0)
print(f"dyadic P(1,0) = {pv.value:.3e}  (tail bound {pv.tail_bound:.1e}, "
      f"{pv.terms_used} explicit terms)")
pv = pressure(dyadic, 0.7, 1.3)
print(f"dyadic P(0.7,1.3) = {pv.value:.12f}  vs closed form "
      f"{-math.log(3):.12f}")

###############################################################################
# The temperature function: strictly decreasing and convex on [0,1]
# ------------------------------------------------------------------

gamma3 = load_builtin("gamma3")
grid = np.linspace(0.0, 1.0, 11)
for system, closed in ((dyadic, lambda q: 1 - q),
                       (gamma3, lambda q: (1 - q) * math.log(2) / math.log(3))):
    curve = temperature_curve(system, grid)
    err = max(abs(b - closed(q)) for q, b in zip(curve.q_grid, curve.beta_values))
    print(f"{system.system_id}: beta on the grid matches the closed form "
          f"to {err:.1e}; decreasing={curve.strictly_decreasing}, "
          f"convex={curve.midpoint_convex}")

###############################################################################
# kappa_r does not depend on r for gamma3-type mass/ratio coupling
# -----------------------------------------------------------------

print("\n   r    kappa_r(gamma3)  residual     kappa_r(dyadic)")
for r in (0.5, 1.0, 2.0, 3.0):
    kg = quantization_dimension(gamma3, r)
    kd = quantization_dimension(dyadic, r)
    res = kappa_residual(gamma3, r, kg)
    print(f"  {r:4.1f}  {kg:.12f}  {res:.1e}   {kd:.12f}")
print(f"  target log2/log3 = {math.log(2) / math.log(3):.12f}")

###############################################################################
# Two independent routes to the same number
# ------------------------------------------
# The direct route bisects the defining sum equation; the temperature route
# solves beta(q_r) = r q_r and returns beta(q_r)/(1-q_r).

r = 2.0
direct = quantization_dimension(gamma3, r)
via = kappa_via_beta(gamma3, r)
print(f"\ndirect route: {direct:.12f}")
print(f"beta route:   {via:.12f}   (difference {abs(direct - via):.1e})")

###############################################################################
# Optional plot
# --------------

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from pathlib import Path

    qs = np.linspace(0.0, 1.0, 41)
    fig, ax = plt.subplots(figsize=(5, 4))
    for system in (dyadic, gamma3):
        ax.plot(qs, [beta(system, float(q)) for q in qs], label=system.system_id)
    ax.set_xlabel("q")
    ax.set_ylabel("beta(q)")
    ax.legend()
    out = Path(__file__).parent / "out"
    out.mkdir(exist_ok=True)
    fig.savefig(out / "temperature_functions.png", dpi=120, bbox_inches="tight")
    print(f"\nwrote {out / 'temperature_functions.png'}")
except ImportError:
    print("\nmatplotlib not available; skipping the plot")
