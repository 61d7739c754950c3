"""
Lloyd quantizers and the empirical quantization dimension
==========================================================

The n-th quantization error V_{n,r} decays like n^(-r/D_r), so the log-log
slope of a Lloyd distortion curve estimates the dimension D_r.  The
coefficient curves n * V^(kappa/r) witness the sharper statement: they stay
bounded away from zero for kappa below the dimension and decay for kappa
above it.
"""
import math

from ifsquant import (coefficient_curve, distortion_curve, estimate_dimension,
                      load_builtin, quantization_dimension)
from ifsquant.analysis import witness_from_curve

gamma3 = load_builtin("gamma3")
target = quantization_dimension(gamma3, 2.0)
print(f"theory: kappa_2 = {target:.6f} (= log2/log3 = "
      f"{math.log(2) / math.log(3):.6f})")

###############################################################################
# A Lloyd distortion curve on one shared sample
# -----------------------------------------------

curve = distortion_curve(gamma3, 2.0, [2, 4, 8, 16, 32, 64],
                         samples=50_000, eps=1e-6, seed=7, restarts=5)
print("\n   n        V_{n,2}      stderr")
for e in curve.entries:
    print(f"  {e.n:3d}   {e.V:.4e}   {e.stderr:.1e}")

d_hat, ci = estimate_dimension(curve)
print(f"\nfitted dimension: {d_hat:.4f}  (bootstrap 95% CI "
      f"[{ci[0]:.3f}, {ci[1]:.3f}]; theory {target:.4f})")

###############################################################################
# Coefficient curves at, below and above the dimension
# ------------------------------------------------------

print("\n   n    n*V^(k/r) at k=0.55   k=kappa_2   k=0.75")
below = dict(coefficient_curve(curve, 0.55))
at = dict(coefficient_curve(curve, target))
above = dict(coefficient_curve(curve, 0.75))
for n in below:
    print(f"  {n:3d}   {below[n]:10.4f}          {at[n]:8.4f}   {above[n]:8.4f}")

rep = witness_from_curve(curve, target, 0.55, 0.75)
for line in rep.lines():
    print(" ", line)

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from pathlib import Path

    ns = [e.n for e in curve.entries]
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    axes[0].loglog(ns, [e.V for e in curve.entries], "o-")
    axes[0].loglog(ns, [e.V * 0 + curve.entries[0].V * (n / ns[0]) ** (-2 / target)
                        for n in ns], "--", label="theory slope")
    axes[0].set_xlabel("n")
    axes[0].set_ylabel("V")
    axes[0].legend()
    axes[1].semilogx(ns, list(below.values()), "o-", label="kappa=0.55")
    axes[1].semilogx(ns, list(above.values()), "s-", label="kappa=0.75")
    axes[1].set_xlabel("n")
    axes[1].set_ylabel("n V^(kappa/r)")
    axes[1].legend()
    out = Path(__file__).parent / "out"
    out.mkdir(exist_ok=True)
    fig.savefig(out / "distortion_curve.png", dpi=120, bbox_inches="tight")
    print(f"\nwrote {out / 'distortion_curve.png'}")
except ImportError:
    print("\nmatplotlib not available; skipping the plot")
