"""
Sampling the self-similar measure
==================================

Points of the measure are drawn by composing maps along i.i.d. symbol
sequences: a word of depth n pins its point down to sup_ratio^n * diam(X),
so the depth is chosen from the requested spatial resolution.  Sampling is
deterministic given the seed, and cylinder frequencies reproduce the word
masses p_w = p_{w_1} ... p_{w_n}.
"""
import math

from ifsquant import cylinder_mass, load_builtin, sample
from ifsquant.sampler import cylinder_counts

gamma3 = load_builtin("gamma3")

###############################################################################
# Depth follows the requested resolution
# ----------------------------------------

for eps in (1e-2, 1e-4, 1e-6):
    emp = sample(gamma3, 10, eps, seed=0)
    print(f"eps = {eps:.0e}: coding depth {emp.coding_depth:2d}, "
          f"spatial error {emp.spatial_error:.2e}")

###############################################################################
# Cylinder frequencies against exact masses
# -------------------------------------------

emp = sample(gamma3, 50_000, 1e-6, seed=12)
words = [(1,), (2,), (3,), (1, 1), (1, 2), (2, 1), (3, 3)]
counts = cylinder_counts(gamma3, emp, words)
print("\nword      mass        frequency   z-score")
for w, c in zip(words, counts):
    p = cylinder_mass(gamma3, w)
    z = (c / emp.count - p) / math.sqrt(p * (1 - p) / emp.count)
    print(f"{str(w):9s} {p:.6f}   {c / emp.count:.6f}   {z:+.2f}")

###############################################################################
# The planar system: sub-disks of the unit disk
# -----------------------------------------------

disk = load_builtin("disk-gamma")
emp2 = sample(disk, 20_000, 1e-5, seed=4)
print(f"\ndisk-gamma sample: {emp2.count} points in R^{emp2.dim}, "
      f"all inside the domain: {disk.domain.contains(emp2.points)}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from pathlib import Path

    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    axes[0].hist(emp.points[:, 0], bins=200, density=True)
    axes[0].set_title("gamma3 sample histogram")
    axes[1].scatter(emp2.points[:, 0], emp2.points[:, 1], s=0.3, alpha=0.4)
    axes[1].add_patch(plt.Circle((0, 0), 1.0, fill=False, color="k", lw=0.5))
    axes[1].set_aspect("equal")
    axes[1].set_title("disk-gamma sample")
    out = Path(__file__).parent / "out"
    out.mkdir(exist_ok=True)
    fig.savefig(out / "samples.png", dpi=120, bbox_inches="tight")
    print(f"wrote {out / 'samples.png'}")
except ImportError:
    print("matplotlib not available; skipping the plot")
