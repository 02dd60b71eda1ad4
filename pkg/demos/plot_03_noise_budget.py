"""
Error budget: alignment, shot noise and intensity noise
=======================================================

A splitting bias ``epsilon`` limits accuracy, while shot noise and relative
intensity noise limit precision. The weak-value scheme scales both by the
post-selection factor ``gamma``.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wva_lab import bench
from wva_lab.noise import EasyToSaturate, HardToSaturate, NoiseParams, precision_limit

rows = bench.compare_rows(bench.CompareParams())
print(f"{'scheme':<6} {'accuracy/eps':>14} {'precision (hard)':>18} {'precision (easy)':>18}")
for r in rows:
    ph = "" if r["precision_hard"] is None else f"{r['precision_hard']:.3e}"
    pe = "" if r["precision_easy"] is None else f"{r['precision_easy']:.3e}"
    print(f"{r['scheme']:<6} {r['accuracy_per_epsilon']:>14g} {ph:>18} {pe:>18}")

# The precision ratio reaches gamma only once shot noise is negligible.
params = NoiseParams(1.0, 1e-2)
i0 = np.geomspace(1e2, 1e14, 200)
fig, ax = plt.subplots()
for gamma in (1e-1, 1e-2, 1e-3):
    r = [precision_limit("DWM", gamma, i, params) / precision_limit("SI", gamma, i, params) for i in i0]
    ax.loglog(i0, r, label=f"gamma = {gamma:g}")
    easy = EasyToSaturate(1e4)
    print(
        f"gamma = {gamma:g}: easy-regime ratio",
        precision_limit("DWM", gamma, 1.0, params, easy) / precision_limit("SI", gamma, 1.0, params, easy),
    )
ax.axvline(100 * params.crossover_intensity, ls=":", c="k")
ax.set_xlabel("I0")
ax.set_ylabel("precision ratio DWM / SI")
ax.legend()
fig.savefig("noise_budget.png", dpi=120)
print("wrote noise_budget.png")
