"""
Amplified phase in the difference interferometer
================================================

Both arms see the same post-selection, so the lower and upper paths carry
``cos(theta) +- i A_w sin(theta)``. The recombined intensities read out the
amplified phase ``theta' = arctan(A_w tan theta)``.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wva_lab import TrainConfig, max_measurable_phase, propagate_exact
from wva_lab.optical_train import amplified_phase, difference_signal, difference_signal_first_order

theta = np.geomspace(1e-6, 0.3, 200)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
for aw in (1, 10, 50, 100):
    tp = amplified_phase(theta, aw).theta_prime
    ratio = [
        propagate_exact(TrainConfig(theta=t, delta=np.arctan(1 / aw))).normalized_difference for t in theta
    ]
    ax1.semilogx(theta, tp, label=f"A_w = {aw}")
    ax2.semilogx(theta, ratio)
ax1.set_xlabel("theta")
ax1.set_ylabel("theta'")
ax1.legend()
ax2.set_xlabel("theta")
ax2.set_ylabel("I_S / I_D")
fig.tight_layout()
fig.savefig("optical_train.png", dpi=120)
print("wrote optical_train.png")

# Small-signal check against 2 gamma^2 I0 A_w theta.
cfg = TrainConfig(theta=1e-5, delta=0.01, input_intensity=1e6)
print("exact signal      ", difference_signal(cfg))
print("first-order signal", difference_signal_first_order(cfg))

# The linear regime ends where theta' departs from A_w theta by 100 ppm.
for aw in (10, 50, 100):
    t = max_measurable_phase(aw, 1e-4)
    print(f"A_w = {aw:>3}: theta_max = {t:.4e}, A_w theta_max = {aw * t:.5f}")
