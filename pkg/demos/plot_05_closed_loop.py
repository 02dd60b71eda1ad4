"""
Closed-loop readout
===================

Open loop, the amplified phase saturates near ``A_w theta ~ 0.017``. Holding
the output at zero with a compensating phase and reading that phase instead
extends the range to the whole modulator span.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wva_lab import ServoConfig, TrainConfig, run_servo
from wva_lab.servo import closed_loop_dynamic_range, open_loop_dynamic_range

gamma = 0.01
train = TrainConfig(theta=0.0, delta=np.arctan(gamma))
cfg = ServoConfig(phi_min=1e-6)

trace = run_servo(0.05, train, cfg)
print("iterations:", len(trace.phi_hat), "converged:", trace.converged)
print("theta_hat:", trace.theta_hat, "error:", trace.theta_hat - 0.05)

thetas = np.linspace(-0.062, 0.062, 100)
err = [run_servo(t, train, cfg).theta_hat - t for t in thetas]
fig, ax = plt.subplots()
ax.plot(thetas, err, ".")
ax.axvspan(-0.0173 * gamma, 0.0173 * gamma, color="0.85", label="open-loop range")
ax.set_xlabel("theta")
ax.set_ylabel("theta_hat - theta")
ax.legend()
fig.savefig("closed_loop.png", dpi=120)
print("wrote closed_loop.png")

print("open-loop dynamic range  ", open_loop_dynamic_range("DWM", gamma, gamma * 1e-6))
print("closed-loop dynamic range", closed_loop_dynamic_range("DWM", gamma, 1e-6))
