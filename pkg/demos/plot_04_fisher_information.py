"""
Fisher information under dephasing
==================================

A phase flip of strength ``eta`` shrinks the equatorial Bloch components.
The imaginary part of a complex weak value moves part of the phase
information into the z component, which dephasing leaves alone.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wva_lab import cramer_rao, qfi_dwm, qfi_si

theta = 1e-3
eta = np.linspace(0, 0.5, 101)
si = np.array([qfi_si(theta, e) for e in eta])
real = np.array([qfi_dwm(theta, 100, e) for e in eta])
cplx = np.array([qfi_dwm(theta, 100 + 10j, e) for e in eta])

fig, ax = plt.subplots()
ax.plot(eta, si, label="SI")
ax.plot(eta, real, "--", label="DWM, A_w = 100")
ax.plot(eta, cplx, label="DWM, A_w = 100+10i")
ax.set_xlabel("eta")
ax.set_ylabel("QFI")
ax.legend()
fig.savefig("fisher_information.png", dpi=120)
print("wrote fisher_information.png")

for e in (0.01, 0.1, 0.3, 0.49):
    f_si, f_c = qfi_si(theta, e), qfi_dwm(theta, 100 + 10j, e)
    print(f"eta = {e:<5} SI {f_si:.5f}  complex {f_c:.5f}  bound ratio {cramer_rao(f_c) / cramer_rao(f_si):.4f}")
