"""
Weak values and the pointer they move
=====================================

A pre-selected ``|+>`` and a nearly orthogonal post-selection give a weak
value far outside the eigenvalue range of Z. The pointer then rotates by
``A_w g`` instead of ``g``, as long as ``|A_w g|`` stays small.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wva_lab import (
    exact_postselected_pointer,
    plus,
    post_selection_for_weak_value,
    post_selection_state,
    weak_approx_pointer,
    weak_value,
)

# The canonical post-selection at -pi/4 + delta gives A_w = cot(delta).
for delta in (0.1, 0.01, 0.001):
    aw = weak_value(plus(), post_selection_state(delta))
    print(f"delta = {delta:<6}  A_w = {aw.real:.6f}  cot(delta) = {1 / np.tan(delta):.6f}")

# Any complex target can be reached by choosing the post-selected state.
post = post_selection_for_weak_value(100 + 10j)
print("post-selection for 100+10i:", np.round(post.vector, 6))
print("its weak value:", weak_value(plus(), post))

# Compare the exact post-selected pointer with the first-order map.
delta = 0.01
post = post_selection_state(delta)
aw = weak_value(plus(), post)
x = np.linspace(0, 0.5, 101)
infid = []
for xi in x:
    g = xi / abs(aw)
    exact, _ = exact_postselected_pointer(g, plus(), post, plus())
    infid.append(1 - exact.fidelity(weak_approx_pointer(g, aw, plus())))

fig, ax = plt.subplots()
ax.semilogy(x[1:], infid[1:])
ax.axhline(1e-4, ls=":", c="k")
ax.set_xlabel("|A_w g|")
ax.set_ylabel("1 - fidelity")
ax.set_title("First-order pointer against the exact one")
fig.savefig("weak_values.png", dpi=120)
print("wrote weak_values.png")
