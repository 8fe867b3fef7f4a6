"""
Bogoliubov modes of a diamagnetically shifted cavity
====================================================

A single mode with A^2 shift Delta is a squeezed oscillator with frequency
w~ = w sqrt(1 + 4 Delta / w). Two coupled modes are checked against brute force.
"""

import numpy as np

from cavityeff import bogoliubov as bg

for delta in (0.0, 0.25, 1.0, 4.0):
    s = bg.single_mode(delta, 1.0)
    print(f"Delta={delta:4.2f}  w~={s.omega_tilde:.6f}  cosh={s.cosh_theta:.6f}  sinh={s.sinh_theta:.6f}")

# %%
# Two modes with off-diagonal mixing.
form = bg.QuadraticBosonForm([[1.0, 0.2], [0.2, 1.4]], [[0.15, 0.05], [0.05, 0.1]])
t = bg.diagonalize_quadratic(form)
print("mode frequencies:", t.omega_tilde)
print("pseudo-unitarity residual:", bg.pseudo_unitarity_residual(t))

# truncated Fock space, 14 levels per mode
e = np.linalg.eigvalsh(bg.quadratic_hamiltonian_matrix(form, 14))
print("lowest gaps (brute force):", e[1:4] - e[0])
