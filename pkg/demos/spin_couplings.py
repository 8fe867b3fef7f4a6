"""
Cavity-mediated spin-spin couplings
===================================

Eliminating the photon leaves H = H_S - sum_ij S_i . J_ij . S_j. A standing
wave mode leaves spins at its nodes uncoupled.
"""

import numpy as np

from cavityeff import applications as app

x = np.linspace(0, 1, 5)
pos = np.c_[x, np.zeros(5), np.zeros(5)]
mode = app.standing_wave_mode(pos, omega=1.0, k=np.pi, c_m=0.5)
J = app.spin_coupling_matrix(app.ModeSet((mode,), pos))

# zz couplings; the site at x = 0.5 sits on the node
np.set_printoptions(precision=3, suppress=True)
print(J.J[:, :, 2, 2])

# %%
# Photon-condensation factors for a uniform mode.
for d in (0.1, 1.0, 10.0):
    print(f"Delta/w = {d:5.1f}: factor {app.nogo_factor(d, 1.0)[0]:.4f}")
print("without A^2, N = 100, c = 0.1:", app.nogo_factor_without_A2(100, 0.1, 1.0))
