"""
Dicke free energy: effective theory against exact diagonalization
=================================================================

Fast cavity (w_z = w_c / 7) at beta w_c = 5. The effective model keeps only
the spin; the polaron-frame model keeps the photon with a small Fock cutoff.
"""

import numpy as np

from cavityeff import ed, thermo
from cavityeff.models import DickeParams

wc, wz, beta, N = 1.0, 1 / 7, 5.0, 30
lc = thermo.critical_coupling(wc, wz)
print(f"lambda_c = {lc:.6f}")

# %%
# Sweep lambda / lambda_c and compare free energies per site.
print(f"{'lam/lc':>7} {'f_full':>12} {'f_eff':>12} {'f_N=inf':>12} {'rel diff':>9}")
for r in np.linspace(0, 2, 9):
    p = DickeParams(wc, wz, r * lc, N, n_ph=10, beta=beta)
    f_full = ed.solve(p, "full_polaron", observables=False).thermo.free_energy_per_site
    f_eff = ed.solve(p, "effective", observables=False).thermo.free_energy_per_site
    f_inf = thermo.analytic_free_energy(p)[0].free_energy_per_site
    print(f"{r:7.2f} {f_full:12.6f} {f_eff:12.6f} {f_inf:12.6f} {abs(f_eff - f_full) / abs(f_full):9.2e}")

# %%
# At finite temperature the superradiant branch only opens once beta exceeds
# beta_c(lambda); here that happens at lambda / lambda_c = 1 / sqrt(tanh(beta w_z / 2)).
print("thermal critical ratio:", 1 / np.sqrt(np.tanh(beta * wz / 2)))
