"""
Structural invariant checks, shared by ``cavityeff selftest`` and the test suite.

Each check returns a CheckResult; none of them raise on failure.
"""

from dataclasses import dataclass
from math import log

import numpy as np
from scipy import integrate
from scipy.special import logsumexp

from . import applications as app
from . import ed, models, thermo
from .effective import MatsubaraKernelSpec, kernel_even_exact, matsubara_kernel
from .spin import build_spin_operators, sector_list


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _comm(a, b):
    return a @ b - b @ a


def check_spin_algebra(max_S=10.0, tol=1e-12):
    worst = 0.0
    for tS in range(0, int(2 * max_S) + 1):
        S = tS / 2
        o = build_spin_operators(S)
        eye = np.eye(o.dim)
        worst = max(
            worst,
            np.abs(_comm(o.Sx, o.Sy) - 1j * o.Sz).max(),
            np.abs(_comm(o.Sy, o.Sz) - 1j * o.Sx).max(),
            np.abs(_comm(o.Sz, o.Sx) - 1j * o.Sy).max(),
            np.abs(o.Sx @ o.Sx + o.Sy @ o.Sy + o.Sz @ o.Sz - S * (S + 1) * eye).max(),
        )
    return CheckResult("spin algebra closure", worst < tol,
                       f"max commutator/Casimir residual {worst:.2e} for S <= {max_S}")


def check_degeneracy_sum_rule(max_N=60, tol=1e-12):
    worst = 0.0
    for N in range(1, max_N + 1):
        terms = [s.log_degeneracy + log(s.dim) for s in sector_list(N)]
        worst = max(worst, abs(logsumexp(terms) - N * log(2)) / (N * log(2)))
    return CheckResult("degeneracy sum rule", worst < tol,
                       f"max relative error of log sum Omega (2S+1) vs N log 2: {worst:.2e} (N <= {max_N})")


def hepp_lieb_points():
    """Small polaron-frame ED points spanning both phases and both temperatures."""
    pts = []
    for N in (4, 8):
        for wz in (1 / 7, 1.0):
            for r in (0.0, 0.8, 1.0, 1.5):
                for b in (0.2, 5.0):
                    lam = r * thermo.critical_coupling(1.0, wz)
                    pts.append(models.DickeParams(1.0, wz, lam, N, n_ph=30, beta=b))
    return pts


def check_hepp_lieb(points=None):
    points = hepp_lieb_points() if points is None else points
    worst = np.inf
    try:
        for p in points:
            lz = ed.log_z(p, "full_polaron")
            slack = thermo.hepp_lieb_gap(lz, thermo.log_z_tilde_dicke(p), [p.omega_c], p.beta)
            worst = min(worst, slack.lower, slack.upper)
    except thermo.DataInconsistency as exc:
        return CheckResult("Hepp-Lieb sandwich", False, str(exc))
    return CheckResult("Hepp-Lieb sandwich", True,
                       f"{len(points)} points, smallest slack {worst:.3e}")


def check_spin_couplings(seed=7, tol=1e-12):
    rng = np.random.default_rng(seed)
    n = 6
    pos = rng.uniform(-1, 1, size=(n, 3))
    modes = []
    for _ in range(2):
        pol = rng.normal(size=3)
        pol /= np.linalg.norm(pol)
        u = rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))
        modes.append(app.CavityMode(omega=rng.uniform(0.5, 2), Delta=0.0, c_e=0.0,
                                    c_m=rng.uniform(0.1, 1), polarization=pol, u=u))
    J = app.spin_coupling_matrix(app.ModeSet(tuple(modes), pos)).to_matrix()
    psd = float(np.linalg.eigvalsh(J).min())
    sym = float(np.abs(J - J.T).max())

    uni = app.uniform_mode(pos, omega=1.3, c_m=0.7)
    Ju = app.spin_coupling_matrix(app.ModeSet((uni,), pos))
    e1 = np.array([1.0, 0.0, 0.0])
    block = (0.7**2 / 1.3) * np.outer(e1, e1)
    blocks = float(np.abs(Ju.J - block[None, None]).max())
    ev = np.linalg.eigvalsh(Ju.to_matrix())
    rank = int(np.sum(ev > 1e-10 * ev.max()))
    ok = psd >= -tol and sym < tol and blocks < tol and rank == 1
    return CheckResult("spin-coupling structure", ok,
                       f"min eigenvalue {psd:.2e}, asymmetry {sym:.1e}, uniform-mode rank {rank}, "
                       f"block error {blocks:.1e}")


def check_kernel(tol=1e-8):
    w, b = 1.0, 5.0
    tau = np.linspace(0.1, 4.9, 25)  # symmetric about beta / 2
    k = matsubara_kernel(MatsubaraKernelSpec(w, b, 20000, tau))
    parity = float(np.abs(k.odd + k.odd[::-1]).max())
    even_parity = float(np.abs(k.even - k.even[::-1]).max())
    # integrating over one period keeps only the n = 0 term of the even part
    val, _ = integrate.quad(kernel_even_exact, 0.0, b, args=(w, b), epsabs=0, epsrel=1e-13)
    rule = abs(val / b - 1)
    ok = parity < tol and even_parity < tol and rule < tol
    return CheckResult("kernel parity and sum rule", ok,
                       f"odd-part parity {parity:.1e}, even-part parity {even_parity:.1e}, "
                       f"|(1/beta) int Kbar - 1| = {rule:.1e}")


CHECKS = (
    check_spin_algebra,
    check_degeneracy_sum_rule,
    check_hepp_lieb,
    check_spin_couplings,
    check_kernel,
)


def run_all():
    return [chk() for chk in CHECKS]
