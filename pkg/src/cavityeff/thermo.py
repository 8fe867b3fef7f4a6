"""
Partition functions and free energies.

Everything is carried in log-domain: sector multiplicities Omega(S, N) overflow
doubles long before the ED sizes used here.
"""

from dataclasses import dataclass, field
from math import log, sqrt, tanh

import numpy as np
from scipy import integrate, optimize
from scipy.special import logsumexp

from .spin import sector_list


class DataInconsistency(RuntimeError):
    """Raised when computed partition functions violate a rigorous bound."""


@dataclass
class ThermoResult:
    beta: float
    N: int
    log_Z: float
    free_energy_per_site: float
    observables: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MeanFieldSolution:
    sigma: float
    branch: str  # "normal" | "superradiant"
    lambda_c: float
    beta_c: float  # inf when lambda <= lambda_c


def sector_log_z(energies, beta):
    return float(logsumexp(-beta * np.asarray(energies, dtype=float)))


def _check_sectors(sectors, N):
    got = sorted(s.twice_S for s in sectors)
    want = [s.twice_S for s in sector_list(N)]
    if got != want or any(s.N != N for s in sectors):
        raise ValueError(f"spectra must cover every sector of N={N} exactly once")


def free_energy_from_spectra(spectra, beta, N, log_prefactor=0.0):
    """
    Z = prefactor * sum_S Omega(S, N) sum_i exp(-beta E_{S,i}).

    ``spectra`` is a sequence of ``(SpinSector, eigenvalues)``; the fold runs in
    ascending S so the result does not depend on the order the sectors were solved in.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    spectra = sorted(spectra, key=lambda item: item[0].twice_S)
    _check_sectors([s for s, _ in spectra], N)
    terms = [s.log_degeneracy + sector_log_z(e, beta) for s, e in spectra]
    log_z = float(logsumexp(terms)) + log_prefactor
    return ThermoResult(beta=beta, N=N, log_Z=log_z, free_energy_per_site=-log_z / (beta * N))


def thermal_expectation(ops, solved, beta, N):
    """
    Gibbs average sum_S Omega Tr(O e^{-beta H_S}) / Z.

    Parameters
    ----------
    ops : dict or callable
        Operator for each sector, either a mapping ``SpinSector -> matrix`` or a
        function of the sector.
    solved : sequence of (SpinSector, eigenvalues, eigenvectors)
    """
    get = ops if callable(ops) else ops.__getitem__
    solved = sorted(solved, key=lambda item: item[0].twice_S)
    _check_sectors([s for s, _, _ in solved], N)
    logw, vals = [], []
    for sector, e, v in solved:
        op = np.asarray(get(sector))
        if op.shape != (v.shape[0], v.shape[0]):
            raise ValueError(f"operator shape {op.shape} does not match sector basis {v.shape[0]}")
        diag = np.sum(v.conj() * (op @ v), axis=0).real
        logw.append(sector.log_degeneracy - beta * np.asarray(e))
        vals.append(diag)
    logw = np.concatenate(logw)
    vals = np.concatenate(vals)
    w = np.exp(logw - logw.max())
    return float(np.dot(w, vals) / w.sum())


# --- thermodynamic limit ----------------------------------------------------

def critical_coupling(omega_c, omega_z):
    return 0.5 * sqrt(omega_c * omega_z)


def critical_temperature(p):
    """
    beta_c solving w_c w_z = 4 lam^2 tanh(beta_c w_z / 2), or None when lam <= lam_c.

    Found by bracketed bisection.
    """
    lc = critical_coupling(p.omega_c, p.omega_z)
    if p.lam <= lc:
        return None
    target = p.omega_c * p.omega_z

    def resid(b):
        return 4 * p.lam**2 * tanh(b * p.omega_z / 2) - target

    hi = 1.0 / p.omega_z
    while resid(hi) <= 0:
        hi *= 2
    return optimize.bisect(resid, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)


def solve_sigma(beta, lam, omega_c):
    """Nontrivial root of 2 sigma = tanh(4 beta lam^2 sigma / w_c) in (0, 1/2], else 0."""
    k = 4 * beta * lam**2 / omega_c
    if k <= 2:
        return 0.0

    def resid(s):
        return tanh(k * s) - 2 * s

    lo = 1e-12
    if resid(lo) <= 0:
        return 0.0
    return optimize.bisect(resid, lo, 0.5, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)


def _log2cosh(x):
    x = abs(x)
    return x + np.log1p(np.exp(-2 * x))


def analytic_free_energy(p):
    """
    Exact N -> infinity free energy per site of the Dicke model.

    The superradiant branch is taken when lam > lam_c and beta > beta_c, which is
    where the nontrivial sigma gives a level splitting above w_z (see README).
    """
    lc = critical_coupling(p.omega_c, p.omega_z)
    bc = critical_temperature(p)
    b = p.beta
    superradiant = bc is not None and b > bc
    if superradiant:
        sigma = solve_sigma(b, p.lam, p.omega_c)
        e = 4 * p.lam**2 * sigma / p.omega_c
        mbf = (_log2cosh(b * e) - b * 4 * p.lam**2 * sigma**2 / p.omega_c
               + b * p.omega_c * p.omega_z**2 / (16 * p.lam**2))
        y2 = (e**2 - p.omega_z**2 / 4) / (4 * p.lam**2)
        mx2 = p.omega_c**2 * y2 / (4 * p.lam**2)
    else:
        sigma = 0.0
        mbf = _log2cosh(b * p.omega_z / 2)
        y2 = mx2 = 0.0
    f = -mbf / b
    res = ThermoResult(
        beta=b, N=p.N, log_Z=p.N * mbf, free_energy_per_site=f,
        observables={"photon_number": p.N * y2, "sx2_over_n2": mx2},
    )
    mf = MeanFieldSolution(sigma=sigma, branch="superradiant" if superradiant else "normal",
                           lambda_c=lc, beta_c=float("inf") if bc is None else bc)
    return res, mf


# --- cavity prefactors and Hepp-Lieb -----------------------------------------

def log_z_oscillator(beta, omega):
    """ln of 1 / (1 - exp(-beta omega))."""
    return -float(np.log1p(-np.exp(-beta * omega)))


def log_z_classical_oscillator(beta, omega):
    """ln of 1 / (beta omega), the coherent-state (high-T) oscillator factor."""
    return -log(beta * omega)


def bose_occupation(beta, omega):
    x = np.exp(-beta * omega)
    return x / -np.expm1(-beta * omega)


@dataclass(frozen=True)
class HeppLiebSlack:
    lower: float  # ln Z - ln Z~ (>= 0)
    upper: float  # ln Z~ + beta sum w - ln Z (>= 0)


def hepp_lieb_gap(log_z, log_z_tilde, mode_freqs, beta, tol=1e-9):
    """
    Slack of Z~ <= Z <= exp(beta sum_k w_k) Z~ in log form.

    Raises DataInconsistency if either side is violated beyond ``tol``.
    """
    shift = beta * float(np.sum(mode_freqs))
    slack = HeppLiebSlack(lower=log_z - log_z_tilde, upper=log_z_tilde + shift - log_z)
    scale = max(1.0, abs(log_z))
    if slack.lower < -tol * scale or slack.upper < -tol * scale:
        raise DataInconsistency(f"Hepp-Lieb bounds violated: {slack}")
    return slack


def log_z_tilde_dicke(p):
    """
    Coherent-state lower bound ln Z~ for the Dicke model, by 1D quadrature.

    With z = x + iy the symbol is w_z S_z + w_c |z|^2 + 4 g x S_x; the y integral
    is Gaussian and the trace over all 2^N spin states factorises, leaving

        Z~ = (pi beta w_c)^(-1/2) * int dx exp(-beta w_c x^2) (2 cosh(beta E(x) / 2))^N,
        E(x) = sqrt(w_z^2 + 16 g^2 x^2).
    """
    b, wc, wz, g, N = p.beta, p.omega_c, p.omega_z, p.g, p.N

    def phi(x):
        e = np.sqrt(wz**2 + 16 * g**2 * x**2)
        return -b * wc * x**2 + N * _log2cosh(b * e / 2)

    # coarse scan for the peak (phi is even in x), then a bounded refinement
    xmax = 4.0 * (N * g / wc + 1.0 / sqrt(b * wc)) + 1.0
    grid = np.linspace(0.0, xmax, 4001)
    i = int(np.argmax(phi(grid)))
    lo_b, hi_b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    if hi_b > lo_b:
        x0 = optimize.minimize_scalar(lambda x: -phi(x), bounds=(lo_b, hi_b), method="bounded",
                                      options={"xatol": 1e-12 * max(1.0, hi_b)}).x
        x0 = max((x0, grid[i]), key=phi)
    else:
        x0 = grid[i]
    top = float(phi(x0))

    # integrate only where the integrand is within e^-60 of its peak
    step = 1.0 / sqrt(b * wc)
    hi = x0 + step
    while phi(hi) - top > -60:
        hi = x0 + 2 * (hi - x0)
    lo, d = x0, step
    while lo > 0 and phi(lo) - top > -60:
        lo = max(0.0, x0 - d)
        d *= 2
    # phi(x) - top cancels ~|top| eps of absolute precision; ask quad for no more than that
    rtol = max(1e-13, 50 * np.finfo(float).eps * abs(top))
    val, _ = integrate.quad(lambda x: np.exp(phi(x) - top), lo, hi, points=[x0] if lo < x0 < hi else None,
                            limit=400, epsabs=0.0, epsrel=rtol)
    return top + log(2 * val) - 0.5 * log(np.pi * b * wc)


def log_z_tilde_effective(p, log_tr_eff):
    """Large-N factorised form Z~ ~ Z~_0 Tr e^{-beta H_eff}, Z~_0 = 1 / (beta w)."""
    return log_z_classical_oscillator(p.beta, p.omega_c) + log_tr_eff


def normal_branch_free_energy(beta, omega_z):
    return -float(_log2cosh(beta * omega_z / 2)) / beta


__all__ = [
    "ThermoResult", "MeanFieldSolution", "DataInconsistency", "HeppLiebSlack",
    "free_energy_from_spectra", "thermal_expectation", "critical_coupling",
    "critical_temperature", "solve_sigma", "analytic_free_energy", "log_z_oscillator",
    "log_z_classical_oscillator", "bose_occupation", "hepp_lieb_gap", "log_z_tilde_dicke",
    "log_z_tilde_effective", "sector_log_z", "normal_branch_free_energy",
]
