"""
Cavity-eliminated matter Hamiltonians and the light/matter observable relations.

For H = H_M + sum_k w~_k b_k^dag b_k - sum_k c_k (C_k b_k + h.c.) the large-N
matter Hamiltonian is

    H_eff = H_M - sum_k (c_k^2 / w~_k) C_k C_k^dag

with Z = Z_0 Tr_M exp(-beta H_eff), Z_0 = prod_k 1 / (1 - exp(-beta w~_k)).
"""

from dataclasses import dataclass
from math import pi

import numpy as np

from .thermo import bose_occupation


@dataclass(frozen=True)
class CouplingChannel:
    """One bosonic mode: coupling constant c, frequency w~ and matter operator C."""

    c: float
    omega_tilde: float
    C: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        if not np.isfinite(self.c):
            raise ValueError("coupling constant must be finite")
        if not self.omega_tilde > 0:
            raise ValueError("mode frequency must be positive")
        C = np.asarray(self.C)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise ValueError("coupling operator must be a square matrix")
        if self.hermitian and np.max(np.abs(C - C.conj().T), initial=0.0) > 1e-12:
            raise ValueError("channel flagged Hermitian but C != C^dag")
        object.__setattr__(self, "C", C)

    @property
    def weight(self):
        return self.c**2 / self.omega_tilde


def cavity_term(channels):
    """-sum_k (c_k^2 / w~_k) C_k C_k^dag."""
    out = None
    for ch in channels:
        t = -ch.weight * (ch.C @ ch.C.conj().T)
        out = t if out is None else out + t
    return out


def build_effective(H_M, channels):
    H_M = np.asarray(H_M)
    channels = list(channels)
    for ch in channels:
        if ch.C.shape != H_M.shape:
            raise ValueError(f"coupling operator shape {ch.C.shape} != matter Hamiltonian {H_M.shape}")
    if not channels:
        return H_M.copy()
    h = H_M + cavity_term(channels)
    return (h + h.conj().T) / 2


def photon_quadratures(channel, exp_C, exp_Cdag=None):
    """
    <b + b^dag> = -(c / w~) <C + C^dag>_M  and  <b - b^dag> = (c / w~) <C - C^dag>_M.

    Expectations are taken in the Gibbs state of H_eff. ``exp_Cdag`` defaults to
    the complex conjugate of ``exp_C``.
    """
    if exp_Cdag is None:
        exp_Cdag = np.conj(exp_C)
    r = channel.c / channel.omega_tilde
    return -r * (exp_C + exp_Cdag), r * (exp_C - exp_Cdag)


def photon_number(channel, beta, exp_CCdag):
    """<b^dag b> = n_B(beta, w~) + (c / w~)^2 <C C^dag>_M."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    return float(bose_occupation(beta, channel.omega_tilde)
                 + (channel.c / channel.omega_tilde) ** 2 * np.real(exp_CCdag))


def gibbs_expectation(H, op, beta):
    """Tr(op e^{-beta H}) / Tr e^{-beta H} for a single dense Hamiltonian."""
    e, v = np.linalg.eigh(H)
    w = np.exp(-beta * (e - e[0]))
    diag = np.sum(v.conj() * (np.asarray(op) @ v), axis=0)
    return complex(np.dot(w, diag) / w.sum())


# --- imaginary-time kernel ----------------------------------------------------

class KernelNotConverged(RuntimeError):
    pass


@dataclass(frozen=True)
class MatsubaraKernelSpec:
    omega_tilde: float
    beta: float
    n_max: int
    tau: np.ndarray

    def __post_init__(self):
        tau = np.atleast_1d(np.asarray(self.tau, dtype=float))
        if self.omega_tilde <= 0 or self.beta <= 0:
            raise ValueError("omega_tilde and beta must be positive")
        if int(self.n_max) < 1:
            raise ValueError("n_max must be >= 1")
        if np.any(tau < 0) or np.any(tau >= self.beta):
            raise ValueError("tau values must lie in [0, beta)")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "n_max", int(self.n_max))


@dataclass(frozen=True)
class KernelSamples:
    """
    Sampled kernel K(tau) = Kbar(tau) - (1/w~) d/dtau Kbar(tau).

    ``total``, ``even`` and ``odd`` are truncated Matsubara sums over |n| <= n_max;
    ``even_exact`` / ``odd_exact`` are the resummed closed forms on (0, beta).
    Kbar itself splits as beta * sum_n delta(tau - n beta) minus a second kernel;
    the delta train is kept symbolic through ``delta_weight``.
    """

    tau: np.ndarray
    total: np.ndarray
    even: np.ndarray
    odd: np.ndarray
    even_exact: np.ndarray
    odd_exact: np.ndarray
    delta_weight: float

    @property
    def remainder(self):
        """Kbarbar = beta sum_n delta(tau - n beta) - Kbar, i.e. -Kbar away from tau = 0 mod beta."""
        return -self.even_exact


def kernel_even_exact(tau, omega_tilde, beta):
    """sum_n w~^2 / (w_n^2 + w~^2) e^{i w_n tau} = (beta w~ / 2) cosh(w~ (beta/2 - tau)) / sinh(beta w~ / 2)."""
    tau = np.mod(np.asarray(tau, dtype=float), beta)
    x = beta * omega_tilde / 2
    # ratio written with decaying exponentials so it stays finite for large beta w~
    num = np.exp(-omega_tilde * tau) + np.exp(-omega_tilde * (beta - tau))
    return x * num / (-np.expm1(-2 * x))


def kernel_odd_exact(tau, omega_tilde, beta):
    """-(1/w~) d/dtau of the even part: (beta w~ / 2) sinh(w~ (beta/2 - tau)) / sinh(beta w~ / 2)."""
    tau = np.mod(np.asarray(tau, dtype=float), beta)
    x = beta * omega_tilde / 2
    num = np.exp(-omega_tilde * tau) - np.exp(-omega_tilde * (beta - tau))
    return x * num / (-np.expm1(-2 * x))


def _partial_sums(tau, omega_tilde, beta, n_max, chunk=200_000):
    w = omega_tilde
    even = np.full(tau.shape, 1.0)  # n = 0 term
    odd = np.zeros(tau.shape)
    for lo in range(1, n_max + 1, chunk):
        n = np.arange(lo, min(lo + chunk, n_max + 1), dtype=float)
        wn = 2 * pi * n / beta
        ph = np.outer(tau, wn)
        den = wn**2 + w**2
        # +n and -n combined
        even += 2 * np.cos(ph) @ (w**2 / den)
        odd += 2 * np.sin(ph) @ (wn * w / den)
    return even, odd


def matsubara_kernel(spec, tol=1e-8, zero_mode_only=False):
    """
    K(tau) = sum_n w~ / (i w_n + w~) e^{i w_n tau}, truncated at |n| <= n_max.

    Raises KernelNotConverged when doubling n_max moves the even part by more
    than ``tol``. With ``zero_mode_only`` only the n = 0 (constant-field) term is
    kept and the kernel is identically 1.
    """
    tau, w, b = spec.tau, spec.omega_tilde, spec.beta
    if zero_mode_only:
        one = np.ones(tau.shape)
        return KernelSamples(tau=tau, total=one.astype(complex), even=one, odd=np.zeros(tau.shape),
                             even_exact=one, odd_exact=np.zeros(tau.shape), delta_weight=0.0)
    even, odd = _partial_sums(tau, w, b, spec.n_max)
    even2, _ = _partial_sums(tau, w, b, 2 * spec.n_max)
    change = float(np.max(np.abs(even2 - even)))
    if change > tol:
        raise KernelNotConverged(
            f"even part moved by {change:.3e} > {tol:.1e} when doubling n_max={spec.n_max}")
    # e^{i w_n tau} / (i w_n + w~): real part is the even kernel, odd part is the sine series
    total = even + odd + 0j
    return KernelSamples(tau=tau, total=total, even=even, odd=odd,
                         even_exact=kernel_even_exact(tau, w, b),
                         odd_exact=kernel_odd_exact(tau, w, b), delta_weight=b)
