"""
Dicke-model Hamiltonians in a fixed total-spin sector.

Composite spaces are ordered spin (x) boson, i.e. ``np.kron(spin_op, boson_op)``.
Units: hbar = 1, all energies in the same units as ``omega_c``.
"""

from dataclasses import dataclass, field, replace
from math import sqrt

import numpy as np

from .fock import build_fock, displacement_cosh_sinh
from .spin import SpinSector, build_spin_operators

MAX_DIM = 20_000
RESONANCE_RTOL = 1e-6
RADICAND_ULPS = 64


class DimensionError(ValueError):
    pass


class ResonanceError(ValueError):
    pass


@dataclass(frozen=True)
class DickeParams:
    """
    Parameters of the single-mode Dicke model.

    ``lam`` is the collective coupling lambda; the per-spin coupling is g = lam / sqrt(N).
    """

    omega_c: float
    omega_z: float
    lam: float
    N: int
    n_ph: int = 10
    beta: float = 1.0
    g: float = field(init=False)

    def __post_init__(self):
        if self.omega_c <= 0 or self.omega_z <= 0:
            raise ValueError("omega_c and omega_z must be positive")
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if int(self.N) < 1:
            raise ValueError("N must be >= 1")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "g", self.lam / sqrt(self.N))

    @property
    def zeta(self):
        return self.g / self.omega_c

    @property
    def lambda_c(self):
        return 0.5 * sqrt(self.omega_c * self.omega_z)

    def with_(self, **kw):
        return replace(self, **kw)


def _check_sector(p, sector):
    if sector.N != p.N:
        raise ValueError(f"sector built for N={sector.N}, params have N={p.N}")


def _guard(dim):
    if dim > MAX_DIM:
        raise DimensionError(f"Hamiltonian dimension {dim} exceeds the limit of {MAX_DIM} rows")


def _spin_boson(p, sector):
    _check_sector(p, sector)
    _guard(sector.dim * (p.n_ph + 1))
    return build_spin_operators(sector.S), build_fock(p.n_ph)


def dicke_full(p, sector):
    """H = w_z S_z + w_c a^dag a + 2 g S_x (a + a^dag) on spin (x) boson."""
    sp, fk = _spin_boson(p, sector)
    ib, isp = np.eye(fk.dim), np.eye(sector.dim)
    h = (p.omega_z * np.kron(sp.Sz, ib)
         + p.omega_c * np.kron(isp, fk.n)
         + 2 * p.g * np.kron(sp.Sx, fk.a + fk.a_dag))
    return (h + h.conj().T) / 2


def dicke_polaron(p, sector):
    """
    Dicke Hamiltonian in the polaron frame U = exp(-alpha S_x), alpha = 2 zeta (a^dag - a):

        H_P = w_z (S_z cosh(alpha) - i S_y sinh(alpha)) + w_c a^dag a - (4 g^2 / w_c) S_x^2
    """
    sp, fk = _spin_boson(p, sector)
    ch, sh = displacement_cosh_sinh(2 * p.zeta, p.n_ph)
    isp = np.eye(sector.dim)
    h = (p.omega_z * (np.kron(sp.Sz, ch) - 1j * np.kron(sp.Sy, sh))
         + p.omega_c * np.kron(isp, fk.n)
         - (4 * p.g**2 / p.omega_c) * np.kron(sp.Sx @ sp.Sx, np.eye(fk.dim)))
    return (h + h.conj().T) / 2


def dicke_effective(p, sector):
    """Matter-only H_eff = w_z S_z - (4 g^2 / w_c) S_x^2 (no boson factor)."""
    _check_sector(p, sector)
    sp = build_spin_operators(sector.S)
    h = p.omega_z * sp.Sz - (4 * p.g**2 / p.omega_c) * (sp.Sx @ sp.Sx)
    return (h + h.conj().T) / 2


def _check_detuning(p):
    if abs(p.omega_c - p.omega_z) < RESONANCE_RTOL * p.omega_c:
        raise ResonanceError("SW undefined at resonance (omega_c == omega_z)")


def dicke_sw_full(p, sector):
    """
    First-order Schrieffer-Wolff Hamiltonian

        H_SW = w_z S_z + w_c a^dag a - 2 g^2 w_z / (w_c^2 - w_z^2) S_z (a + a^dag)^2
               - 4 g^2 w_c / (w_c^2 - w_z^2) S_x^2
    """
    _check_detuning(p)
    sp, fk = _spin_boson(p, sector)
    ib, isp = np.eye(fk.dim), np.eye(sector.dim)
    den = p.omega_c**2 - p.omega_z**2
    x = fk.a + fk.a_dag
    h = (p.omega_z * np.kron(sp.Sz, ib)
         + p.omega_c * np.kron(isp, fk.n)
         - (2 * p.g**2 * p.omega_z / den) * np.kron(sp.Sz, x @ x)
         - (4 * p.g**2 * p.omega_c / den) * np.kron(sp.Sx @ sp.Sx, ib))
    return (h + h.conj().T) / 2


def sw_matter_block(p, sector):
    """Spin-only part of H_SW once the boson term is dropped (fast-cavity reading)."""
    _check_detuning(p)
    _check_sector(p, sector)
    sp = build_spin_operators(sector.S)
    den = p.omega_c**2 - p.omega_z**2
    return p.omega_z * sp.Sz - (4 * p.g**2 * p.omega_c / den) * (sp.Sx @ sp.Sx)


@dataclass(frozen=True)
class SlowCavityMode:
    """Bogoliubov frequency of the slow-cavity SW boson at fixed m_z."""

    radicand: float

    @property
    def is_real(self):
        return self.radicand >= 0

    @property
    def frequency(self):
        if not self.is_real:
            raise ValueError("imaginary frequency: slow-cavity SW Hamiltonian is ill-defined here")
        return sqrt(self.radicand)


def sw_slow_cavity_frequency(p, m_z, S):
    """epsilon(m_z) = sqrt(w_c^2 + 8 g^2 w_c m_z / w_z), flagged when the radicand is negative."""
    if abs(m_z) > S:
        raise ValueError(f"|m_z|={abs(m_z)} exceeds S={S}")
    gap = 2 * (S - m_z)
    if not float(gap).is_integer() or int(gap) % 2:
        raise ValueError(f"m_z={m_z} is not a valid projection for S={S}")
    scale = p.omega_c**2
    r = scale + 8 * p.g**2 * p.omega_c * m_z / p.omega_z
    # lambda_c^2 = w_c w_z / 4 holds only to an ulp after the square root; treat
    # residues of that size as the exact zero they stand for
    if abs(r) <= RADICAND_ULPS * np.finfo(float).eps * scale:
        r = 0.0
    return SlowCavityMode(r)


BUILDERS = {
    "full": dicke_full,
    "full_polaron": dicke_polaron,
    "effective": dicke_effective,
    "sw": dicke_sw_full,
}
