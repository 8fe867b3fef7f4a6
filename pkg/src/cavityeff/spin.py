"""
Collective angular-momentum operators and total-spin sector bookkeeping.

All matrices are in the S_z eigenbasis ordered m = S, S-1, ..., -S.
Half-integer spins are carried internally as ``twice_S`` (an int).
"""

from dataclasses import dataclass
from math import lgamma, log

import numpy as np


@dataclass(frozen=True)
class SpinSector:
    """Total-spin sector S of N spin-1/2 particles."""

    twice_S: int
    N: int

    def __post_init__(self):
        _check_pair(self.twice_S, self.N)

    @classmethod
    def from_spin(cls, S, N):
        return cls(_twice(S), int(N))

    @property
    def S(self):
        return self.twice_S / 2

    @property
    def dim(self):
        return self.twice_S + 1

    @property
    def log_degeneracy(self):
        return _log_omega(self.twice_S, self.N)


@dataclass(frozen=True)
class SpinOperators:
    Sx: np.ndarray
    Sy: np.ndarray
    Sz: np.ndarray
    Sp: np.ndarray
    Sm: np.ndarray

    @property
    def dim(self):
        return self.Sz.shape[0]

    @property
    def S(self):
        return (self.dim - 1) / 2


def _twice(S):
    tS = 2 * S
    if isinstance(tS, float):
        if not tS.is_integer():
            raise ValueError(f"2S must be an integer, got S={S}")
    tS = int(round(tS))
    if tS < 0:
        raise ValueError(f"S must be non-negative, got S={S}")
    return tS


def _check_pair(twice_S, N):
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if twice_S < 0 or twice_S > N:
        raise ValueError(f"S={twice_S / 2} outside [0, N/2] for N={N}")
    if (N - twice_S) % 2:
        raise ValueError(f"parity mismatch: 2S={twice_S} and N={N} differ in parity")


def _log_omega(twice_S, N):
    # Omega(S, N) = N! (2S+1) / ((N/2 - S)! (N/2 + S + 1)!)
    a = (N - twice_S) // 2
    b = (N + twice_S) // 2 + 1
    return lgamma(N + 1) + log(twice_S + 1) - lgamma(a + 1) - lgamma(b + 1)


def build_spin_operators(S):
    """
    Spin-S matrices (hbar = 1) in the descending-m S_z eigenbasis.

    Parameters
    ----------
    S : int, float or half-integer
        Total spin; 2S must be a non-negative integer.

    Returns
    -------
    SpinOperators
        Sx, Sy, Sz (Hermitian) and the ladder matrices Sp = Sx + iSy, Sm = Sp^dagger.
    """
    tS = _twice(S)
    m = (tS - 2 * np.arange(tS + 1)) / 2.0
    s = tS / 2.0
    # <m+1|S+|m> = sqrt(S(S+1) - m(m+1)); row k holds m_k, so S+ sits on the first superdiagonal
    up = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    Sp = np.diag(up, 1).astype(complex)
    Sm = Sp.conj().T
    Sx = (Sp + Sm) / 2
    Sy = (Sp - Sm) / 2j
    Sz = np.diag(m).astype(complex)
    return SpinOperators(Sx=Sx, Sy=Sy, Sz=Sz, Sp=Sp, Sm=Sm)


def log_degeneracy(S, N):
    """Natural log of the multiplicity Omega(S, N) of spin-S irreps in N spins-1/2."""
    tS = _twice(S)
    _check_pair(tS, int(N))
    return _log_omega(tS, int(N))


def sector_list(N):
    """All sectors S = s0, s0+1, ..., N/2 in ascending order."""
    N = int(N)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return [SpinSector(tS, N) for tS in range(N % 2, N + 1, 2)]
