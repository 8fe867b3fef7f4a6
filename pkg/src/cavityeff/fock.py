"""Truncated single-mode Fock space and hyperbolic functions of anti-Hermitian operators."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FockOperators:
    cutoff: int
    a: np.ndarray
    a_dag: np.ndarray
    n: np.ndarray

    @property
    def dim(self):
        return self.cutoff + 1

    @property
    def identity(self):
        return np.eye(self.dim)


def build_fock(n_ph):
    """Ladder matrices on span{|0>, ..., |n_ph>} with a|n> = sqrt(n)|n-1>."""
    n_ph = int(n_ph)
    if n_ph < 1:
        raise ValueError(f"Fock cutoff must be >= 1, got {n_ph}")
    a = np.diag(np.sqrt(np.arange(1, n_ph + 1, dtype=float)), 1)
    a_dag = a.T.copy()
    n = np.diag(np.arange(n_ph + 1, dtype=float))
    return FockOperators(cutoff=n_ph, a=a, a_dag=a_dag, n=n)


def cosh_sinh_of(alpha, atol=1e-12):
    """
    cosh and sinh of an anti-Hermitian matrix from one eigendecomposition.

    ``i*alpha`` is Hermitian with real spectrum x, so alpha = -i V x V^dagger and
    cosh(alpha) = V cos(x) V^dagger (Hermitian), sinh(alpha) = -i V sin(x) V^dagger
    (anti-Hermitian).
    """
    alpha = np.asarray(alpha)
    if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
        raise ValueError("expected a square matrix")
    if np.max(np.abs(alpha + alpha.conj().T), initial=0.0) > atol:
        raise ValueError("cosh_sinh_of requires an anti-Hermitian argument")
    x, v = np.linalg.eigh(1j * alpha)
    vh = v.conj().T
    cosh = (v * np.cos(x)) @ vh
    sinh = -1j * ((v * np.sin(x)) @ vh)
    cosh = (cosh + cosh.conj().T) / 2
    sinh = (sinh - sinh.conj().T) / 2
    if np.isrealobj(alpha):
        # real anti-symmetric input -> real cosh and sinh
        cosh, sinh = cosh.real, sinh.real
    return cosh, sinh


def displacement_cosh_sinh(zeta2, n_ph, pad=None):
    """
    cosh/sinh of alpha = zeta2 (a^dagger - a) projected onto the lowest n_ph+1 levels.

    The functions are evaluated in a padded Fock space and then truncated, so the
    retained block carries the infinite-space matrix elements rather than the
    spectrum of the truncated generator.
    """
    if pad is None:
        pad = max(40, n_ph, int(8 * abs(zeta2) ** 2) + 20)
    big = build_fock(n_ph + pad)
    c, s = cosh_sinh_of(zeta2 * (big.a_dag - big.a))
    k = n_ph + 1
    return c[:k, :k], s[:k, :k]


class CutoffNotConverged(RuntimeError):
    pass


def converged_in_cutoff(fn, n_ph, tol, step=5):
    """
    Return ``fn(n_ph)`` after checking it moves by at most ``tol`` at ``n_ph + step``.

    ``fn`` maps a cutoff to a scalar. Raises CutoffNotConverged otherwise.
    """
    lo, hi = fn(n_ph), fn(n_ph + step)
    if not abs(hi - lo) <= tol:
        raise CutoffNotConverged(
            f"result changed by {abs(hi - lo):.3e} > {tol:.1e} between cutoffs {n_ph} and {n_ph + step}")
    return lo
