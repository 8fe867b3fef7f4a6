"""Sector-by-sector exact diagonalization of the Dicke-model variants."""

import time
from dataclasses import dataclass

import numpy as np

from . import models
from .fock import build_fock, converged_in_cutoff
from .spin import build_spin_operators, sector_list
from .thermo import (
    ThermoResult,
    bose_occupation,
    free_energy_from_spectra,
    log_z_oscillator,
    thermal_expectation,
)

MODELS = ("full", "full_polaron", "effective", "sw")


class WallTimeExceeded(RuntimeError):
    pass


@dataclass
class EDResult:
    model: str
    thermo: ThermoResult
    solved: list  # (SpinSector, eigenvalues, eigenvectors or None)


def _eigh(h, vectors):
    if np.max(np.abs(h.imag), initial=0.0) < 1e-14:
        h = h.real
    if vectors:
        return np.linalg.eigh(h)
    return np.linalg.eigvalsh(h), None


def diagonalize(p, model, vectors=False, deadline=None):
    """Eigen-decompose ``model`` in every spin sector of ``p.N`` (ascending S)."""
    if model not in models.BUILDERS:
        raise ValueError(f"unknown model {model!r}; choose from {sorted(models.BUILDERS)}")
    build = models.BUILDERS[model]
    out = []
    for sector in sector_list(p.N):
        if deadline is not None and time.monotonic() > deadline:
            raise WallTimeExceeded(f"wall-time cap hit at S={sector.S}")
        e, v = _eigh(build(p, sector), vectors)
        out.append((sector, e, v))
    return out


def log_prefactor(p, model):
    # the effective model traces the cavity out exactly: Z = Z_0 Tr_M e^{-beta H_eff}
    return log_z_oscillator(p.beta, p.omega_c) if model == "effective" else 0.0


def _spin_boson_ops(p, sector):
    sp = build_spin_operators(sector.S)
    fk = build_fock(p.n_ph)
    return sp, fk, np.eye(sector.dim), np.eye(fk.dim)


def _observables(p, model, solved):
    N, b = p.N, p.beta
    if model == "effective":
        sx2 = thermal_expectation(lambda s: _sx2(s), solved, b, N)
        photon = bose_occupation(b, p.omega_c) + (2 * p.g / p.omega_c) ** 2 * sx2
        return {"photon_number": float(photon), "sx2_over_n2": sx2 / N**2}

    def sx2_op(s):
        _, fk, _, ib = _spin_boson_ops(p, s)
        return np.kron(_sx2(s), ib)

    def n_op(s):
        sp, fk, isp, ib = _spin_boson_ops(p, s)
        n = np.kron(isp, fk.n)
        if model == "full_polaron":
            # lab-frame a = a_P - 2 zeta S_x
            z = p.zeta
            n = n - 2 * z * np.kron(sp.Sx, fk.a + fk.a_dag) + 4 * z**2 * np.kron(sp.Sx @ sp.Sx, ib)
        return n

    sx2 = thermal_expectation(sx2_op, solved, b, N)
    photon = thermal_expectation(n_op, solved, b, N)
    return {"photon_number": photon, "sx2_over_n2": sx2 / N**2}


def _sx2(sector):
    sx = build_spin_operators(sector.S).Sx
    return sx @ sx


def solve(p, model, observables=True, deadline=None, cutoff_tol=None):
    """
    Free energy per site (and optionally photon number, <S_x^2>/N^2) by ED.

    For ``model="sw"`` the observables are evaluated in the SW frame. With
    ``cutoff_tol`` the free energy per site is first required to agree with a
    run at ``n_ph + 5`` (models with a boson); CutoffNotConverged otherwise.
    """
    if cutoff_tol is not None and model != "effective":
        converged_in_cutoff(
            lambda n: solve(p.with_(n_ph=n), model, observables=False, deadline=deadline).thermo.free_energy_per_site,
            p.n_ph, cutoff_tol)
    solved = diagonalize(p, model, vectors=observables, deadline=deadline)
    th = free_energy_from_spectra([(s, e) for s, e, _ in solved], p.beta, p.N,
                                  log_prefactor=log_prefactor(p, model))
    if observables:
        th.observables.update(_observables(p, model, solved))
    return EDResult(model=model, thermo=th, solved=solved)


def log_z(p, model):
    return solve(p, model, observables=False).thermo.log_Z
