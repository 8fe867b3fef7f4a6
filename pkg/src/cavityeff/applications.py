"""
Evaluators built on the effective Hamiltonian: photon-condensation criteria,
the electron-gas momentum renormalization and cavity-mediated spin-spin couplings.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class CavityMode:
    """
    One transverse mode.

    ``u`` holds the mode function u_perp(r_j) sampled at every site, shape (n_sites, 3).
    """

    omega: float
    Delta: float
    c_e: float
    c_m: float
    polarization: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("mode frequency must be positive")
        if self.Delta < 0:
            raise ValueError("diamagnetic shift Delta must be >= 0")
        pol = np.asarray(self.polarization, dtype=float)
        if pol.shape != (3,) or abs(np.linalg.norm(pol) - 1) > 1e-9:
            raise ValueError("polarization must be a unit 3-vector")
        u = np.asarray(self.u, dtype=complex)
        if u.ndim != 2 or u.shape[1] != 3:
            raise ValueError("mode samples must have shape (n_sites, 3)")
        object.__setattr__(self, "polarization", pol)
        object.__setattr__(self, "u", u)

    @property
    def omega_tilde(self):
        return self.omega * np.sqrt(1 + 4 * self.Delta / self.omega)


@dataclass(frozen=True)
class ModeSet:
    modes: tuple
    positions: np.ndarray

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.size and pos.shape[1] != 3:
            raise ValueError("positions must be 3-vectors")
        for k, m in enumerate(self.modes):
            if m.u.shape[0] != pos.shape[0]:
                raise ValueError(f"mode {k} sampled at {m.u.shape[0]} sites, expected {pos.shape[0]}")
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return len(self.modes)


# --- photon condensation ------------------------------------------------------

def nogo_factor(Delta0, omega0):
    """
    Left side of the single-uniform-mode critical condition, 4 Delta / (w + 4 Delta).

    A condensate needs the factor to reach 1, which it never does; the second
    return value is therefore always False.
    """
    if Delta0 < 0 or omega0 <= 0:
        raise ValueError("need Delta0 >= 0 and omega0 > 0")
    factor = 4 * Delta0 / (omega0 + 4 * Delta0)
    # the exact value is below 1 for every finite Delta; keep that true once it rounds
    return min(factor, np.nextafter(1.0, 0.0)), False


def nogo_factor_without_A2(N, c0e, omega0):
    """Critical factor N c0^2 / w0^2 when the diamagnetic term is dropped; critical at >= 1."""
    if N <= 0 or omega0 <= 0 or c0e < 0:
        raise ValueError("need N > 0, omega0 > 0, c0e >= 0")
    factor = N * c0e**2 / omega0**2
    return factor, bool(factor >= 1)


def nonuniform_criterion(deltaE_matter, photon_occupations):
    """
    True iff the matter energy cost of a trial state is paid for by the cavity:
    dE <= sum_k w~_k n_k.

    ``photon_occupations`` is an iterable of (w~_k, n_k) pairs.
    """
    budget = 0.0
    for w, n in photon_occupations:
        if n < 0:
            raise ValueError(f"negative photon occupation {n}")
        if w <= 0:
            raise ValueError(f"mode frequency must be positive, got {w}")
        budget += w * n
    return bool(deltaE_matter <= budget)


# --- electron gas -------------------------------------------------------------

def electron_gas_factor(modes):
    """sum_k 4 Delta_k / (w_k + 4 Delta_k): the fraction of (e.P)^2 / 2m removed by the cavity."""
    return float(sum(4 * m.Delta / (m.omega + 4 * m.Delta) for m in modes.modes))


# --- magnetic couplings -------------------------------------------------------

@dataclass(frozen=True)
class SpinCouplingMatrix:
    """H_eff = H_S - sum_ij S_i . J[i, j] . S_j with J of shape (N, N, 3, 3)."""

    J: np.ndarray
    positions: np.ndarray

    def to_matrix(self):
        n = self.J.shape[0]
        return self.J.transpose(0, 2, 1, 3).reshape(3 * n, 3 * n)

    @property
    def n_sites(self):
        return self.J.shape[0]


def spin_coupling_matrix(modes, positions=None):
    """
    J[i, j] = sum_k (c_m^2 / w_k) Re[u_k(r_i) (x) u_k(r_j)^*].

    Taking the real part is the same as pairing each mode with its conjugate
    partner u_{-k} = u_k^*, so J stays real and symmetric. The Zeeman coupling
    carries no diamagnetic term, hence the bare frequency w_k.
    """
    pos = modes.positions if positions is None else np.atleast_2d(np.asarray(positions, dtype=float))
    n = pos.shape[0]
    J = np.zeros((n, n, 3, 3))
    for k, m in enumerate(modes.modes):
        if m.u.shape[0] != n:
            raise ValueError(f"mode {k} is missing samples: {m.u.shape[0]} of {n} sites")
        J += (m.c_m**2 / m.omega) * np.einsum("ia,jb->ijab", m.u, m.u.conj()).real
    return SpinCouplingMatrix(J=J, positions=pos)


# --- generators ---------------------------------------------------------------

def uniform_mode(positions, omega, c_m=0.0, c_e=0.0, Delta=0.0, polarization=(1.0, 0.0, 0.0)):
    """k -> 0 mode: u_perp(r) = e_pol at every site."""
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    pol = np.asarray(polarization, dtype=float)
    return CavityMode(omega=omega, Delta=Delta, c_e=c_e, c_m=c_m, polarization=pol,
                      u=np.tile(pol, (pos.shape[0], 1)))


def standing_wave_mode(positions, omega, k, c_m=0.0, c_e=0.0, Delta=0.0,
                       polarization=(0.0, 0.0, 1.0), axis=0):
    """1D cosine profile u_perp(r) = e_pol cos(k r_axis)."""
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    pol = np.asarray(polarization, dtype=float)
    amp = np.cos(k * pos[:, axis])
    return CavityMode(omega=omega, Delta=Delta, c_e=c_e, c_m=c_m, polarization=pol,
                      u=amp[:, None] * pol[None, :])


# --- file input ---------------------------------------------------------------

_CSV_U = ("ux_re", "ux_im", "uy_re", "uy_im", "uz_re", "uz_im")


def load_modes(path):
    """
    Read a ModeSet from JSON or CSV (chosen by suffix).

    JSON layout::

        {"positions": [[x, y, z], ...],
         "modes": [{"omega": .., "Delta": .., "c_e": .., "c_m": ..,
                    "polarization": [px, py, pz],
                    "u_re": [[..3..] per site], "u_im": [[..3..] per site]}]}

    CSV has one row per (mode, site) with columns
    mode, site, x, y, z, omega, Delta, c_e, c_m, pol_x, pol_y, pol_z, ux_re .. uz_im.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        return _modes_from_json(json.loads(path.read_text()))
    if path.suffix.lower() == ".csv":
        with path.open(newline="") as fh:
            return _modes_from_rows(list(csv.DictReader(fh)))
    raise ValueError(f"unsupported mode file type {path.suffix!r} (use .json or .csv)")


def _modes_from_json(doc):
    pos = np.asarray(doc["positions"], dtype=float)
    out = []
    for m in doc["modes"]:
        u = np.asarray(m["u_re"], dtype=float) + 1j * np.asarray(m.get("u_im", np.zeros_like(m["u_re"])), dtype=float)
        out.append(CavityMode(omega=float(m["omega"]), Delta=float(m.get("Delta", 0.0)),
                              c_e=float(m.get("c_e", 0.0)), c_m=float(m.get("c_m", 0.0)),
                              polarization=m["polarization"], u=u))
    return ModeSet(modes=tuple(out), positions=pos)


def _modes_from_rows(rows):
    if not rows:
        raise ValueError("mode file has no rows")
    sites = sorted({int(r["site"]) for r in rows})
    if sites != list(range(len(sites))):
        raise ValueError("site indices must run 0..n-1")
    pos = np.zeros((len(sites), 3))
    by_mode = {}
    for r in rows:
        s = int(r["site"])
        pos[s] = [float(r["x"]), float(r["y"]), float(r["z"])]
        by_mode.setdefault(int(r["mode"]), []).append(r)
    out = []
    for k in sorted(by_mode):
        rs = by_mode[k]
        if len(rs) != len(sites) or {int(r["site"]) for r in rs} != set(sites):
            raise ValueError(f"mode {k} is missing samples")
        u = np.zeros((len(sites), 3), dtype=complex)
        for r in rs:
            v = [float(r[c]) for c in _CSV_U]
            u[int(r["site"])] = [v[0] + 1j * v[1], v[2] + 1j * v[3], v[4] + 1j * v[5]]
        r0 = rs[0]
        out.append(CavityMode(omega=float(r0["omega"]), Delta=float(r0.get("Delta") or 0.0),
                              c_e=float(r0.get("c_e") or 0.0), c_m=float(r0.get("c_m") or 0.0),
                              polarization=[float(r0[c]) for c in ("pol_x", "pol_y", "pol_z")], u=u))
    return ModeSet(modes=tuple(out), positions=pos)
