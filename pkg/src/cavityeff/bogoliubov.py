"""
Bogoliubov diagonalization of quadratic bosonic forms.

Convention: with Psi = (a_1..a_M, a_1^dag..a_M^dag) the Hamiltonian is
H = 1/2 Psi^dag Hmat Psi, Hmat = [[H1, H2], [H2^*, H1^*]], H1 Hermitian and
H2 symmetric. A transform T with Psi = T Phi, Phi = (b, b^dag), is
pseudo-unitary (T^dag I_- T = I_-) and makes T^dag Hmat T = diag(w, w).
"""

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .fock import build_fock

STABILITY_TOL = 1e-9


class UnstableFormError(ValueError):
    """The quadratic form has no bosonic normal-mode decomposition with positive frequencies."""


@dataclass(frozen=True)
class SingleModeBogo:
    Delta: float
    omega: float
    lambda_k: float
    cosh_theta: float
    sinh_theta: float
    omega_tilde: float


def single_mode(Delta, omega):
    """
    Closed-form transform of w a^dag a + Delta (a a + a a^dag + h.c.).

    lambda = sqrt(1 + 4 Delta / w), cosh(theta) = (lambda + 1) / (2 sqrt(lambda)),
    sinh(theta) = (lambda - 1) / (2 sqrt(lambda)), w~ = w lambda.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    if Delta < 0:
        raise ValueError("Delta must be non-negative")
    lam = sqrt(1 + 4 * Delta / omega)
    r = 2 * sqrt(lam)
    return SingleModeBogo(Delta=Delta, omega=omega, lambda_k=lam,
                          cosh_theta=(lam + 1) / r, sinh_theta=(lam - 1) / r,
                          omega_tilde=omega * lam)


@dataclass(frozen=True)
class QuadraticBosonForm:
    H1: np.ndarray
    H2: np.ndarray

    def __post_init__(self):
        h1 = np.atleast_2d(np.asarray(self.H1, dtype=complex))
        h2 = np.atleast_2d(np.asarray(self.H2, dtype=complex))
        if h1.shape != h2.shape or h1.shape[0] != h1.shape[1]:
            raise ValueError("H1 and H2 must be square with equal shapes")
        if not np.allclose(h1, h1.conj().T, rtol=0, atol=1e-12):
            raise ValueError("H1 must be Hermitian")
        if not np.allclose(h2, h2.T, rtol=0, atol=1e-12):
            raise ValueError("H2 must be symmetric")
        object.__setattr__(self, "H1", h1)
        object.__setattr__(self, "H2", h2)

    @property
    def M(self):
        return self.H1.shape[0]

    @property
    def matrix(self):
        return np.block([[self.H1, self.H2], [self.H2.conj(), self.H1.conj()]])

    @classmethod
    def from_modes(cls, omega, Delta, U, Ubar):
        """
        Photon form of sum_k w_k a_k^dag a_k + sum_kk' Delta_kk' (U a a + Ubar a a^dag + h.c.).

        H1 = 2 Delta * Ubar + diag(w), H2 = 2 Delta * U (elementwise products).
        """
        omega = np.asarray(omega, dtype=float)
        Delta = np.atleast_2d(np.asarray(Delta, dtype=float))
        return cls(H1=2 * Delta * np.asarray(Ubar) + np.diag(omega), H2=2 * Delta * np.asarray(U))


@dataclass(frozen=True)
class BogoTransform:
    T: np.ndarray
    omega_tilde: np.ndarray

    @property
    def M(self):
        return self.omega_tilde.size

    @property
    def alpha(self):
        return self.T[: self.M, : self.M]

    @property
    def beta(self):
        return self.T[: self.M, self.M:]


def i_minus(M):
    return np.diag(np.r_[np.ones(M), -np.ones(M)])


def _metric_gram_schmidt(vecs, eta):
    out = []
    for v in vecs:
        for u in out:
            v = v - (u.conj() @ eta @ v) * u
        nrm = (v.conj() @ eta @ v).real
        if nrm <= 0:
            raise UnstableFormError("degenerate mode with non-positive symplectic norm")
        out.append(v / sqrt(nrm))
    return out


def _fix_phase(v, M):
    # largest |component| of the annihilation block made real positive
    k = int(np.argmax(np.abs(v[:M]) + 1e-14 * np.arange(M, 0, -1)))
    ph = v[k] / abs(v[k]) if abs(v[k]) > 0 else 1.0
    return v / ph


def diagonalize_quadratic(form, degen_tol=1e-9):
    """
    Pseudo-unitary T with T^dag Hmat T = diag(w~, w~), w~ ascending.

    Modes come from the eigenvectors of I_- Hmat with positive symplectic norm;
    degenerate frequencies are re-orthonormalised in the I_- metric.
    """
    M = form.M
    hmat = form.matrix
    eta = i_minus(M)
    ev, vec = np.linalg.eig(eta @ hmat)
    scale = max(1.0, float(np.max(np.abs(ev))))
    if np.max(np.abs(ev.imag)) > STABILITY_TOL * scale:
        raise UnstableFormError("dynamically unstable form: complex normal-mode frequency")
    ev = ev.real
    norms = np.sum(vec.conj() * (eta @ vec), axis=0).real
    pos = np.where(norms > 0)[0]
    if pos.size != M or np.any(ev[pos] <= 0):
        raise UnstableFormError("form is not positive: some normal mode has non-positive frequency")
    order = pos[np.argsort(ev[pos], kind="stable")]
    freqs = ev[order]
    cols = [vec[:, j] for j in order]

    # group (near-)degenerate frequencies; deterministic order inside a group
    groups, start = [], 0
    for i in range(1, M + 1):
        if i == M or freqs[i] - freqs[start] > degen_tol * scale:
            groups.append(list(range(start, i)))
            start = i
    modes, omega = [], []
    for grp in groups:
        vs = [_fix_phase(cols[i], M) for i in grp]
        # descending |first component|, then descending lexicographic on |v|
        vs.sort(key=lambda v: tuple(-np.round(np.abs(v), 12)))
        vs = _metric_gram_schmidt(vs, eta)
        w = float(np.mean(freqs[grp]))
        for v in vs:
            modes.append(_fix_phase(v, M))
            omega.append(w if len(grp) > 1 else float(freqs[grp[0]]))
    X = np.array(modes).T  # (2M, M): columns (u; v)
    U, V = X[:M], X[M:]
    T = np.block([[U, V.conj()], [V, U.conj()]])
    return BogoTransform(T=T, omega_tilde=np.array(omega))


def pseudo_unitarity_residual(bogo):
    eta = i_minus(bogo.M)
    return float(np.max(np.abs(bogo.T.conj().T @ eta @ bogo.T - eta)))


def reconstruct(bogo):
    """Hmat recovered from T and the mode frequencies: T^-dag diag(w, w) T^-1."""
    d = np.diag(np.r_[bogo.omega_tilde, bogo.omega_tilde])
    eta = i_minus(bogo.M)
    tinv = eta @ bogo.T.conj().T @ eta  # pseudo-unitary inverse
    return tinv.conj().T @ d @ tinv


def transform_couplings(bogo, A_k, mode_fns):
    """
    Coupling amplitudes of the new modes b_k at each sampled position.

    With a_k = sum_k' alpha_kk' b_k' + beta_kk' b_k'^dag, the field
    sum_k A_k (u_k a_k + h.c.) becomes sum_k' (A~ u~)_k' b_k' + h.c. with

        (A~ u~)_k'(r) = sum_k A_k (u_k(r) alpha_kk' + u_k(r)^* beta_kk'^*).

    Parameters
    ----------
    A_k : (M,) array of mode amplitudes
    mode_fns : (M, ...) complex array, mode function samples (any trailing shape)

    Returns
    -------
    (M, ...) complex array indexed by the new mode.
    """
    A_k = np.asarray(A_k)
    u = np.asarray(mode_fns, dtype=complex)
    if A_k.shape != (bogo.M,) or u.shape[0] != bogo.M:
        raise ValueError(f"expected {bogo.M} amplitudes and mode functions, got {A_k.shape} and {u.shape}")
    au = A_k.reshape((-1,) + (1,) * (u.ndim - 1)) * u
    return (np.tensordot(bogo.alpha.T, au, axes=1)
            + np.tensordot(bogo.beta.conj().T, au.conj(), axes=1))


def quadratic_hamiltonian_matrix(form, fock_cutoff):
    """
    Dense H = sum H1_ij a_i^dag a_j + 1/2 sum (H2_ij a_i^dag a_j^dag + h.c.) on a
    truncated product Fock space (``fock_cutoff`` per mode). Brute-force reference.
    """
    M = form.M
    fk = build_fock(fock_cutoff)
    eye = np.eye(fk.dim)

    def embed(op, k):
        out = np.array([[1.0]])
        for j in range(M):
            out = np.kron(out, op if j == k else eye)
        return out

    a = [embed(fk.a, k) for k in range(M)]
    ad = [x.T for x in a]
    H = np.zeros((fk.dim**M,) * 2, dtype=complex)
    for i in range(M):
        for j in range(M):
            H += form.H1[i, j] * ad[i] @ a[j]
            H += 0.5 * (form.H2[i, j] * ad[i] @ ad[j] + np.conj(form.H2[i, j]) * a[j] @ a[i])
    return H


def ground_energy(form, bogo=None):
    """Exact ground energy of the normal-ordered form: (sum w~ - Tr H1) / 2."""
    bogo = bogo or diagonalize_quadratic(form)
    return 0.5 * (float(np.sum(bogo.omega_tilde)) - float(np.trace(form.H1).real))
