import numpy as np
import pytest
from hypothesis import given, strategies as st

from cavityeff import bogoliubov as bg
from cavityeff.bogoliubov import QuadraticBosonForm


def random_stable_form(rng, M):
    """Positive-definite block matrix, hence a stable form (Williamson)."""
    h1 = rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M))
    h1 = h1 @ h1.conj().T + M * np.eye(M)
    h2 = rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M))
    h2 = 0.5 * (h2 + h2.T)
    # shrink H2 until the full matrix is positive definite
    while np.linalg.eigvalsh(np.block([[h1, h2], [h2.conj(), h1.conj()]])).min() <= 0.1:
        h2 *= 0.5
    return QuadraticBosonForm(h1, h2)


def test_single_mode_examples():
    s = bg.single_mode(0.0, 1.7)
    assert (s.lambda_k, s.cosh_theta, s.sinh_theta, s.omega_tilde) == (1.0, 1.0, 0.0, 1.7)
    s = bg.single_mode(2.0, 1.0)
    assert s.lambda_k == pytest.approx(3.0)
    assert s.cosh_theta == pytest.approx(2 / np.sqrt(3), rel=1e-15)
    assert s.sinh_theta == pytest.approx(1 / np.sqrt(3), rel=1e-15)
    with pytest.raises(ValueError):
        bg.single_mode(-0.1, 1.0)
    with pytest.raises(ValueError):
        bg.single_mode(0.1, 0.0)


@given(st.floats(0, 1e3), st.floats(1e-3, 1e3))
def test_single_mode_identities(delta, omega):
    s = bg.single_mode(delta, omega)
    assert abs(s.cosh_theta**2 - s.sinh_theta**2 - 1) < 1e-12 * max(1, s.cosh_theta**2)
    assert s.lambda_k >= 1
    assert s.omega_tilde**2 == pytest.approx(omega**2 + 4 * delta * omega, rel=1e-12)


def test_form_validation():
    with pytest.raises(ValueError):
        QuadraticBosonForm([[1, 1j], [1j, 1]], np.zeros((2, 2)))
    with pytest.raises(ValueError):
        QuadraticBosonForm(np.eye(2), [[0, 1], [2, 0]])


def test_decoupled_form_gives_identity():
    form = QuadraticBosonForm(np.diag([0.5, 1.0, 2.5]), np.zeros((3, 3)))
    t = bg.diagonalize_quadratic(form)
    assert np.allclose(t.T, np.eye(6), atol=1e-14)
    assert np.allclose(t.omega_tilde, [0.5, 1.0, 2.5])


def test_degenerate_identity_is_deterministic():
    t = bg.diagonalize_quadratic(QuadraticBosonForm(2 * np.eye(3), np.zeros((3, 3))))
    assert np.allclose(t.T, np.eye(6), atol=1e-14)


@pytest.mark.parametrize("omega,delta", [(1.0, 0.0), (1.0, 2.0), (0.3, 5.0), (7.0, 0.01)])
def test_single_mode_reduction(omega, delta):
    form = QuadraticBosonForm.from_modes([omega], [[delta]], [[1.0]], [[1.0]])
    t = bg.diagonalize_quadratic(form)
    s = bg.single_mode(delta, omega)
    assert t.omega_tilde[0] == pytest.approx(s.omega_tilde, rel=1e-12)
    assert abs(t.alpha[0, 0] - s.cosh_theta) < 1e-12
    assert abs(t.beta[0, 0] + s.sinh_theta) < 1e-12


def test_unstable_forms_rejected():
    with pytest.raises(bg.UnstableFormError, match="unstable"):
        bg.diagonalize_quadratic(QuadraticBosonForm([[1.0]], [[3.0]]))
    with pytest.raises(bg.UnstableFormError):
        bg.diagonalize_quadratic(QuadraticBosonForm([[-1.0]], [[0.0]]))


def test_random_forms_pseudo_unitary_and_round_trip():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        form = random_stable_form(rng, int(rng.integers(1, 9)))
        t = bg.diagonalize_quadratic(form)
        assert bg.pseudo_unitarity_residual(t) < 1e-10
        assert np.abs(bg.reconstruct(t) - form.matrix).max() < 1e-9
        d = t.T.conj().T @ form.matrix @ t.T
        assert np.abs(d - np.diag(np.diag(d))).max() < 1e-9
        assert np.all(t.omega_tilde > 0) and np.all(np.diff(t.omega_tilde) >= 0)


def test_two_mode_fock_spacings():
    rng = np.random.default_rng(11)
    form = random_stable_form(rng, 2)
    form = QuadraticBosonForm(form.H1 / 4, form.H2 / 8)
    t = bg.diagonalize_quadratic(form)
    e = np.linalg.eigvalsh(bg.quadratic_hamiltonian_matrix(form, 14))
    w1, w2 = t.omega_tilde
    assert e[0] == pytest.approx(bg.ground_energy(form, t), abs=1e-6)
    want = sorted(n1 * w1 + n2 * w2 for n1 in range(4) for n2 in range(4))[:5]
    assert np.allclose(e[:5] - e[0], want, atol=1e-6)


def test_transform_couplings():
    ident = bg.diagonalize_quadratic(QuadraticBosonForm(np.diag([1.0, 2.0]), np.zeros((2, 2))))
    u = np.array([[1.0 + 0.5j, 0.2], [0.3j, -1.0]])
    assert np.allclose(bg.transform_couplings(ident, [0.7, 1.1], u), [[0.7], [1.1]] * u)

    s = bg.single_mode(2.0, 1.0)
    one = bg.diagonalize_quadratic(QuadraticBosonForm.from_modes([1.0], [[2.0]], [[1.0]], [[1.0]]))
    r = bg.transform_couplings(one, [1.0], [[1.0]])
    assert r[0, 0].real == pytest.approx(s.cosh_theta - s.sinh_theta, rel=1e-12)
    assert r[0, 0].real == pytest.approx(s.lambda_k**-0.5, rel=1e-12)

    rng = np.random.default_rng(3)
    t = bg.diagonalize_quadratic(random_stable_form(rng, 2))
    A = rng.normal(size=2)
    uu = rng.normal(size=(2, 5)) + 1j * rng.normal(size=(2, 5))
    assert np.allclose(bg.transform_couplings(t, 2 * A, uu), 2 * bg.transform_couplings(t, A, uu))
    with pytest.raises(ValueError):
        bg.transform_couplings(t, A[:1], uu)


def test_transform_couplings_preserves_field_operator():
    # the field sum_k A_k (u_k a_k + h.c.) written in b, b^dag must be unchanged
    rng = np.random.default_rng(5)
    t = bg.diagonalize_quadratic(random_stable_form(rng, 3))
    A = rng.normal(size=3)
    u = rng.normal(size=3) + 1j * rng.normal(size=3)
    new = bg.transform_couplings(t, A, u)
    # F = v . Psi with Psi = (a, a^dag) and Psi = T Phi, so the b-coefficients are (v T)[:M]
    v = np.r_[A * u, A * u.conj()]
    coeff = v @ t.T
    assert np.allclose(new, coeff[:3], atol=1e-13)
    # and F stays Hermitian: the b^dag coefficients are the conjugates
    assert np.allclose(coeff[3:], coeff[:3].conj(), atol=1e-13)


@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_random_form_invariants(M, seed):
    t = bg.diagonalize_quadratic(random_stable_form(np.random.default_rng(seed), M))
    assert bg.pseudo_unitarity_residual(t) < 1e-10
    assert np.all(t.omega_tilde > 0)
