from math import comb, exp, log

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cavityeff.spin import SpinSector, build_spin_operators, log_degeneracy, sector_list


def test_spin_half_is_pauli_over_two():
    o = build_spin_operators(0.5)
    assert np.allclose(o.Sx, 0.5 * np.array([[0, 1], [1, 0]]))
    assert np.allclose(o.Sy, 0.5 * np.array([[0, -1j], [1j, 0]]))
    assert np.allclose(o.Sz, 0.5 * np.diag([1, -1]))


def test_spin_one_sz_descending():
    assert np.allclose(build_spin_operators(1).Sz, np.diag([1, 0, -1]))


def test_spin_three_halves_commutator_by_hand():
    o = build_spin_operators(1.5)
    # hand-written S+ for S=3/2: sqrt(3), 2, sqrt(3) on the superdiagonal
    sp = np.diag([np.sqrt(3), 2.0, np.sqrt(3)], 1)
    sx, sy = (sp + sp.T) / 2, (sp - sp.T) / 2j
    assert np.allclose(o.Sx, sx, atol=1e-14) and np.allclose(o.Sy, sy, atol=1e-14)
    assert np.abs(sx @ sy - sy @ sx - 1j * np.diag([1.5, 0.5, -0.5, -1.5])).max() < 1e-12


@pytest.mark.parametrize("tS", range(0, 21))
def test_algebra_and_casimir(tS):
    S = tS / 2
    o = build_spin_operators(S)
    for a, b, c in ((o.Sx, o.Sy, o.Sz), (o.Sy, o.Sz, o.Sx), (o.Sz, o.Sx, o.Sy)):
        assert np.abs(a @ b - b @ a - 1j * c).max() < 1e-12
    cas = o.Sx @ o.Sx + o.Sy @ o.Sy + o.Sz @ o.Sz
    assert np.abs(cas - S * (S + 1) * np.eye(o.dim)).max() < 1e-10
    assert np.allclose(o.Sp, o.Sx + 1j * o.Sy)
    assert np.array_equal(o.Sm, o.Sp.conj().T)


@pytest.mark.parametrize("bad", [-0.5, 0.25, 1.3])
def test_rejects_bad_spin(bad):
    with pytest.raises(ValueError):
        build_spin_operators(bad)


def test_degeneracy_examples():
    for N in (1, 2, 7, 40):
        assert log_degeneracy(N / 2, N) == pytest.approx(0.0, abs=1e-12)
    assert exp(log_degeneracy(0, 2)) == pytest.approx(1.0)
    assert exp(log_degeneracy(1, 2)) == pytest.approx(1.0)
    # three spins-1/2: 1/2 (x) 1/2 (x) 1/2 = 3/2 + 2 x 1/2
    assert exp(log_degeneracy(0.5, 3)) == pytest.approx(2.0)


@pytest.mark.parametrize("S,N", [(2, 3), (1, 3), (0.5, 2), (3, 4)])
def test_degeneracy_rejects_invalid_pairs(S, N):
    with pytest.raises(ValueError):
        log_degeneracy(S, N)


def test_degeneracy_against_binomial_counting():
    # Omega(S, N) = C(N, N/2-S) - C(N, N/2-S-1): independent counting of m = S states
    for N in range(1, 31):
        for s in sector_list(N):
            k = (N - s.twice_S) // 2
            want = comb(N, k) - (comb(N, k - 1) if k >= 1 else 0)
            assert s.log_degeneracy == pytest.approx(log(want), rel=1e-12, abs=1e-12)


def test_sum_rule_to_sixty():
    for N in range(1, 61):
        tot = np.logaddexp.reduce([s.log_degeneracy + log(s.dim) for s in sector_list(N)])
        assert tot == pytest.approx(N * log(2), rel=1e-9)


def test_large_N_no_overflow():
    v = log_degeneracy(0, 10_000)
    assert np.isfinite(v) and v > 0


def test_unimodal_up_to_200():
    for N in range(1, 201):
        w = [s.log_degeneracy for s in sector_list(N)]
        k = int(np.argmax(w))
        assert all(w[i + 1] <= w[i] + 1e-12 for i in range(k, len(w) - 1))
        assert all(w[i + 1] >= w[i] - 1e-12 for i in range(k))


def test_sector_list_examples():
    assert [s.S for s in sector_list(2)] == [0, 1]
    assert [s.S for s in sector_list(3)] == [0.5, 1.5]
    s100 = sector_list(100)
    assert len(s100) == 51 and s100[0].S == 0 and s100[-1].S == 50
    with pytest.raises(ValueError):
        sector_list(0)


@given(st.integers(1, 300).flatmap(lambda N: st.tuples(st.just(N), st.sampled_from(sector_list(N)))))
def test_sector_invariants(pair):
    N, s = pair
    assert s.dim == s.twice_S + 1
    assert s.log_degeneracy >= -1e-12
    assert SpinSector.from_spin(s.S, N) == s
