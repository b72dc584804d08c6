import itertools
from fractions import Fraction

import numpy as np
import pytest

from braidforge import ghz, linalg

from conftest import B8_TIMES_SQRT2, S

H = Fraction(1, 2)


def test_basis_index_two_qubits():
    assert ghz.basis_index((H, H)) == 1
    assert ghz.basis_index((H, -H)) == 2
    assert ghz.basis_index((-H, H)) == 3
    assert ghz.basis_index((-H, -H)) == 4
    assert ghz.basis_index((0.5, 0.5, 0.5)) == 1
    assert ghz.basis_index(("1/2", "-1/2")) == 2
    with pytest.raises(ValueError):
        ghz.basis_index((1, H))


@pytest.mark.parametrize("N", range(1, 11))
def test_basis_index_bijection_and_flip(N):
    seen = set()
    for word in itertools.product((H, -H), repeat=N):
        k = ghz.basis_index(word)
        seen.add(k)
        flipped = tuple(-m for m in word)
        assert ghz.basis_index(flipped) == 2 ** N - k + 1
        assert ghz.spin_word(N, k) == word
    assert seen == set(range(1, 2 ** N + 1))


def test_eps_prime():
    assert ghz.eps_prime(H) == -1
    assert ghz.eps_prime(-H) == 1


def bell_states_by_hand():
    e = np.eye(4)
    return {1: (e[0] + e[3]) * S, 2: (e[1] + e[2]) * S, 3: (e[1] - e[2]) * S, 4: (e[0] - e[3]) * S}


def test_two_qubit_ghz_are_bell_states():
    for j, v in bell_states_by_hand().items():
        assert np.array_equal(ghz.ghz_state(2, j), v)


def test_one_qubit():
    assert np.array_equal(ghz.ghz_state(1, 1), np.array([S, S]))
    assert np.array_equal(ghz.ghz_state(1, 2), np.array([S, -S]))


@pytest.mark.parametrize("N", range(1, 11))
def test_ghz_orthonormal_and_sparse(N):
    g = ghz.ghz_basis(N)
    assert np.abs(g.conj().T @ g - np.eye(2 ** N)).max() <= 1e-14
    for j in range(1, 2 ** N + 1):
        nz = set(np.nonzero(g[:, j - 1])[0] + 1)
        l = min(nz)
        assert nz == {l, 2 ** N - l + 1}


def test_ghz_index_errors():
    with pytest.raises(IndexError):
        ghz.ghz_state(2, 5)
    with pytest.raises(ValueError):
        ghz.bell_matrix(1)


def test_bell_matrix_n3_reference():
    assert np.abs(ghz.bell_matrix(3).dense() * np.sqrt(2) - B8_TIMES_SQRT2).max() <= 1e-15


def test_bell_first_column_sign():
    out = ghz.bell_matrix(3).apply(ghz.basis_state(3, 1))
    want = (ghz.basis_state(3, 1) + ghz.eps_prime(H) * ghz.basis_state(3, 8)) * S
    assert np.array_equal(out, want)


@pytest.mark.parametrize("N", range(2, 13))
def test_bell_unitarity_structured(N):
    b = ghz.bell_matrix(N)
    dim = 2 ** N
    adj_bands = [mono.adjoint() for mono in b.bands()]
    terms = [p.compose(q) for p in b.bands() for q in adj_bands]
    err, _ = linalg.sum_deviation(terms, [linalg.MonomialOperator.identity(dim)])
    assert err <= 1e-13
    rows, coeff = b.column_entries()
    assert np.all(np.abs(np.abs(coeff) - S) <= 1e-15)


def test_column_order_n3_and_n2():
    d3 = ghz.bell_matrix(3).dense()
    for j in range(1, 9):
        assert np.array_equal(d3[:, j - 1], ghz.ghz_state(3, 9 - j))
    d2 = ghz.bell_matrix(2).dense()
    bell = bell_states_by_hand()
    assert all(np.array_equal(d2[:, j - 1], bell[5 - j]) for j in range(1, 5))


@pytest.mark.parametrize("N", range(2, 11))
def test_verify_columns(N):
    assert ghz.verify_ghz_columns(N).passed


@pytest.mark.parametrize("N", [2, 4, 6])
def test_even_route_uses_class1_block(N):
    k = ghz.even_qubit_block_k(N)
    assert (2 * k) ** 2 == 2 ** N
    assert ghz.almost_complex_for(N).equals(ghz.reps.build_mjj(k))
    assert ghz.almost_complex_for(N).equals(ghz.reps.almost_complex(N))


def test_block_spin_precondition():
    ghz.require_block_spin(4, Fraction(3, 2))
    with pytest.raises(ValueError, match="J = 3/2"):
        ghz.require_block_spin(4, Fraction(1, 2))
    with pytest.raises(ValueError):
        ghz.even_qubit_block_k(3)


def test_verify_columns_detects_wrong_sign(monkeypatch):
    flipped = ghz.reps.almost_complex(3).scale(-1)
    monkeypatch.setattr(ghz, "almost_complex_for", lambda N: flipped)
    assert not ghz.verify_ghz_columns(3).passed
