import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braidforge import linalg
from braidforge.linalg import MonomialOperator, TwoBandOperator
from braidforge.reps import almost_complex

from conftest import B8_TIMES_SQRT2, random_monomial


def pauli_m8():
    return np.kron(1j * linalg.SIGMA_Y, np.kron(linalg.SIGMA_X, linalg.SIGMA_X))


def test_pauli_constants():
    assert np.array_equal(linalg.ISIGMA_Y, np.array([[0, 1], [-1, 0]]))
    for p in (linalg.SIGMA_X, linalg.SIGMA_Y, linalg.SIGMA_Z):
        assert np.array_equal(p @ p, np.eye(2))
    assert np.array_equal(linalg.SIGMA_X @ linalg.SIGMA_Y, 1j * linalg.SIGMA_Z)


def test_kron_index_convention():
    a = np.arange(4).reshape(2, 2) + 1.0
    b = np.arange(9).reshape(3, 3) + 10.0
    out = linalg.kron(a, b)
    for i in range(2):
        for j in range(2):
            for k in range(3):
                for l in range(3):
                    assert out[i * 3 + k, j * 3 + l] == a[i, j] * b[k, l]


def test_kron_isigma_y_sigma_x():
    out = linalg.kron(linalg.ISIGMA_Y, linalg.SIGMA_X)
    want = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]])
    assert np.array_equal(out, want)


def test_kron_identities():
    assert np.array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))


def test_m8_equals_reference_b8_minus_identity():
    assert np.array_equal(pauli_m8(), B8_TIMES_SQRT2 - np.eye(8))


def test_kron_size_cap(monkeypatch):
    monkeypatch.setenv("BRAIDFORGE_DENSE_CAP", "8")
    with pytest.raises(linalg.SizeError):
        linalg.kron(np.eye(4), np.eye(4))
    assert linalg.kron(np.eye(2), np.eye(4)).shape == (8, 8)


def test_dense_cap_default_and_bad_env(monkeypatch):
    monkeypatch.delenv("BRAIDFORGE_DENSE_CAP", raising=False)
    assert linalg.dense_cap() == 2 ** 13
    monkeypatch.setenv("BRAIDFORGE_DENSE_CAP", "0")
    with pytest.raises(ValueError):
        linalg.dense_cap()


def test_kron_associative_integer(rng):
    a, b, c = (rng.integers(-3, 4, size=(2, 3)) for _ in range(3))
    assert np.array_equal(linalg.kron(linalg.kron(a, b), c), linalg.kron(a, linalg.kron(b, c)))


def test_monomial_validation():
    with pytest.raises(ValueError):
        MonomialOperator([0, 0], [1, 1])
    with pytest.raises(ValueError):
        MonomialOperator([0, 2], [1, 1])
    with pytest.raises(linalg.DimensionMismatch):
        MonomialOperator([0, 1], [1])
    m = MonomialOperator([1, 0], [1, 1])
    with pytest.raises(ValueError):
        m.target[0] = 1  # frozen arrays


def test_monomial_kron_small_cases():
    i2 = MonomialOperator.identity(2)
    assert i2.kron(i2).equals(MonomialOperator.identity(4))
    sx = MonomialOperator.from_dense(linalg.SIGMA_X)
    swap_pairs = sx.kron(sx)
    assert list(swap_pairs.target) == [3, 2, 1, 0]
    assert np.array_equal(swap_pairs.phase, np.ones(4))
    assert np.array_equal(swap_pairs.dense(), np.kron(linalg.SIGMA_X, linalg.SIGMA_X))


def test_monomial_kron_random_vs_dense(rng):
    for _ in range(50):
        p = random_monomial(rng, int(rng.integers(1, 9)))
        q = random_monomial(rng, int(rng.integers(1, 9)))
        assert np.array_equal(linalg.monomial_kron(p, q).dense(), np.kron(p.dense(), q.dense()))


def test_m8_apply_first_column():
    m8 = almost_complex(3)
    e1 = linalg.basis_vector(8, 1)
    out = linalg.monomial_apply(m8, e1)
    assert np.array_equal(out, -linalg.basis_vector(8, 8))
    assert np.array_equal(out, pauli_m8()[:, 0])
    assert np.array_equal(linalg.monomial_to_dense(m8), pauli_m8())


def test_compose_inverse_and_square(rng):
    p = random_monomial(rng, 16)
    assert linalg.monomial_compose(p, p.inverse()).max_deviation(MonomialOperator.identity(16)) < 1e-15
    m8 = almost_complex(3)
    assert m8.compose(m8).equals(MonomialOperator.identity(8).scale(-1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2 ** 32 - 1))
def test_compose_matches_dense_product(dim, seed):
    r = np.random.default_rng(seed)
    # signed permutations: exact
    p, q = random_monomial(r, dim, False), random_monomial(r, dim, False)
    ok, err = linalg.approx_eq(p.compose(q).dense(), p.dense() @ q.dense(), 0.0)
    assert ok, err
    # general phases: the BLAS oracle may round the complex product differently by an ulp
    p, q = random_monomial(r, dim), random_monomial(r, dim)
    ok, err = linalg.approx_eq(p.compose(q).dense(), p.dense() @ q.dense(), 1e-15)
    assert ok, err


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2 ** 32 - 1))
def test_apply_matches_dense_matvec_exactly(dim, seed):
    r = np.random.default_rng(seed)
    p = random_monomial(r, dim, unimodular=False)
    v = r.normal(size=dim) + 1j * r.normal(size=dim)
    assert np.array_equal(p.apply(v), p.dense() @ v)
    block = r.normal(size=(dim, 3))
    assert np.allclose(p.apply(block), p.dense() @ block, atol=0, rtol=0)


def test_apply_dimension_mismatch():
    with pytest.raises(linalg.DimensionMismatch):
        almost_complex(2).apply(np.ones(3))
    with pytest.raises(linalg.DimensionMismatch):
        almost_complex(2).compose(almost_complex(3))


def test_approx_eq_examples():
    x = np.arange(6).reshape(2, 3) * (1 + 1j)
    assert linalg.approx_eq(x, x, 1e-12) == (True, 0.0)
    ok, err = linalg.approx_eq(np.eye(2), linalg.SIGMA_Z, 1e-12)
    assert not ok and err == 2.0
    b8 = B8_TIMES_SQRT2 / np.sqrt(2)
    assert linalg.approx_eq(b8 @ b8.conj().T, np.eye(8), 1e-12)[0]
    with pytest.raises(linalg.DimensionMismatch):
        linalg.approx_eq(np.eye(2), np.eye(3))


def test_monomial_trace_adjoint_conjugation(rng):
    p = random_monomial(rng, 12)
    assert np.isclose(p.trace(), np.trace(p.dense()))
    assert np.allclose(p.adjoint().dense(), p.dense().conj().T)
    d = np.exp(1j * rng.random(12))
    assert np.allclose(p.conjugate_by_diagonal(d).dense(),
                       np.diag(d) @ p.dense() @ np.diag(d).conj())


def test_twoband_matches_dense(rng):
    m = random_monomial(rng, 32)
    op = TwoBandOperator.from_monomial(m, 0.3, -1.2j)
    dense = 0.3 * np.eye(32) - 1.2j * m.dense()
    assert np.allclose(op.dense(), dense, atol=1e-15)
    v = rng.normal(size=(32, 2))
    assert np.allclose(op.apply(v), dense @ v, atol=1e-14)
    assert np.isclose(op.trace(), np.trace(dense))


def test_twoband_merges_fixed_points():
    op = TwoBandOperator.from_monomial(MonomialOperator.identity(3), 1.0, 2.0)
    assert np.array_equal(op.dense(), 3 * np.eye(3))


def test_expand_product_and_sum_deviation(rng):
    ms = [random_monomial(rng, 16) for _ in range(3)]
    ops = [TwoBandOperator.from_monomial(m, 0.5, 0.7) for m in ms]
    terms = linalg.expand_product(ops)
    assert len(terms) == 8
    dense = ops[0].dense() @ ops[1].dense() @ ops[2].dense()
    total = sum(t.dense() for t in terms)
    assert np.allclose(total, dense, atol=1e-14)
    err, wit = linalg.sum_deviation(terms, [MonomialOperator.from_dense(np.eye(16))])
    assert np.isclose(err, np.abs(dense - np.eye(16)).max())
    assert wit is not None and 1 <= wit["row"] <= 16


def test_product_sweep_matches_dense(rng):
    a = TwoBandOperator.from_monomial(random_monomial(rng, 40), 1.0, 0.5)
    b = TwoBandOperator.from_monomial(random_monomial(rng, 40), 0.2, 1.0)
    err, wit = linalg.product_deviation([a, b], [b, a], 40, block=7)
    want = np.abs(a.dense() @ b.dense() - b.dense() @ a.dense()).max()
    assert np.isclose(err, want)
    r, c = wit["row"] - 1, wit["col"] - 1
    assert np.isclose(abs(a.dense() @ b.dense() - b.dense() @ a.dense())[r, c], want)


def test_json_round_trips(rng):
    mat = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
    assert np.array_equal(linalg.matrix_from_json(linalg.matrix_to_json(mat)), mat)
    m8 = almost_complex(3)
    obj = m8.to_json()
    assert obj["target"][0] == 8  # 1-based
    assert MonomialOperator.from_json(obj).equals(m8)
    v = rng.normal(size=4) + 0j
    assert np.array_equal(linalg.state_from_json(linalg.state_to_json(v)), v)
    with pytest.raises(ValueError):
        linalg.matrix_from_json({"rows": 2, "cols": 2, "entries": [[1, 0]]})


def test_sum_deviation_paths_agree(rng, monkeypatch):
    terms = [random_monomial(rng, 24, unimodular=False).scale(rng.normal()) for _ in range(6)]
    other = [random_monomial(rng, 24, unimodular=False) for _ in range(3)]
    want = np.abs(sum(t.dense() for t in terms) - sum(t.dense() for t in other)).max()
    fast = linalg.sum_deviation(terms, other)
    monkeypatch.setattr(linalg, "_COLUMNWISE_MAX_TERMS", 0)
    slow = linalg.sum_deviation(terms, other)
    assert np.isclose(fast[0], want) and np.isclose(slow[0], want)
    assert fast[1] == slow[1] or np.isclose(fast[0], slow[0])
