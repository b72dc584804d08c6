import math

import numpy as np
import pytest

from braidforge import ghz, linalg, reps, ybx
from braidforge.braid import BraidRep
from braidforge.linalg import MonomialOperator
from braidforge.reps import PhaseParams, RepSpec, SignConvention

from conftest import S, series_expm

M8 = reps.almost_complex(3)


def test_r_of_x_closed_forms():
    for x in (-3.0, -1.0, 0.0, 0.4, 1.0, 7.5):
        r = ybx.r_of_x(M8, x).dense()
        want = ((1 + x) * np.eye(8) + (1 - x) * M8.dense()) * S
        assert np.abs(r - want).max() <= 1e-15
        total = sum(t.dense() for t in ybx.b_plus_x_binv(M8, x))
        assert np.abs(total - want).max() <= 1e-14
        assert np.abs(r @ r.conj().T - ybx.rho(x) * np.eye(8)).max() <= 1e-13
        u = ybx.unitary_r(M8, x).dense()
        assert np.abs(u @ u.conj().T - np.eye(8)).max() <= 1e-14
    b = ghz.bell_matrix(3).dense()
    assert np.abs(ybx.r_of_x(M8, 0.0).dense() - b).max() == 0


def test_r_of_x_rejects_non_complex_structure():
    with pytest.raises(ybx.NotAlmostComplex):
        ybx.r_of_x(MonomialOperator.identity(4), 0.5)


def test_parameter_conversions():
    for x in (-4.0, -0.3, 0.0, 2.0):
        th = ybx.theta_from_x(x)
        assert math.isclose(math.cos(th), 1 / math.sqrt(1 + x * x), abs_tol=1e-15)
        assert math.isclose(math.sin(th), x / math.sqrt(1 + x * x), abs_tol=1e-15)
        assert math.isclose(ybx.x_from_theta(th), x, abs_tol=1e-14)
        assert math.isclose(ybx.theta_from_prime(ybx.theta_prime(th)), th)
        u = ybx.unitary_r(M8, x).dense()
        assert np.abs(u - ybx.b_of_theta(M8, th).dense()).max() <= 1e-14


@pytest.mark.parametrize("theta", [-1.1, 0.0, 0.3, math.pi / 4, 2.0])
def test_b_of_theta_matches_series(theta):
    want = series_expm((math.pi / 4 - theta) * M8.dense())
    assert np.abs(ybx.b_of_theta(M8, theta).dense() - want).max() <= 1e-10


def test_evolution_operator_matches_series():
    m = reps.build_mjj(2, PhaseParams.from_angles([0.3, -1.0]))
    for tp in (0.0, 0.7, -2.5):
        want = series_expm(-tp * m.dense())
        assert np.abs(ybx.evolution_operator(m, tp).dense() - want).max() <= 1e-10


def test_hamiltonian_hermitian_and_pauli():
    h = ybx.hamiltonian(M8)
    assert np.array_equal(h, h.conj().T)
    assert np.abs(h @ h - np.eye(8)).max() == 0
    want = np.kron(linalg.SIGMA_Y, np.kron(linalg.SIGMA_X, linalg.SIGMA_X))
    assert np.abs(h - want).max() == 0
    assert np.array_equal(ybx.hamiltonian_monomial(M8).dense(), h)


def test_schrodinger_finite_difference():
    h = ybx.hamiltonian(M8)
    step = 1e-6
    for tp in (0.0, 0.4, 1.3):
        for l in (1, 4, 7):
            d = (ybx.evolve(3, tp + step, l) - ybx.evolve(3, tp - step, l)) / (2 * step)
            assert np.abs(1j * d - h @ ybx.evolve(3, tp, l)).max() <= 1e-8


def test_time_dependent_hamiltonian_finite_difference():
    step = 1e-6
    for x in (2.0, -0.5, 0.0):
        u = ybx.unitary_r(M8, x).dense()
        du = (ybx.unitary_r(M8, x + step).dense() - ybx.unitary_r(M8, x - step).dense()) / (2 * step)
        h = 1j * du @ u.conj().T
        assert np.abs(h - ybx.time_dependent_hamiltonian(M8, x)).max() <= 1e-8
        assert np.abs(h - h.conj().T).max() <= 1e-8


def test_evolution_group_law(rng):
    for _ in range(10):
        a, b = rng.uniform(-3, 3, size=2)
        lhs = ybx.evolution_operator(M8, a).dense() @ ybx.evolution_operator(M8, b).dense()
        assert np.abs(lhs - ybx.evolution_operator(M8, a + b).dense()).max() <= 1e-14


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_evolve_matches_closed_form(N):
    for tp in (0.0, 0.3, math.pi / 4, 1.2, -2.0):
        for l in range(1, 2 ** N + 1):
            assert np.abs(ybx.evolve(N, tp, l) - ybx.evolve_closed_form(N, tp, l)).max() <= 1e-15


def test_evolve_quarter_turn_gives_ghz():
    for l in range(1, 9):
        v = ybx.evolve(3, -math.pi / 4, l)
        assert np.abs(v - ghz.bell_matrix(3).apply(ghz.basis_state(3, l))).max() <= 1e-15


@pytest.mark.parametrize("k", [1, 2, 3])
def test_class1_evolution_display_exhaustive(k, rng):
    phases = PhaseParams.from_angles(rng.uniform(-3, 3, size=k))
    for signs in (None, SignConvention(tuple((-1) ** p for p in range(2 * k)))):
        for tp in (0.0, 0.9, -1.7):
            for alpha in range(1, (2 * k) ** 2 + 1):
                got = ybx.class1_evolve(k, tp, alpha, phases, signs)
                want = ybx.class1_evolution_formula(k, tp, alpha, phases, signs)
                assert np.abs(got - want).max() <= 1e-15


@pytest.mark.parametrize("spec", [RepSpec.class1(2, 1), RepSpec.class2(2, 3, 2),
                                  RepSpec.class1(3, 2, PhaseParams.from_angles([0.5, 1.5]))],
                         ids=["c1", "c2", "c1-phased"])
def test_qybe_sweep(spec, rng):
    rep = BraidRep(spec)
    for x, y in rng.uniform(-5, 5, size=(15, 2)):
        assert ybx.verify_qybe(rep, x, y).passed
    for a, b in rng.uniform(-3, 3, size=(15, 2)):
        assert ybx.verify_qybe_additive(rep, a, b).passed


def test_qybe_dense_oracle():
    rep = BraidRep(RepSpec.class2(2, 3, 2))
    x, y = 0.7, -2.1
    r = lambda i, t: ybx.r_of_x(rep.group_generator(i), t).dense()
    lhs = r(1, x) @ r(2, x * y) @ r(1, y)
    rhs = r(2, y) @ r(1, x * y) @ r(2, x)
    t1, t2 = rep.group_generator(1).dense(), rep.group_generator(2).dense()
    p, q = 1 + x * y, 1 - x * y
    sym = (p * (x + y) * np.eye(rep.dim) + q * (y - x) * t1 @ t2 + p * q * (t1 + t2)) * S
    assert np.abs(lhs - rhs).max() <= 1e-12
    assert np.abs(lhs - sym).max() <= 1e-12
    report = ybx.verify_qybe(rep, x, y)
    assert report.passed and report.max_error <= 1e-12


def test_qybe_at_zero_is_braid_relation():
    rep = BraidRep(RepSpec.class1(2, 1))
    b1, b2 = rep.generator(1).dense(), rep.generator(2).dense()
    r = lambda i: ybx.r_of_x(rep.group_generator(i), 0.0).dense()
    assert np.abs(r(1) - b1).max() == 0 and np.abs(r(2) - b2).max() == 0
    assert ybx.verify_qybe(rep, 0.0, 0.0).passed


def test_qybe_adjacent_only():
    # k < N/2 breaks far-commutation, which the local relation never sees
    assert ybx.verify_qybe(BraidRep(RepSpec.class2(2, 3, 1)), 0.5, 0.5).passed


def test_qybe_detects_broken_squares():
    q = np.ones((2, 2), dtype=complex)
    q[0, 0] = np.exp(1j * np.pi / 3)
    rep = BraidRep(RepSpec.class1(2, 1, q_matrix=q))
    assert not ybx.verify_qybe(rep, 0.5, 1.5).passed


@pytest.mark.parametrize("spec", [RepSpec.class2(1, 3, 2), RepSpec.class1(1, 2),
                                  RepSpec.class2(2, 4, 3)], ids=["m8", "c1-k2", "c2-N4"])
def test_characteristic_vs_eigendecomposition(spec):
    rep = BraidRep(spec)
    for i in range(1, rep.strands):
        b = rep.generator(i)
        report = ybx.characteristic_check(b)
        assert report.passed
        ev = np.linalg.eigvals(b.dense())
        n_plus = int(np.sum(np.abs(ev - ybx.ZETA) < 1e-8))
        n_minus = int(np.sum(np.abs(ev - ybx.ZETA.conjugate()) < 1e-8))
        assert n_plus + n_minus == rep.dim
        assert n_plus == n_minus == rep.dim // 2


def test_characteristic_fails_for_non_braid_operator():
    op = linalg.TwoBandOperator.from_monomial(M8, 1.0, 1.0)  # missing the 1/sqrt2
    assert not ybx.characteristic_check(op).passed
