"""Spectral-parameter families built from an almost-complex monomial ``M``.

Everything here uses that ``M^2 = -1`` and ``M`` is anti-Hermitian.  With
those two facts, the spectral family, its unitary normalisation and the
exponential ``exp(a M)`` all reduce to ``a 1 + b M``.
"""
from __future__ import annotations

import math

import numpy as np

from . import ghz, linalg, reps
from .braid import BraidRep
from .linalg import DEFAULT_TOL, INV_SQRT2, MonomialOperator, TwoBandOperator
from .report import VerificationReport, with_timing

SQRT2 = math.sqrt(2.0)
ZETA = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))


class NotAlmostComplex(ValueError):
    pass


def check_almost_complex(m: MonomialOperator, tol: float = DEFAULT_TOL) -> None:
    err, _ = linalg.sum_deviation([m.compose(m)], [MonomialOperator.identity(m.dim).scale(-1)])
    if err > tol:
        raise NotAlmostComplex(f"M^2 differs from -1 by {err:.3g}")


def rho(x: float) -> float:
    return 1.0 + x * x


def theta_from_x(x: float) -> float:
    """``theta`` with ``cos theta = 1/sqrt(1+x^2)`` and ``sin theta = x/sqrt(1+x^2)``."""
    return math.atan(x)


def x_from_theta(theta: float) -> float:
    return math.tan(theta)


def theta_prime(theta: float) -> float:
    return theta - math.pi / 4


def theta_from_prime(tp: float) -> float:
    return tp + math.pi / 4


def r_of_x(m: MonomialOperator, x: float, check: bool = True) -> TwoBandOperator:
    """``((1+x) 1 + (1-x) M)/sqrt 2``."""
    if check:
        check_almost_complex(m)
    return TwoBandOperator.from_monomial(m, (1 + x) * INV_SQRT2, (1 - x) * INV_SQRT2)


def b_plus_x_binv(m: MonomialOperator, x: float) -> list[MonomialOperator]:
    """``B + x B^-1`` as a sum of monomial terms, ``B = (1 + M)/sqrt 2``."""
    b = TwoBandOperator.from_monomial(m, INV_SQRT2, INV_SQRT2)
    b_inv = TwoBandOperator.from_monomial(m, INV_SQRT2, -INV_SQRT2)
    return list(b.bands()) + [t.scale(x) for t in b_inv.bands()]


def unitary_r(m: MonomialOperator, x: float, check: bool = True) -> TwoBandOperator:
    """``rho(x)^{-1/2} R(x)``."""
    if check:
        check_almost_complex(m)
    s = INV_SQRT2 / math.sqrt(rho(x))
    return TwoBandOperator.from_monomial(m, (1 + x) * s, (1 - x) * s)


def b_of_theta(m: MonomialOperator, theta: float) -> TwoBandOperator:
    """``cos(pi/4 - theta) 1 + sin(pi/4 - theta) M``, i.e. ``exp((pi/4 - theta) M)``."""
    a = math.pi / 4 - theta
    return TwoBandOperator.from_monomial(m, math.cos(a), math.sin(a))


def evolution_operator(m: MonomialOperator, tp: float) -> TwoBandOperator:
    """``exp(-tp M) = cos(tp) 1 - sin(tp) M``."""
    return TwoBandOperator.from_monomial(m, math.cos(tp), -math.sin(tp))


def hamiltonian(m: MonomialOperator) -> np.ndarray:
    """``H = -i M`` as a dense Hermitian matrix."""
    return -1j * m.dense()


def hamiltonian_monomial(m: MonomialOperator) -> MonomialOperator:
    return m.scale(-1j)


def time_dependent_hamiltonian(m: MonomialOperator, x: float) -> np.ndarray:
    return -1j * m.dense() / rho(x)


def evolve(N: int, tp: float, l: int) -> np.ndarray:
    """``exp(-tp M)|Phi_l>`` on ``N`` qubits."""
    m = ghz.almost_complex_for(N)
    return evolution_operator(m, tp).apply(ghz.basis_state(N, l))


def evolve_closed_form(N: int, tp: float, l: int) -> np.ndarray:
    """``cos(tp)|l> - sin(tp) eps'(m_1)|l-bar>`` from index arithmetic alone."""
    v = math.cos(tp) * ghz.basis_state(N, l)
    first = ghz.spin_word(N, l)[0]
    v[ghz.conjugate_index(N, l) - 1] -= math.sin(tp) * ghz.eps_prime(first)
    return v


def class1_evolve(k: int, tp: float, alpha: int, phases=None, signs=None) -> np.ndarray:
    """``exp(-tp M^{JJ})|alpha>`` with ``alpha = (mu-1) 2k + nu`` (1-based)."""
    m = reps.build_mjj(k, phases, signs)
    return evolution_operator(m, tp).apply(linalg.basis_vector(m.dim, alpha))


def class1_evolution_formula(k: int, tp: float, alpha: int, phases=None, signs=None) -> np.ndarray:
    """``cos(tp)|alpha> - sin(tp) eps(mu-bar) q_{mu-bar nu-bar} |alpha-bar>``."""
    n = 2 * k
    phases = reps.PhaseParams.trivial(k) if phases is None else phases
    signs = reps.SignConvention.default(k) if signs is None else signs
    q = phases.pair_matrix()
    mu, nu = divmod(alpha - 1, n)
    mu_bar, nu_bar = n - 1 - mu, n - 1 - nu
    alpha_bar = n * n + 1 - alpha
    v = math.cos(tp) * linalg.basis_vector(n * n, alpha)
    v[alpha_bar - 1] -= math.sin(tp) * signs.eps[mu_bar] * q[mu_bar, nu_bar]
    return v


# ---------------------------------------------------------------- verifiers


def _spectral(rep: BraidRep, i: int, x: float) -> TwoBandOperator:
    return r_of_x(rep.group_generator(i), x, check=False)


def _additive(rep: BraidRep, i: int, theta: float) -> TwoBandOperator:
    return TwoBandOperator.from_monomial(rep.group_generator(i), 1.0, math.tanh(theta))


@with_timing
def verify_qybe(rep: BraidRep, x: float, y: float, tol: float = DEFAULT_TOL) -> VerificationReport:
    """``R_i(x) R_{i+1}(xy) R_i(y) = R_{i+1}(y) R_i(xy) R_{i+1}(x)`` for every ``i``.

    Each side is also compared with the symmetric expansion
    ``(1+xy)(x+y) 1 + (1-xy)(y-x) T_i T_{i+1} + (1+xy)(1-xy)(T_i + T_{i+1})``
    divided by ``sqrt 2``.
    """
    main, closed = [], []
    for i in range(1, rep.strands - 1):
        lhs = linalg.expand_product([_spectral(rep, i, x), _spectral(rep, i + 1, x * y),
                                     _spectral(rep, i, y)])
        rhs = linalg.expand_product([_spectral(rep, i + 1, y), _spectral(rep, i, x * y),
                                     _spectral(rep, i + 1, x)])
        err, wit = linalg.sum_deviation(lhs, rhs)
        main.append((err, {"i": i, **(wit or {})}))
        ti, tj = rep.group_generator(i), rep.group_generator(i + 1)
        ident = MonomialOperator.identity(rep.dim)
        p, q = 1 + x * y, 1 - x * y
        sym = [ident.scale(p * (x + y) / SQRT2), ti.compose(tj).scale(q * (y - x) / SQRT2),
               ti.scale(p * q / SQRT2), tj.scale(p * q / SQRT2)]
        e1, w1 = linalg.sum_deviation(lhs, sym)
        e2, w2 = linalg.sum_deviation(rhs, sym)
        closed.append((e1, {"i": i, "side": "lhs", **(w1 or {})}) if e1 >= e2
                      else (e2, {"i": i, "side": "rhs", **(w2 or {})}))
    children = [VerificationReport.worst("qybe", main, tol), VerificationReport.worst("symmetric-form", closed, tol)]
    return VerificationReport.combine("qybe", children, tol, x=x, y=y, strands=rep.strands)


@with_timing
def verify_qybe_additive(rep: BraidRep, theta1: float, theta2: float,
                         tol: float = DEFAULT_TOL) -> VerificationReport:
    """Same relation for ``R_i(t) = 1 + tanh(t) T_i`` with additive parameters."""
    items = []
    s = theta1 + theta2
    for i in range(1, rep.strands - 1):
        lhs = [_additive(rep, i, theta1), _additive(rep, i + 1, s), _additive(rep, i, theta2)]
        rhs = [_additive(rep, i + 1, theta2), _additive(rep, i, s), _additive(rep, i + 1, theta1)]
        err, wit = linalg.sum_deviation(linalg.expand_product(lhs), linalg.expand_product(rhs))
        items.append((err, {"i": i, **(wit or {})}))
    rep_ = VerificationReport.worst("qybe-additive", items, tol)
    rep_.info.update(theta1=theta1, theta2=theta2, strands=rep.strands)
    return rep_


@with_timing
def characteristic_check(b: TwoBandOperator, tol: float = DEFAULT_TOL) -> VerificationReport:
    """``(B - zeta)(B - zeta*) = B^2 - sqrt2 B + 1 = 0`` and equal eigenvalue multiplicities."""
    ident = MonomialOperator.identity(b.dim)
    lhs = linalg.expand_product([b, b]) + [ident]
    rhs = [t.scale(SQRT2) for t in b.bands()]
    err, wit = linalg.sum_deviation(lhs, rhs)
    residual = VerificationReport.leaf("residual", err, tol, wit)
    # trace = n+ zeta + n- conj(zeta), n+ + n- = dim
    tr = b.trace()
    diff = SQRT2 * tr.imag
    n_plus = (b.dim + diff) / 2
    n_minus = (b.dim - diff) / 2
    balance = VerificationReport.leaf("balanced-spectrum", abs(diff), tol,
                                      {"n_plus": n_plus, "n_minus": n_minus},
                                      n_plus=n_plus, n_minus=n_minus)
    return VerificationReport.combine("characteristic", [residual, balance], tol, dim=b.dim)

