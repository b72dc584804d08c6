"""Product-basis indexing, GHZ states and Bell matrices.

A spin word is a tuple of ``+1/2`` or ``-1/2`` values, most significant qubit
first.  Its 1-based index is ``2^{N-1} + 1/2 - sum_i 2^{N-i} m_i``, so
``+1/2`` plays the role of bit 0.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import linalg, reps
from .linalg import DEFAULT_TOL, INV_SQRT2, MonomialOperator, TwoBandOperator
from .report import VerificationReport, with_timing

HALF = Fraction(1, 2)


def _spin(m) -> Fraction:
    f = Fraction(m).limit_denominator(2)
    if f not in (HALF, -HALF):
        raise ValueError(f"spin must be +1/2 or -1/2, got {m}")
    return f


def basis_index(word) -> int:
    spins = [_spin(m) for m in word]
    n = len(spins)
    if n < 1:
        raise ValueError("empty spin word")
    k = Fraction(2 ** (n - 1)) + HALF - sum(Fraction(2 ** (n - i)) * m
                                            for i, m in enumerate(spins, start=1))
    assert k.denominator == 1
    return int(k)


def spin_word(N: int, k: int) -> tuple[Fraction, ...]:
    """Inverse of :func:`basis_index`."""
    _check_index(N, k)
    bits = k - 1
    return tuple(-HALF if (bits >> (N - i)) & 1 else HALF for i in range(1, N + 1))


def eps_prime(m) -> int:
    """``-1`` for spin ``+1/2`` and ``+1`` for ``-1/2``."""
    return -1 if _spin(m) == HALF else 1


def conjugate_index(N: int, l: int) -> int:
    _check_index(N, l)
    return 2 ** N - l + 1


def _check_index(N: int, l: int) -> None:
    if N < 1:
        raise ValueError("need N >= 1")
    if not 1 <= l <= 2 ** N:
        raise IndexError(f"index {l} outside 1..{2 ** N}")


def basis_state(N: int, k: int) -> np.ndarray:
    _check_index(N, k)
    return linalg.basis_vector(2 ** N, k)


def ghz_terms(N: int, j: int) -> tuple[tuple[int, float], tuple[int, float]]:
    """The two nonzero ``(index, amplitude)`` pairs of GHZ state ``j``."""
    _check_index(N, j)
    half = 2 ** (N - 1)
    if j <= half:
        return (j, INV_SQRT2), (conjugate_index(N, j), INV_SQRT2)
    l = conjugate_index(N, j)
    return (l, INV_SQRT2), (j, -INV_SQRT2)


def ghz_state(N: int, j: int) -> np.ndarray:
    v = np.zeros(2 ** N, dtype=complex)
    for idx, amp in ghz_terms(N, j):
        v[idx - 1] += amp
    return v


def ghz_basis(N: int) -> np.ndarray:
    """Matrix whose column ``j-1`` is GHZ state ``j``."""
    linalg._check_cap(2 ** N, None)
    return np.stack([ghz_state(N, j) for j in range(1, 2 ** N + 1)], axis=1)


# ---------------------------------------------------------------- Bell matrices


def even_qubit_block_k(N: int) -> int:
    """Class 1 half block size ``k`` with ``(2k)^2 = 2^N``; requires ``J = 2^{N/2-1} - 1/2``."""
    if N < 2 or N % 2:
        raise ValueError(f"the class 1 route needs an even qubit count >= 2, got {N}")
    return 2 ** (N // 2 - 1)


def require_block_spin(N: int, J) -> None:
    """Raise unless ``J`` has the value that makes ``M^{JJ}`` act on ``N`` qubits."""
    want = Fraction(even_qubit_block_k(N)) - HALF
    if Fraction(J) != want:
        raise ValueError(f"spanning all {2 ** N} GHZ states needs J = {want}, got J = {J}")


def almost_complex_for(N: int) -> MonomialOperator:
    """``M`` on ``N`` qubits: the undeformed ``M^{JJ}`` for even ``N``, else the class 2 block."""
    if N < 2:
        raise ValueError("Bell matrices need N >= 2")
    if N % 2 == 0:
        k = even_qubit_block_k(N)
        require_block_spin(N, Fraction(k) - HALF)
        return reps.build_mjj(k)
    return reps.almost_complex(N)


def bell_matrix(N: int) -> TwoBandOperator:
    return TwoBandOperator.from_monomial(almost_complex_for(N), INV_SQRT2, INV_SQRT2)


def class1_bell_matrix(k: int, phases=None) -> TwoBandOperator:
    """``(1 + M^{JJ})/sqrt 2`` for arbitrary admissible phases."""
    return TwoBandOperator.from_monomial(reps.build_mjj(k, phases), INV_SQRT2, INV_SQRT2)


def expected_ghz_columns(N: int) -> list[MonomialOperator]:
    """Two monomials summing to the matrix whose column ``j`` is GHZ state ``2^N - j + 1``."""
    dim = 2 ** N
    j = np.arange(1, dim + 1)
    partner = dim - j + 1
    # column j <= 2^{N-1} is (|j> - |partner>)/sqrt 2, the rest (|partner> + |j>)/sqrt 2
    second = np.where(j > dim // 2, INV_SQRT2, -INV_SQRT2)
    return [MonomialOperator(j - 1, np.full(dim, INV_SQRT2, dtype=complex)),
            MonomialOperator(partner - 1, second.astype(complex))]


@with_timing
def verify_ghz_columns(N: int, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Column ``j`` of the Bell matrix equals GHZ state ``2^N - j + 1`` exactly, sign included."""
    b = bell_matrix(N)
    err, wit = linalg.sum_deviation(list(b.bands()), expected_ghz_columns(N))
    cols = VerificationReport.leaf("column-law", err, tol, wit)
    # each column must also be (|l> + eps'(m_1)|l-bar>)/sqrt 2
    m = almost_complex_for(N)
    idx = np.arange(1, 2 ** N + 1)
    first_spin_up = idx <= 2 ** (N - 1)
    want_phase = np.where(first_spin_up, -1.0, 1.0)
    sign_err = float(np.max(np.abs(m.phase - want_phase)))
    tgt_err = float(np.max(np.abs(m.target - (2 ** N - idx))))
    signs = VerificationReport.leaf("eps-prime-signs", max(sign_err, tgt_err), tol)
    return VerificationReport.combine("ghz-columns", [cols, signs], tol, N=N, dim=2 ** N)
