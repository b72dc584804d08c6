"""Dense helpers and exact monomial / two-band operators.

Basis indices exposed to callers are 1-based (``|Phi_1>`` is the first
product-basis vector); arrays are stored 0-based.  The tensor-product
convention is ``(A (x) B)[i*dim(B) + k, j*dim(B) + l] = A[i, j] * B[k, l]``,
i.e. the first factor is the most significant digit, which is what
``numpy.kron`` does.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

SQRT_M1 = 1j
INV_SQRT2 = 1.0 / np.sqrt(2.0)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
ISIGMA_Y = SQRT_M1 * SIGMA_Y  # [[0, 1], [-1, 0]]
IDENTITY_2 = np.eye(2, dtype=complex)

DEFAULT_TOL = 1e-10
DEFAULT_DENSE_CAP = 2 ** 13
_DENSE_CAP_ENV = "BRAIDFORGE_DENSE_CAP"


class SizeError(ValueError):
    """Raised when a dense object would exceed the configured dimension cap."""


class DimensionMismatch(ValueError):
    pass


def dense_cap() -> int:
    """Current dense-path dimension cap (``BRAIDFORGE_DENSE_CAP`` overrides)."""
    raw = os.environ.get(_DENSE_CAP_ENV)
    if raw is None:
        return DEFAULT_DENSE_CAP
    cap = int(raw)
    if cap < 1:
        raise ValueError(f"{_DENSE_CAP_ENV} must be positive, got {raw!r}")
    return cap


def _check_cap(dim: int, cap: int | None) -> None:
    limit = dense_cap() if cap is None else cap
    if dim > limit:
        raise SizeError(f"dense dimension {dim} exceeds cap {limit}")


def kron(a: np.ndarray, b: np.ndarray, *, cap: int | None = None) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    _check_cap(max(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), cap)
    return np.kron(a, b)


def kron_all(factors: Iterable[np.ndarray], *, cap: int | None = None) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = kron(out, f, cap=cap)
    return out


def approx_eq(a, b, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Entrywise comparison; returns ``(max|a - b| <= tol, max|a - b|)``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return True, 0.0
    err = float(np.max(np.abs(a - b)))
    return err <= tol, err


def basis_vector(dim: int, k: int) -> np.ndarray:
    """The 1-based basis vector ``|Phi_k>`` of ``C^dim``."""
    if not 1 <= k <= dim:
        raise IndexError(f"basis index {k} outside 1..{dim}")
    v = np.zeros(dim, dtype=complex)
    v[k - 1] = 1.0
    return v


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MonomialOperator:
    """Phased permutation matrix: column ``j`` holds ``phase[j]`` at row ``target[j]``.

    ``target`` is stored 0-based; the JSON form uses 1-based rows.
    """

    target: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        target = np.asarray(self.target, dtype=np.int64)
        phase = np.asarray(self.phase, dtype=complex)
        if target.ndim != 1 or target.shape != phase.shape:
            raise DimensionMismatch("target and phase must be 1-d arrays of equal length")
        dim = target.size
        if dim and (target.min() < 0 or target.max() >= dim
                    or np.bincount(target, minlength=dim).max() != 1):
            raise ValueError("target is not a permutation")
        object.__setattr__(self, "target", _frozen(target))
        object.__setattr__(self, "phase", _frozen(phase))

    @property
    def dim(self) -> int:
        return self.target.size

    @classmethod
    def identity(cls, dim: int) -> MonomialOperator:
        return cls(np.arange(dim), np.ones(dim, dtype=complex))

    @classmethod
    def from_dense(cls, mat: np.ndarray, tol: float = 1e-12) -> MonomialOperator:
        mat = np.asarray(mat, dtype=complex)
        nz = np.abs(mat) > tol
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or np.any(nz.sum(axis=0) != 1):
            raise ValueError("matrix is not monomial")
        target = np.argmax(nz, axis=0)
        return cls(target, mat[target, np.arange(mat.shape[1])])

    def is_unimodular(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(np.abs(self.phase) - 1.0) <= tol))

    def apply(self, v: np.ndarray) -> np.ndarray:
        """``self @ v`` for a vector or a stack of column vectors (axis 0)."""
        v = np.asarray(v)
        if v.shape[0] != self.dim:
            raise DimensionMismatch(f"operator dim {self.dim} vs vector dim {v.shape[0]}")
        out = np.empty(v.shape, dtype=np.result_type(v.dtype, self.phase.dtype))
        ph = self.phase.reshape((-1,) + (1,) * (v.ndim - 1))
        out[self.target] = ph * v
        return out

    def compose(self, other: MonomialOperator) -> MonomialOperator:
        """Matrix product ``self @ other``."""
        if self.dim != other.dim:
            raise DimensionMismatch(f"{self.dim} vs {other.dim}")
        return MonomialOperator(self.target[other.target],
                                other.phase * self.phase[other.target])

    __matmul__ = compose

    def kron(self, other: MonomialOperator) -> MonomialOperator:
        dim = self.dim * other.dim  # structured path: no dense cap
        target = (self.target[:, None] * other.dim + other.target[None, :]).reshape(dim)
        phase = np.multiply.outer(self.phase, other.phase).reshape(dim)
        return MonomialOperator(target, phase)

    def scale(self, c: complex) -> MonomialOperator:
        return MonomialOperator(self.target, c * self.phase)

    def __neg__(self) -> MonomialOperator:
        return self.scale(-1.0)

    def inverse(self) -> MonomialOperator:
        inv_target = np.empty_like(self.target)
        inv_target[self.target] = np.arange(self.dim)
        return MonomialOperator(inv_target, 1.0 / self.phase[inv_target])

    def adjoint(self) -> MonomialOperator:
        inv_target = np.empty_like(self.target)
        inv_target[self.target] = np.arange(self.dim)
        return MonomialOperator(inv_target, np.conj(self.phase[inv_target]))

    def trace(self) -> complex:
        fixed = self.target == np.arange(self.dim)
        return complex(self.phase[fixed].sum())

    def dense(self, *, cap: int | None = None) -> np.ndarray:
        _check_cap(self.dim, cap)
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        mat[self.target, np.arange(self.dim)] = self.phase
        return mat

    def conjugate_by_diagonal(self, d: np.ndarray) -> MonomialOperator:
        """``D @ self @ D^dagger`` for ``D = diag(d)`` with unimodular ``d``."""
        d = np.asarray(d, dtype=complex)
        return MonomialOperator(self.target, d[self.target] * self.phase * np.conj(d))

    def max_deviation(self, other: MonomialOperator) -> float:
        """Max entrywise ``|self - other|`` without densifying."""
        if self.dim != other.dim:
            raise DimensionMismatch(f"{self.dim} vs {other.dim}")
        same = self.target == other.target
        err_same = np.abs(self.phase - other.phase)[same]
        err_diff = np.maximum(np.abs(self.phase), np.abs(other.phase))[~same]
        return float(max(err_same.max(initial=0.0), err_diff.max(initial=0.0)))

    def equals(self, other: MonomialOperator) -> bool:
        return self.dim == other.dim and self.max_deviation(other) == 0.0

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "target": [int(t) + 1 for t in self.target],
            "phase": complex_list_to_json(self.phase),
        }

    @classmethod
    def from_json(cls, obj: dict) -> MonomialOperator:
        target = np.asarray(obj["target"], dtype=np.int64) - 1
        if len(target) != obj["dim"]:
            raise ValueError("monomial JSON: len(target) != dim")
        return cls(target, complex_list_from_json(obj["phase"]))

    def __repr__(self) -> str:
        return f"MonomialOperator(dim={self.dim})"


def monomial_kron(p: MonomialOperator, q: MonomialOperator) -> MonomialOperator:
    return p.kron(q)


def monomial_kron_all(factors: Sequence[MonomialOperator]) -> MonomialOperator:
    out = MonomialOperator.identity(1)
    for f in factors:
        out = out.kron(f)
    return out


def monomial_compose(p: MonomialOperator, q: MonomialOperator) -> MonomialOperator:
    return p.compose(q)


def monomial_apply(p: MonomialOperator, v: np.ndarray) -> np.ndarray:
    return p.apply(v)


def monomial_to_dense(p: MonomialOperator, *, cap: int | None = None) -> np.ndarray:
    return p.dense(cap=cap)


@dataclass(frozen=True, eq=False)
class TwoBandOperator:
    """Operator with at most two nonzeros per column, stored as two permutation bands.

    Column ``j`` has ``coeff[j, 0]`` at row ``rows[j, 0]`` and ``coeff[j, 1]`` at
    row ``rows[j, 1]``.  Each band is itself a permutation, so application is a
    pair of scatter operations.
    """

    rows: np.ndarray
    coeff: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        coeff = np.asarray(self.coeff, dtype=complex)
        if rows.ndim != 2 or rows.shape[1] != 2 or rows.shape != coeff.shape:
            raise DimensionMismatch("rows and coeff must have shape (dim, 2)")
        dim = rows.shape[0]
        for band in (0, 1):
            if dim and np.bincount(rows[:, band], minlength=dim).max() != 1:
                raise ValueError(f"band {band} is not a permutation")
        object.__setattr__(self, "rows", _frozen(rows))
        object.__setattr__(self, "coeff", _frozen(coeff))

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    @classmethod
    def from_monomial(cls, m: MonomialOperator, a: complex, b: complex) -> TwoBandOperator:
        """``a * 1 + b * m``."""
        dim = m.dim
        rows = np.stack([np.arange(dim), m.target], axis=1)
        coeff = np.stack([np.full(dim, a, dtype=complex), b * m.phase], axis=1)
        return cls(rows, coeff)

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if v.shape[0] != self.dim:
            raise DimensionMismatch(f"operator dim {self.dim} vs vector dim {v.shape[0]}")
        shape = (-1,) + (1,) * (v.ndim - 1)
        out = np.zeros(v.shape, dtype=np.result_type(v.dtype, complex))
        out[self.rows[:, 0]] += self.coeff[:, 0].reshape(shape) * v
        out[self.rows[:, 1]] += self.coeff[:, 1].reshape(shape) * v
        return out

    def column_entries(self) -> tuple[np.ndarray, np.ndarray]:
        """Rows and coefficients per column, duplicates merged into band 0."""
        rows = self.rows.copy()
        coeff = self.coeff.copy()
        dup = rows[:, 0] == rows[:, 1]
        coeff[dup, 0] += coeff[dup, 1]
        coeff[dup, 1] = 0.0
        return rows, coeff

    def trace(self) -> complex:
        idx = np.arange(self.dim)
        total = self.coeff[:, 0][self.rows[:, 0] == idx].sum()
        total += self.coeff[:, 1][self.rows[:, 1] == idx].sum()
        return complex(total)

    def dense(self, *, cap: int | None = None) -> np.ndarray:
        _check_cap(self.dim, cap)
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        cols = np.arange(self.dim)
        np.add.at(mat, (self.rows[:, 0], cols), self.coeff[:, 0])
        np.add.at(mat, (self.rows[:, 1], cols), self.coeff[:, 1])
        return mat

    def bands(self) -> tuple[MonomialOperator, MonomialOperator]:
        """The two permutation bands as (non-unimodular) monomial operators."""
        return (MonomialOperator(self.rows[:, 0], self.coeff[:, 0]),
                MonomialOperator(self.rows[:, 1], self.coeff[:, 1]))

    def __repr__(self) -> str:
        return f"TwoBandOperator(dim={self.dim})"


def as_terms(op) -> list[MonomialOperator]:
    """Write an operator as a list of monomials that sum to it."""
    if isinstance(op, MonomialOperator):
        return [op]
    if isinstance(op, TwoBandOperator):
        return list(op.bands())
    if isinstance(op, (list, tuple)):
        return list(op)
    raise TypeError(f"cannot expand {type(op).__name__} into monomial terms")


def expand_product(ops: Sequence) -> list[MonomialOperator]:
    """Expand ``ops[0] @ ops[1] @ ...`` into a sum of monomial terms.

    The term count is the product of the factors' term counts, so this is
    meant for short words of two-band factors.
    """
    if not ops:
        raise ValueError("empty product")
    terms = as_terms(ops[0])
    for op in ops[1:]:
        terms = [p.compose(q) for p in terms for q in as_terms(op)]
    return terms


def sum_entries(terms: Sequence[MonomialOperator]) -> tuple[np.ndarray, np.ndarray]:
    """Coalesce a sum of monomials into sorted flat keys ``row*dim + col`` and values."""
    dim = terms[0].dim
    cols = np.arange(dim, dtype=np.int64)
    keys = np.concatenate([t.target * dim + cols for t in terms])
    vals = np.concatenate([t.phase for t in terms])
    uniq, inv = np.unique(keys, return_inverse=True)
    out = np.zeros(uniq.size, dtype=complex)
    np.add.at(out, inv, vals)
    return uniq, out


_COLUMNWISE_MAX_TERMS = 32


def _column_sums(rows: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """For each term ``t`` and column ``c``: total of all terms hitting entry ``(rows[t,c], c)``."""
    out = np.zeros_like(vals)
    for t in range(rows.shape[0]):
        for s in range(rows.shape[0]):
            out[t] += np.where(rows[s] == rows[t], vals[s], 0.0)
    return out


def sum_deviation(lhs: Sequence[MonomialOperator], rhs: Sequence[MonomialOperator]
                  ) -> tuple[float, dict | None]:
    """Max entrywise ``|sum(lhs) - sum(rhs)|`` with a 1-based witness entry.

    Every monomial has one entry per column, so short sums are coalesced
    column by column; long ones fall back to a global sort of entry keys.
    """
    dim = lhs[0].dim
    terms = list(lhs) + [t.scale(-1.0) for t in rhs]
    if any(t.dim != dim for t in terms):
        raise DimensionMismatch("terms have differing dimensions")
    if len(terms) <= _COLUMNWISE_MAX_TERMS:
        rows = np.stack([t.target for t in terms])
        absdiff = np.abs(_column_sums(rows, np.stack([t.phase for t in terms])))
        t_pos, col = np.unravel_index(int(np.argmax(absdiff)), absdiff.shape)
        err = float(absdiff[t_pos, col])
        row = int(rows[t_pos, col])
    else:
        keys, diff = sum_entries(terms)
        absdiff = np.abs(diff)
        pos = int(np.argmax(absdiff))
        err = float(absdiff[pos])
        row, col = divmod(int(keys[pos]), dim)
    col = int(col)

    def entry(side):
        return sum((t.phase[col] for t in side if t.target[col] == row), 0.0 + 0.0j)

    witness = {"row": row + 1, "col": col + 1,
               "lhs": complex_to_json(entry(lhs)), "rhs": complex_to_json(entry(rhs))}
    return err, witness


def operator_dense(op, *, cap: int | None = None) -> np.ndarray:
    if isinstance(op, np.ndarray):
        return op
    return op.dense(cap=cap)


class DenseOperator:
    """Adapter giving a dense array the ``dim``/``apply`` interface."""

    def __init__(self, mat: np.ndarray):
        self.mat = np.asarray(mat, dtype=complex)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.mat @ v

    def dense(self, *, cap: int | None = None) -> np.ndarray:
        return self.mat


def apply_product(ops: Sequence, x: np.ndarray) -> np.ndarray:
    """Apply ``ops[0] @ ops[1] @ ... @ ops[-1]`` to ``x`` (rightmost first)."""
    for op in reversed(ops):
        x = op.apply(x)
    return x


def product_deviation(lhs: Sequence, rhs: Sequence, dim: int,
                      block: int = 512) -> tuple[float, dict | None]:
    """Max entrywise difference of two operator products, swept over basis columns.

    Both sides are applied to blocks of identity columns, so the full product
    matrices are compared without ever forming a dense factor.  Returns the
    error and a witness ``{"row", "col", "lhs", "rhs"}`` (1-based) for the
    worst entry.
    """
    worst = 0.0
    witness = None
    for start in range(0, dim, block):
        stop = min(start + block, dim)
        eye = np.zeros((dim, stop - start), dtype=complex)
        eye[np.arange(start, stop), np.arange(stop - start)] = 1.0
        left = apply_product(lhs, eye) if lhs else eye
        right = apply_product(rhs, eye) if rhs else eye
        diff = np.abs(left - right)
        flat = int(np.argmax(diff))
        err = float(diff.flat[flat])
        if witness is None or err > worst:
            r, c = np.unravel_index(flat, diff.shape)
            worst = err
            witness = {"row": int(r) + 1, "col": start + int(c) + 1,
                       "lhs": complex_to_json(left[r, c]),
                       "rhs": complex_to_json(right[r, c])}
    return worst, witness


def dense_product(ops: Sequence, dim: int) -> np.ndarray:
    out = np.eye(dim, dtype=complex)
    for op in ops:
        out = out @ operator_dense(op)
    return out


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]  # + 0.0 folds -0.0


def complex_list_to_json(values) -> list[list[float]]:
    return [complex_to_json(z) for z in np.asarray(values).ravel()]


def complex_list_from_json(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return arr[:, 0] + 1j * arr[:, 1]


def matrix_to_json(mat: np.ndarray) -> dict:
    mat = np.asarray(mat)
    return {"rows": int(mat.shape[0]), "cols": int(mat.shape[1]),
            "entries": complex_list_to_json(mat)}


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = complex_list_from_json(obj["entries"])
    if entries.size != rows * cols:
        raise ValueError(f"matrix JSON: {entries.size} entries for {rows}x{cols}")
    return entries.reshape(rows, cols)


def state_to_json(v: np.ndarray) -> dict:
    v = np.asarray(v)
    return {"dim": int(v.size), "amplitudes": complex_list_to_json(v)}


def state_from_json(obj: dict) -> np.ndarray:
    amps = complex_list_from_json(obj["amplitudes"])
    if amps.size != int(obj["dim"]):
        raise ValueError("state JSON: len(amplitudes) != dim")
    return amps
