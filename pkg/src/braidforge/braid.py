from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import linalg, reps
from .espgroup import elements
from .linalg import DEFAULT_TOL, INV_SQRT2, MonomialOperator, TwoBandOperator
from .report import VerificationReport, with_timing
from .reps import RepSpec


@dataclass(frozen=True)
class BraidWord:
    """Letters ``(i, +-1)`` standing for ``b_i`` or its inverse, read left to right."""

    strands: int
    letters: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.strands < 2:
            raise ValueError("a braid needs at least 2 strands")
        for i, e in self.letters:
            if not 1 <= i <= self.strands - 1:
                raise IndexError(f"b{i} needs 1 <= i <= {self.strands - 1}")
            if e not in (1, -1):
                raise ValueError("exponents must be +1 or -1")

    @classmethod
    def parse(cls, text: str, strands: int) -> BraidWord:
        letters = []
        for tok in text.split():
            match = _LETTER.fullmatch(tok)
            if not match:
                raise ValueError(f"bad braid letter {tok!r}")
            letters.append((int(match.group(1)), -1 if match.group(2) else 1))
        return cls(strands, tuple(letters))

    def inverse(self) -> BraidWord:
        return BraidWord(self.strands, tuple((i, -e) for i, e in reversed(self.letters)))

    def __str__(self) -> str:
        return " ".join(f"b{i}" if e == 1 else f"b{i}^-1" for i, e in self.letters)

    @classmethod
    def random(cls, strands: int, length: int, rng: np.random.Generator) -> BraidWord:
        idx = rng.integers(1, strands, size=length)
        exp = rng.choice([-1, 1], size=length)
        return cls(strands, tuple((int(i), int(e)) for i, e in zip(idx, exp)))


_LETTER = re.compile(r"b(\d+)(\^-1)?")


class BraidRep:
    """Braid group image ``b_i -> (1 + T_i)/sqrt 2`` on ``spec.m + 1`` strands."""

    def __init__(self, spec: RepSpec):
        self.spec = spec
        self.strands = spec.m + 1
        self._gens: dict[tuple[int, int], TwoBandOperator] = {}

    @classmethod
    def for_strands(cls, base: RepSpec, n: int) -> BraidRep:
        return cls(base.with_m(n - 1))

    @property
    def dim(self) -> int:
        return self.spec.dim

    def group_generator(self, i: int) -> MonomialOperator:
        return reps.generator(self.spec, i, check=False)

    def generator(self, i: int, exponent: int = 1) -> TwoBandOperator:
        if not 1 <= i <= self.spec.m:
            raise IndexError(f"b{i} needs 1 <= i <= {self.spec.m}")
        key = (i, exponent)
        if key not in self._gens:
            t = self.group_generator(i)
            self._gens[key] = TwoBandOperator.from_monomial(t, INV_SQRT2, exponent * INV_SQRT2)
        return self._gens[key]


def braid_generator(rep: BraidRep, i: int) -> TwoBandOperator:
    return rep.generator(i)


def word_operators(rep: BraidRep, w: BraidWord) -> list[TwoBandOperator]:
    if w.strands != rep.strands:
        raise ValueError(f"word on {w.strands} strands, representation on {rep.strands}")
    return [rep.generator(i, e) for i, e in w.letters]


def apply_word(rep: BraidRep, w: BraidWord, v: np.ndarray) -> np.ndarray:
    """``pi(w) v`` where ``pi(w)`` is the left-to-right product of letter images."""
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != rep.dim:
        raise linalg.DimensionMismatch(f"vector dim {v.shape[0]} vs {rep.dim}")
    return linalg.apply_product(word_operators(rep, w), v)


def word_matrix(rep: BraidRep, w: BraidWord) -> np.ndarray:
    return linalg.dense_product(word_operators(rep, w), rep.dim)


def _deviation(lhs, rhs, dim: int, method: str) -> tuple[float, dict | None]:
    if method == "expand":
        return linalg.sum_deviation(linalg.expand_product(lhs), linalg.expand_product(rhs))
    if method == "sweep":
        return linalg.product_deviation(lhs, rhs, dim)
    if method == "dense":
        diff = np.abs(linalg.dense_product(lhs, dim) - linalg.dense_product(rhs, dim))
        r, c = np.unravel_index(int(np.argmax(diff)), diff.shape)
        return float(diff[r, c]), {"row": int(r) + 1, "col": int(c) + 1}
    raise ValueError(f"unknown method {method!r}")


@with_timing
def verify_braid_relations(rep: BraidRep, n: int | None = None, tol: float = DEFAULT_TOL,
                           method: str = "expand") -> VerificationReport:
    """Far commutation and the braid relation for every generator pair.

    ``method`` is ``"expand"`` (exact monomial expansion, any size), ``"sweep"``
    (apply both sides to every basis column) or ``"dense"`` (matrix products,
    capped).
    """
    if n is not None and n != rep.strands:
        rep = BraidRep.for_strands(rep.spec, n)
    if rep.strands < 3:
        raise ValueError("braid relations need n >= 3")
    g = rep.generator
    far, adj, unit = [], [], []
    for i in range(1, rep.strands):
        err, wit = linalg.sum_deviation(linalg.expand_product([g(i), g(i, -1)]),
                                        [MonomialOperator.identity(rep.dim)])
        unit.append((err, {"i": i, **(wit or {})}))
    for i, j in itertools.combinations(range(1, rep.strands), 2):
        if j - i == 1:
            err, wit = _deviation([g(i), g(j), g(i)], [g(j), g(i), g(j)], rep.dim, method)
            adj.append((err, {"i": i, "j": j, **(wit or {})}))
        else:
            err, wit = _deviation([g(i), g(j)], [g(j), g(i)], rep.dim, method)
            far.append((err, {"i": i, "j": j, **(wit or {})}))
    children = [VerificationReport.worst("far-commutation", far, tol),
                VerificationReport.worst("braid-relation", adj, tol),
                VerificationReport.worst("inverse", unit, tol)]
    return VerificationReport.combine("braid-relations", children, tol,
                                      strands=rep.strands, dim=rep.dim, method=method)


@with_timing
def verify_gybe(N: int, k: int, tol: float = DEFAULT_TOL) -> VerificationReport:
    """``(R (x) 1_l)(1_l (x) R)(R (x) 1_l) = (1_l (x) R)(R (x) 1_l)(1_l (x) R)``, ``l = 2^k``.

    Both sides act on ``C^{2^{N+k}}`` with ``R = (1 + M)/sqrt 2``.  The far
    commutation needed for four or more strands is reported in ``info`` and
    does not affect the verdict.
    """
    if N < 2 or not 1 <= k <= N - 1:
        raise ValueError(f"need N >= 2 and 1 <= k <= N-1 (got N={N}, k={k})")
    m = reps.almost_complex(N)
    pad = MonomialOperator.identity(2 ** k)
    left = TwoBandOperator.from_monomial(m.kron(pad), INV_SQRT2, INV_SQRT2)
    right = TwoBandOperator.from_monomial(pad.kron(m), INV_SQRT2, INV_SQRT2)
    err, wit = _deviation([left, right, left], [right, left, right], 2 ** (N + k), "expand")
    four = BraidRep(RepSpec.class2(3, N, k))
    g = four.generator
    far_err, _ = _deviation([g(1), g(3)], [g(3), g(1)], four.dim, "expand")
    return VerificationReport.leaf(
        "generalized-ybe", err, tol, wit, N=N, k=k, dim=2 ** (N + k),
        far_commutation_4_strands={"max_error": far_err, "holds": far_err <= tol})


@with_timing
def conjugation_check(rep: BraidRep, n: int | None = None,
                      tol: float = DEFAULT_TOL) -> VerificationReport:
    """``pi(b_i) T_j pi(b_i)^-1`` equals ``T_i T_j`` for ``|i-j| = 1`` and ``T_j`` otherwise."""
    if n is not None and n != rep.strands:
        rep = BraidRep.for_strands(rep.spec, n)
    if rep.strands < 3:
        raise ValueError("conjugation relations need n >= 3")
    near, far, skipped = [], [], 0
    m = rep.spec.m
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            if i == j:
                skipped += 1
                continue
            lhs = linalg.expand_product([rep.generator(i), rep.group_generator(j),
                                         rep.generator(i, -1)])
            if abs(i - j) == 1:
                rhs = [rep.group_generator(i).compose(rep.group_generator(j))]
                bucket = near
            else:
                rhs = [rep.group_generator(j)]
                bucket = far
            err, wit = linalg.sum_deviation(lhs, rhs)
            bucket.append((err, {"i": i, "j": j, **(wit or {})}))
    children = [VerificationReport.worst("neighbour-conjugation", near, tol),
                VerificationReport.worst("distant-conjugation", far, tol)]
    return VerificationReport.combine("conjugation", children, tol, strands=rep.strands,
                                      skipped_diagonal=skipped)


@with_timing
def verify_square_is_group_image(rep: BraidRep, tol: float = DEFAULT_TOL) -> VerificationReport:
    """``pi(b_i)^2 = T_i`` for every ``i``."""
    items = []
    for i in range(1, rep.strands):
        b = rep.generator(i)
        err, wit = linalg.sum_deviation(linalg.expand_product([b, b]), [rep.group_generator(i)])
        items.append((err, {"i": i, **(wit or {})}))
    return VerificationReport.worst("square-is-group-image", items, tol)


@with_timing
def verify_unitarity(rep: BraidRep, tol: float = DEFAULT_TOL) -> VerificationReport:
    items = []
    ident = [MonomialOperator.identity(rep.dim)]
    for i in range(1, rep.strands):
        b = rep.generator(i)
        adj = TwoBandOperator(*_adjoint_bands(b))
        err, wit = linalg.sum_deviation(linalg.expand_product([b, adj]), ident)
        items.append((err, {"i": i, **(wit or {})}))
    return VerificationReport.worst("unitarity", items, tol)


def _adjoint_bands(b: TwoBandOperator) -> tuple[np.ndarray, np.ndarray]:
    rows = np.empty_like(b.rows)
    coeff = np.empty_like(b.coeff)
    for band, mono in enumerate(b.bands()):
        adj = mono.adjoint()
        rows[:, band] = adj.target
        coeff[:, band] = adj.phase
    return rows, coeff


# ---------------------------------------------------------------- finite images

FINGERPRINT_SCALE = 1e9


def fingerprint(mat: np.ndarray) -> bytes:
    """Entries rounded to 1e-9, as bytes.  Safe for these finite monomial-like groups."""
    r = np.round(np.asarray(mat) * FINGERPRINT_SCALE)
    r = r + 0.0  # fold -0.0 into 0.0
    return r.real.astype(np.int64).tobytes() + r.imag.astype(np.int64).tobytes()


def group_image_fingerprints(spec: RepSpec) -> dict[bytes, str]:
    """Fingerprints of ``phi(g)`` for all ``g`` in ``E_m``, mapped to the element text."""
    linalg._check_cap(spec.dim, None)
    return {fingerprint(reps.rep_of_element(spec, g).dense()): str(g) for g in elements(spec.m)}


def image_group_cosets(rep: BraidRep, max_elements: int = 200_000) -> dict:
    """Enumerate the group generated by the braid images and count cosets of ``phi(E_m)``."""
    spec = rep.spec
    subgroup = [reps.rep_of_element(spec, g).dense() for g in elements(spec.m)]
    gens = [rep.generator(i).dense() for i in range(1, rep.strands)]
    start = np.eye(rep.dim, dtype=complex)
    seen = {fingerprint(start)}
    queue = deque([start])
    cosets = set()
    while queue:
        g = queue.popleft()
        cosets.add(min(fingerprint(g @ h) for h in subgroup))
        for s in gens:
            gs = g @ s
            fp = fingerprint(gs)
            if fp not in seen:
                seen.add(fp)
                if len(seen) > max_elements:
                    raise RuntimeError("image group larger than max_elements")
                queue.append(gs)
    return {"group_order": len(seen), "subgroup_order": len(subgroup),
            "cosets": len(cosets)}


def pure_braid_image_check(rep: BraidRep, words: list[BraidWord],
                           tol: float = DEFAULT_TOL) -> VerificationReport:
    """``pi(w) T_i pi(w)^-1`` lands in ``phi(E_m)`` for every word and every ``i``."""
    table = group_image_fingerprints(rep.spec)
    misses = []
    checked = 0
    for w in words:
        pw = word_matrix(rep, w)
        pw_inv = word_matrix(rep, w.inverse())
        for i in range(1, rep.strands):
            conj = pw @ rep.group_generator(i).dense() @ pw_inv
            checked += 1
            if fingerprint(conj) not in table:
                misses.append({"word": str(w), "i": i})
    return VerificationReport.leaf("pure-braid-image", float(len(misses)), 0.0,
                                   misses[0] if misses else None, checked=checked)
