from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg, reps
from .espgroup import GroupElement, GroupMismatch, center, elements
from .linalg import DEFAULT_TOL
from .report import VerificationReport, with_timing
from .reps import RepSpec

COMMUTANT_CAP = 64
RANK_RTOL = 1e-8


def character(spec: RepSpec, g: GroupElement) -> complex:
    if g.m != spec.m:
        raise GroupMismatch(f"element of E_{g.m} for a representation of E_{spec.m}")
    return reps.rep_of_element(spec, g).trace()


def _rho1_character(g: GroupElement) -> float:
    # faithful irreducible of E_m, m even: supported on the centre {+-1}
    if g.bits:
        return 0.0
    return g.sign * 2.0 ** (g.m // 2)


def multiplicity_rho1(spec: RepSpec) -> int:
    """Multiplicity of the ``2^{m/2}``-dimensional irreducible, from the character inner product."""
    if spec.m % 2:
        raise ValueError("m is odd, so there is no unique faithful irreducible; "
                         "use commutant_dimension instead")
    total = 0.0 + 0.0j
    for g in elements(spec.m):
        chi = _rho1_character(g)
        if chi:
            total += character(spec, g) * chi
    value = total / 2 ** (spec.m + 1)
    out = int(round(value.real))
    if abs(value - out) > 1e-9:
        raise ArithmeticError(f"non-integral multiplicity {value}")
    return out


def max_noncentral_character(spec: RepSpec) -> float:
    centre = {(g.sign, g.bits) for g in center(spec.m).elements}
    worst = 0.0
    for g in elements(spec.m):
        if (g.sign, g.bits) not in centre:
            worst = max(worst, abs(character(spec, g)))
    return worst


def _check_cap(spec: RepSpec, cap: int | None) -> None:
    limit = COMMUTANT_CAP if cap is None else cap
    if spec.dim > limit:
        raise linalg.SizeError(f"dimension {spec.dim} exceeds the commutant cap {limit}")


def _commutant_system(spec: RepSpec):
    """Equations ``A[t(a), t(b)] - ph_a conj(ph_b) A[a, b] = 0`` over flattened pair indices."""
    dim = spec.dim
    a, b = np.divmod(np.arange(dim * dim), dim)
    src, dst, w = [], [], []
    for t in reps.generators(spec, check=False):
        src.append(a * dim + b)
        dst.append(t.target[a] * dim + t.target[b])
        w.append(t.phase[a] * np.conj(t.phase[b]))
    return np.concatenate(src), np.concatenate(dst), np.concatenate(w)


def commutant_dimension(spec: RepSpec, cap: int | None = None) -> int:
    """Nullity of ``{A : A T_i = T_i A}``.

    Each generator is monomial, so every equation couples exactly two entries
    of ``A``.  The system splits along connected components of that coupling
    graph, and the nullity is summed over per-component SVDs.
    """
    _check_cap(spec, cap)
    dim = spec.dim
    nodes = dim * dim
    src, dst, w = _commutant_system(spec)
    graph = coo_matrix((np.ones(src.size), (src, dst)), shape=(nodes, nodes))
    n_comp, labels = connected_components(graph, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n_comp + 1))
    local = np.empty(nodes, dtype=np.int64)
    eq_comp = labels[src]
    eq_order = np.argsort(eq_comp, kind="stable")
    eq_bounds = np.searchsorted(eq_comp[eq_order], np.arange(n_comp + 1))
    total = 0
    for c in range(n_comp):
        members = order[bounds[c]:bounds[c + 1]]
        local[members] = np.arange(members.size)
        eqs = eq_order[eq_bounds[c]:eq_bounds[c + 1]]
        block = np.zeros((eqs.size, members.size), dtype=complex)
        rows = np.arange(eqs.size)
        np.add.at(block, (rows, local[dst[eqs]]), 1.0)
        np.add.at(block, (rows, local[src[eqs]]), -w[eqs])
        total += members.size - _rank(block)
    return total


def commutant_dimension_dense(spec: RepSpec, cap: int | None = None) -> int:
    """Same quantity from the full stacked system ``(1 (x) T - T^T (x) 1) vec(A) = 0``."""
    _check_cap(spec, cap)
    dim = spec.dim
    eye = np.eye(dim)
    blocks = []
    for t in reps.generators(spec, check=False):
        td = t.dense()
        blocks.append(np.kron(eye, td) - np.kron(td.T, eye))
    system = np.vstack(blocks)
    return dim * dim - _rank(system)


def _rank(mat: np.ndarray) -> int:
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > RANK_RTOL * s[0]))


@dataclass(frozen=True)
class DecompositionPrediction:
    strands: int
    dim: int
    parity: str                 # "odd" or "even" strand count
    multiplicity: int           # d-odd copies of the single irreducible, or d-even of each pair member
    formula_multiplicity: int   # class-specific closed form
    irreducible_dim: int
    commutant: int

    def to_dict(self) -> dict:
        return asdict(self)


def prediction(spec: RepSpec) -> DecompositionPrediction:
    n = spec.m + 1
    dim = spec.dim
    if n % 2:
        irr = 2 ** ((n - 1) // 2)
        mult = dim // irr
        if spec.rep_class == 1:
            formula = spec.k ** n * 2 ** ((n + 1) // 2)
        else:
            formula = 2 ** (spec.N + spec.k * (n - 2) - (n - 1) // 2)
        return DecompositionPrediction(n, dim, "odd", mult, formula, irr, mult * mult)
    irr = 2 ** (n // 2 - 1)
    mult = dim // 2 ** (n // 2)
    if spec.rep_class == 1:
        formula = spec.k ** n * 2 ** (n // 2)
    else:
        formula = 2 ** (spec.N + spec.k * (n - 2) - n // 2)
    return DecompositionPrediction(n, dim, "even", mult, formula, irr, 2 * mult * mult)


@with_timing
def verify_decomposition(spec: RepSpec, tol: float = DEFAULT_TOL,
                         cap: int | None = None) -> VerificationReport:
    pred = prediction(spec)
    children = [VerificationReport.leaf("formula-matches-dimension",
                                        abs(pred.multiplicity - pred.formula_multiplicity), 0.0,
                                        {"from_dim": pred.multiplicity,
                                         "formula": pred.formula_multiplicity})]
    info: dict = {"prediction": pred.to_dict()}
    if spec.m % 2 == 0:
        mult = multiplicity_rho1(spec)
        info["multiplicity_rho1"] = mult
        children.append(VerificationReport.leaf("character-multiplicity",
                                                abs(mult - pred.multiplicity), 0.0,
                                                {"computed": mult, "predicted": pred.multiplicity}))
    noncentral = max_noncentral_character(spec)
    children.append(VerificationReport.leaf("noncentral-characters-vanish", noncentral, tol))
    limit = COMMUTANT_CAP if cap is None else cap
    if spec.dim <= limit:
        comm = commutant_dimension(spec, cap=limit)
        info["commutant_dimension"] = comm
        children.append(VerificationReport.leaf("commutant-dimension",
                                                abs(comm - pred.commutant), 0.0,
                                                {"computed": comm, "predicted": pred.commutant}))
    else:
        info["commutant_dimension"] = None
    return VerificationReport.combine("decomposition", children, tol, **info)
