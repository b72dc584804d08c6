"""Anti-Hermitian monomial representations of the group E_m.

Two families are built here.

Class 1 acts on ``(C^{2k})^{(x)(m+1)}``.  Every generator is the same
``(2k)^2``-dimensional block ``M^{JJ}`` placed on adjacent tensor factors
``i, i+1``.  The spin labels ``i in {-J, ..., J}`` with ``J = k - 1/2`` map to
positions ``p = J - i``, so position 0 is ``+J``.  The partner label ``-i``
sits at position ``2k - 1 - p``.

Class 2 acts on ``C^{2^{N + k(m-1)}}``.  Generator ``i`` is
``i sigma_y (x) sigma_x^{(x)(N-1)}`` shifted by ``k(i-1)`` qubits.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .espgroup import GroupElement, GroupMismatch
from .linalg import DEFAULT_TOL, MonomialOperator
from .report import VerificationReport, with_timing


class ConstraintError(ValueError):
    """Deformation parameters violate the admissibility constraints."""


# ---------------------------------------------------------------- signs


@dataclass(frozen=True)
class SignConvention:
    """``eps[p]`` for positions ``p = 0..2k-1`` with ``eps[p] * eps[2k-1-p] = -1``."""

    eps: tuple[int, ...]

    def __post_init__(self):
        n = len(self.eps)
        if n == 0 or n % 2:
            raise ValueError("sign convention needs an even, nonzero number of entries")
        for p, e in enumerate(self.eps):
            if e not in (1, -1):
                raise ValueError(f"eps[{p}] must be +1 or -1")
            if e * self.eps[n - 1 - p] != -1:
                raise ValueError(f"eps[{p}] * eps[{n - 1 - p}] must be -1")

    @classmethod
    def default(cls, k: int) -> SignConvention:
        """``+1`` on positive spin labels, ``-1`` on negative ones."""
        return cls(tuple([1] * k + [-1] * k))

    @property
    def size(self) -> int:
        return len(self.eps)


def spin_label(k: int, p: int) -> Fraction:
    """Spin label ``J - p`` of position ``p``."""
    return Fraction(2 * k - 1, 2) - p


def position(k: int, label) -> int:
    p = Fraction(2 * k - 1, 2) - Fraction(label)
    if p.denominator != 1 or not 0 <= p < 2 * k:
        raise ValueError(f"label {label} is not in -J..J for k={k}")
    return int(p)


# ---------------------------------------------------------------- phases


@dataclass(frozen=True, eq=False)
class PhaseParams:
    """Per-position deformation parameters ``q_p``; the pair matrix is ``q_p q_r``.

    Construction does not validate, so that inadmissible sets can be fed to
    :func:`check_constraints_3constr`.
    """

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=complex).ravel()
        if q.size == 0 or q.size % 2:
            raise ValueError("phase vector needs an even, nonzero length")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def k(self) -> int:
        return self.q.size // 2

    @classmethod
    def trivial(cls, k: int) -> PhaseParams:
        return cls(np.ones(2 * k, dtype=complex))

    @classmethod
    def from_angles(cls, angles) -> PhaseParams:
        """``q_p = exp(i phi_p / 2)`` on positive labels and the conjugate on partners."""
        phi = np.asarray(angles, dtype=float).ravel()
        half = np.exp(0.5j * phi)
        return cls(np.concatenate([half, np.conj(half[::-1])]))

    def pair_matrix(self) -> np.ndarray:
        return np.outer(self.q, self.q)

    def sqrt(self) -> np.ndarray:
        """Square roots ``s_p`` with ``s_p^2 = q_p`` and ``s_{partner} = conj(s_p)``."""
        k = self.k
        root = np.exp(0.5j * np.angle(self.q[:k]))
        return np.concatenate([root, np.conj(root[::-1])])

    def is_trivial(self) -> bool:
        return bool(np.all(self.q == 1))

    def to_json(self) -> list:
        return linalg.complex_list_to_json(self.q)


def _pair_matrix(phases) -> np.ndarray:
    if isinstance(phases, PhaseParams):
        return phases.pair_matrix()
    q = np.asarray(phases, dtype=complex)
    if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] % 2:
        raise ValueError("explicit q must be a square matrix of even size")
    return q


def constraint_violations(phases, tol: float = DEFAULT_TOL) -> list[dict]:
    """All failing instances of the three admissibility constraints.

    Indices in the returned records are spin labels as strings (``"1/2"``).
    """
    q = _pair_matrix(phases)
    n = q.shape[0]
    k = n // 2
    bar = np.arange(n)[::-1]
    lab = [str(spin_label(k, p)) for p in range(n)]
    out = []

    c1 = np.abs(q * q[np.ix_(bar, bar)] - 1.0)
    for i, j in zip(*np.nonzero(c1 > tol)):
        out.append({"constraint": "q_ij q_{-i,-j} = 1", "indices": (lab[i], lab[j]),
                    "error": float(c1[i, j])})

    # q_ij q_{-i,j} = q_jl q_{j,-l} for all i, j, l
    lhs = q * q[bar, :]                      # [i, j]
    rhs = q * q[:, bar]                      # [j, l]
    c2 = np.abs(lhs[:, :, None] - rhs[None, :, :])
    for i, j, l in zip(*np.nonzero(c2 > tol)):
        out.append({"constraint": "q_ij q_{-i,j} = q_jl q_{j,-l}",
                    "indices": (lab[i], lab[j], lab[l]), "error": float(c2[i, j, l])})

    c3 = np.abs(np.abs(q) ** 2 - 1.0)
    for i, j in zip(*np.nonzero(c3 > tol)):
        out.append({"constraint": "|q_ij| = 1", "indices": (lab[i], lab[j]),
                    "error": float(c3[i, j])})
    return out


def check_constraints_3constr(phases, tol: float = DEFAULT_TOL) -> VerificationReport:
    q = _pair_matrix(phases)
    n = q.shape[0]
    bar = np.arange(n)[::-1]
    c1 = np.abs(q * q[np.ix_(bar, bar)] - 1.0).max()
    lhs = q * q[bar, :]
    rhs = q * q[:, bar]
    c2 = np.abs(lhs[:, :, None] - rhs[None, :, :]).max()
    c3 = np.abs(np.abs(q) ** 2 - 1.0).max()
    children = []
    for name, err in (("pair-inverse", c1), ("pair-balance", c2), ("unimodular", c3)):
        witness = None
        if err > tol:
            bad = [v for v in constraint_violations(q, tol) if _constraint_key(v) == name]
            witness = bad[0] if bad else None
        children.append(VerificationReport.leaf(name, err, tol, witness))
    return VerificationReport.combine("phase-constraints", children, tol)


def _constraint_key(v: dict) -> str:
    c = v["constraint"]
    if c.startswith("|"):
        return "unimodular"
    return "pair-inverse" if c.endswith("= 1") else "pair-balance"


# ---------------------------------------------------------------- M^{JJ}


def build_mjj(k: int, phases=None, signs: SignConvention | None = None,
              check: bool = True, tol: float = DEFAULT_TOL) -> MonomialOperator:
    """The ``(2k)^2``-dimensional block ``sum_ij eps(i) q_ij |i j><-i -j|``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    phases = PhaseParams.trivial(k) if phases is None else phases
    signs = SignConvention.default(k) if signs is None else signs
    q = _pair_matrix(phases)
    n = 2 * k
    if q.shape != (n, n) or signs.size != n:
        raise ValueError(f"phase/sign sizes do not match 2k={n}")
    if check:
        bad = constraint_violations(q, tol)
        if bad:
            v = bad[0]
            raise ConstraintError(f"{v['constraint']} fails at {v['indices']} "
                                  f"(error {v['error']:.3g})")
    a, b = np.divmod(np.arange(n * n), n)
    ra, rb = n - 1 - a, n - 1 - b
    eps = np.asarray(signs.eps)
    return MonomialOperator(ra * n + rb, eps[ra] * q[ra, rb])


def factor_mjj(k: int, phases: PhaseParams | None = None,
               signs: SignConvention | None = None) -> tuple[MonomialOperator, MonomialOperator]:
    """Factors ``(M', P')`` with ``M^{JJ} = M' (x) P'`` for separable phases."""
    phases = PhaseParams.trivial(k) if phases is None else phases
    signs = SignConvention.default(k) if signs is None else signs
    n = 2 * k
    cols = np.arange(n)
    rows = n - 1 - cols
    m_prime = MonomialOperator(rows, np.asarray(signs.eps)[rows] * phases.q[rows])
    p_prime = MonomialOperator(rows, phases.q[rows])
    return m_prime, p_prime


def almost_complex(n_qubits: int) -> MonomialOperator:
    """``i sigma_y (x) sigma_x^{(x)(n-1)}`` on ``n`` qubits."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    dim = 1 << n_qubits
    cols = np.arange(dim)
    phase = np.where(cols < dim // 2, -1.0, 1.0).astype(complex)
    return MonomialOperator(dim - 1 - cols, phase)


# ---------------------------------------------------------------- specs


@dataclass(frozen=True, eq=False)
class RepSpec:
    """Parameters of a representation.

    ``k`` is the half block size for class 1 and the qubit stride for class 2.
    ``N`` is the class 2 block size in qubits.  Inadmissible class 2 strides
    are allowed so that the relation checker can demonstrate the failure.
    """

    rep_class: int
    m: int
    k: int
    N: int | None = None
    phases: PhaseParams | None = None
    signs: SignConvention | None = None
    q_matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.rep_class not in (1, 2):
            raise ValueError("rep_class must be 1 or 2")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.rep_class == 2:
            if self.N is None or self.N < 2:
                raise ValueError("class 2 needs N >= 2")
            if self.k > self.N - 1:
                raise ValueError(f"class 2 needs k <= N-1 (got k={self.k}, N={self.N})")
            if self.phases is not None or self.q_matrix is not None:
                raise ValueError("class 2 has no deformation parameters")
        else:
            if self.phases is not None and self.phases.k != self.k:
                raise ValueError("phase vector length does not match 2k")
            if self.signs is not None and self.signs.size != 2 * self.k:
                raise ValueError("sign convention length does not match 2k")

    @classmethod
    def class1(cls, m: int, k: int, phases: PhaseParams | None = None,
               signs: SignConvention | None = None, q_matrix=None) -> RepSpec:
        qm = None if q_matrix is None else np.asarray(q_matrix, dtype=complex)
        return cls(1, m, k, None, phases, signs, qm)

    @classmethod
    def class2(cls, m: int, N: int, k: int) -> RepSpec:
        return cls(2, m, k, N)

    @property
    def dim(self) -> int:
        if self.rep_class == 1:
            return (2 * self.k) ** (self.m + 1)
        return 2 ** (self.N + self.k * (self.m - 1))

    @property
    def admissible(self) -> bool:
        """Whether the relations are expected to hold."""
        if self.rep_class == 1:
            q = self.q_matrix if self.q_matrix is not None else self.phase_params.pair_matrix()
            return not constraint_violations(q)
        return self.m <= 2 or 2 * self.k >= self.N

    @property
    def phase_params(self) -> PhaseParams:
        return PhaseParams.trivial(self.k) if self.phases is None else self.phases

    @property
    def sign_convention(self) -> SignConvention:
        return SignConvention.default(self.k) if self.signs is None else self.signs

    def with_m(self, m: int) -> RepSpec:
        return RepSpec(self.rep_class, m, self.k, self.N, self.phases, self.signs, self.q_matrix)

    def to_json(self) -> dict:
        d: dict = {"class": self.rep_class, "m": self.m, "k": self.k}
        if self.rep_class == 2:
            d["N"] = self.N
        else:
            if self.q_matrix is not None:
                d["q_matrix"] = linalg.matrix_to_json(self.q_matrix)
            elif self.phases is not None:
                d["q"] = self.phases.to_json()
            if self.signs is not None:
                d["signs"] = list(self.signs.eps)
        return d

    @classmethod
    def from_json(cls, obj) -> RepSpec:
        if isinstance(obj, str):
            obj = json.loads(obj)
        c = int(obj["class"])
        if c == 2:
            return cls.class2(int(obj["m"]), int(obj["N"]), int(obj["k"]))
        phases = None
        if "q" in obj:
            phases = PhaseParams(linalg.complex_list_from_json(obj["q"]))
        q_matrix = linalg.matrix_from_json(obj["q_matrix"]) if "q_matrix" in obj else None
        signs = SignConvention(tuple(obj["signs"])) if "signs" in obj else None
        return cls.class1(int(obj["m"]), int(obj["k"]), phases, signs, q_matrix)

    def cache_key(self) -> tuple:
        q = None
        if self.q_matrix is not None:
            q = self.q_matrix.tobytes()
        elif self.phases is not None:
            q = self.phases.q.tobytes()
        signs = None if self.signs is None else self.signs.eps
        return (self.rep_class, self.m, self.k, self.N, q, signs)


# ---------------------------------------------------------------- generators


def _check_index(spec: RepSpec, i: int) -> None:
    if not 1 <= i <= spec.m:
        raise IndexError(f"generator index {i} outside 1..{spec.m}")


def mjj_for(spec: RepSpec, check: bool = True) -> MonomialOperator:
    q = spec.q_matrix if spec.q_matrix is not None else spec.phase_params
    return build_mjj(spec.k, q, spec.sign_convention, check=check)


def class1_generator(spec: RepSpec, i: int, check: bool = True) -> MonomialOperator:
    if spec.rep_class != 1:
        raise ValueError("class1_generator needs a class 1 spec")
    _check_index(spec, i)
    n = 2 * spec.k
    block = mjj_for(spec, check=check)
    left = MonomialOperator.identity(n ** (i - 1))
    right = MonomialOperator.identity(n ** (spec.m - i))
    return left.kron(block).kron(right)


def class2_generator(spec: RepSpec, i: int) -> MonomialOperator:
    if spec.rep_class != 2:
        raise ValueError("class2_generator needs a class 2 spec")
    _check_index(spec, i)
    left = MonomialOperator.identity(2 ** (spec.k * (i - 1)))
    right = MonomialOperator.identity(2 ** (spec.k * (spec.m - i)))
    return left.kron(almost_complex(spec.N)).kron(right)


_GEN_CACHE: dict = {}
_GEN_CACHE_LIMIT = 64


def generator(spec: RepSpec, i: int, check: bool = True) -> MonomialOperator:
    """Image of ``e_i``, cached per spec."""
    key = (spec.cache_key(), i, check)
    hit = _GEN_CACHE.get(key)
    if hit is not None:
        return hit
    op = class1_generator(spec, i, check) if spec.rep_class == 1 else class2_generator(spec, i)
    if len(_GEN_CACHE) >= _GEN_CACHE_LIMIT:
        _GEN_CACHE.pop(next(iter(_GEN_CACHE)))
    _GEN_CACHE[key] = op
    return op


def generators(spec: RepSpec, check: bool = True) -> list[MonomialOperator]:
    return [generator(spec, i, check) for i in range(1, spec.m + 1)]


def class1_dense_generator(spec: RepSpec, i: int) -> np.ndarray:
    """Dense oracle built from explicit sums of outer products and ``numpy.kron``."""
    n = 2 * spec.k
    q = spec.q_matrix if spec.q_matrix is not None else spec.phase_params.pair_matrix()
    eps = spec.sign_convention.eps
    block = np.zeros((n * n, n * n), dtype=complex)
    for a in range(n):
        for b in range(n):
            ket = np.zeros(n * n)
            ket[a * n + b] = 1
            bra = np.zeros(n * n)
            bra[(n - 1 - a) * n + (n - 1 - b)] = 1
            block += eps[a] * q[a, b] * np.outer(ket, bra)
    eye = np.eye(n)
    return linalg.kron_all([eye] * (i - 1) + [block] + [eye] * (spec.m - i))


def class2_dense_generator(spec: RepSpec, i: int) -> np.ndarray:
    """Dense oracle built from Pauli matrices and ``numpy.kron``."""
    blocks = [np.eye(2 ** spec.k)] * (i - 1)
    blocks += [linalg.ISIGMA_Y] + [linalg.SIGMA_X] * (spec.N - 1)
    blocks += [np.eye(2 ** spec.k)] * (spec.m - i)
    return linalg.kron_all(blocks)


def rep_of_element(spec: RepSpec, g: GroupElement) -> MonomialOperator:
    if g.m != spec.m:
        raise GroupMismatch(f"element of E_{g.m} for a representation of E_{spec.m}")
    out = MonomialOperator.identity(spec.dim)
    for i in g.support:
        out = out.compose(generator(spec, i))
    return out.scale(float(g.sign)) if g.sign == -1 else out


# ---------------------------------------------------------------- verification


def anticommute_predicted(N: int, k: int, i: int, j: int) -> bool:
    """Class 2: do generators ``i < j`` anticommute?"""
    return 1 <= k * abs(j - i) <= N - 1


def _pair_error(a: MonomialOperator, b: MonomialOperator, sign: float) -> tuple[float, dict | None]:
    """Deviation of ``ab`` from ``sign * ba``."""
    ab, ba = a.compose(b), b.compose(a).scale(sign)
    return linalg.sum_deviation([ab], [ba])


@with_timing
def verify_esp_relations(spec: RepSpec, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Squares, far commutation, adjacent anticommutation and anti-Hermiticity."""
    try:
        gens = generators(spec, check=False)
    except ValueError as exc:
        return VerificationReport("esp-relations", False, float("inf"), tol,
                                  {"error": str(exc)})
    minus_id = MonomialOperator.identity(spec.dim).scale(-1.0)
    squares, far, adj, herm = [], [], [], []
    for i, t in enumerate(gens, start=1):
        err, wit = linalg.sum_deviation([t.compose(t)], [minus_id])
        squares.append((err, {"i": i, **(wit or {})}))
        err, wit = linalg.sum_deviation([t.adjoint()], [t.scale(-1.0)])
        herm.append((err, {"i": i, **(wit or {})}))
    for i, j in itertools.combinations(range(1, spec.m + 1), 2):
        a, b = gens[i - 1], gens[j - 1]
        if j - i == 1:
            err, wit = _pair_error(a, b, -1.0)
            adj.append((err, {"i": i, "j": j, **(wit or {})}))
        else:
            err, wit = _pair_error(a, b, 1.0)
            far.append((err, {"i": i, "j": j, **(wit or {})}))

    leaf = VerificationReport.worst
    children = [leaf("squares", squares, tol), leaf("far-commutation", far, tol),
                leaf("adjacent-anticommutation", adj, tol), leaf("anti-hermitian", herm, tol)]
    return VerificationReport.combine("esp-relations", children, tol,
                                      spec=spec.to_json(), dim=spec.dim)


def check_e3prime(ti, tj, tol: float = DEFAULT_TOL) -> VerificationReport:
    """``T_i + T_i T_j T_i - T_j - T_j T_i T_j = 0`` for monomial or dense inputs."""
    if isinstance(ti, MonomialOperator) and isinstance(tj, MonomialOperator):
        lhs = [ti, ti.compose(tj).compose(ti)]
        rhs = [tj, tj.compose(ti).compose(tj)]
        err, wit = linalg.sum_deviation(lhs, rhs)
    else:
        a = linalg.operator_dense(ti)
        b = linalg.operator_dense(tj)
        resid = a + a @ b @ a - b - b @ a @ b
        err, wit = float(np.abs(resid).max()), None
    return VerificationReport.leaf("e3-prime", err, tol, wit)


def equivalence_diagonal(spec: RepSpec) -> np.ndarray:
    """Diagonal of ``U^{(x)(m+1)}`` with ``U = diag(sqrt q_p)``."""
    root = spec.phase_params.sqrt()
    out = np.ones(1, dtype=complex)
    for _ in range(spec.m + 1):
        out = np.kron(out, root)
    return out


@with_timing
def verify_unitary_equivalence(spec: RepSpec, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Conjugating the undeformed generators by ``U^{(x)(m+1)}`` gives the deformed ones."""
    if spec.rep_class != 1 or spec.q_matrix is not None:
        raise ValueError("needs a class 1 spec with separable phases")
    plain = RepSpec.class1(spec.m, spec.k, None, spec.signs)
    d = equivalence_diagonal(spec)
    worst, witness = 0.0, None
    for i in range(1, spec.m + 1):
        conj = generator(plain, i).conjugate_by_diagonal(d)
        err = conj.max_deviation(generator(spec, i))
        if err > worst:
            worst, witness = err, {"i": i}
    return VerificationReport.leaf("unitary-equivalence", worst, tol, witness)

