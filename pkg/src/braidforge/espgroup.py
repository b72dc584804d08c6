from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterator

import numpy as np

ENUMERATION_CAP = 10


class GroupMismatch(ValueError):
    pass


def _check_m(m: int) -> None:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")


def _check_enum_cap(m: int, cap: int | None) -> None:
    limit = ENUMERATION_CAP if cap is None else cap
    if m > limit:
        raise ValueError(f"m={m} exceeds enumeration cap {limit}")


def sign_exponent(a_bits: int, b_bits: int) -> int:
    """Parity of sign flips when normal forms ``e^a`` and ``e^b`` are concatenated.

    Moving each ``e_i`` of ``b`` left past ``e_{i+1}`` of ``a`` costs one flip;
    each shared ``e_i`` squares to ``-1``.
    """
    return (bin(b_bits & (a_bits >> 1)).count("1") + bin(a_bits & b_bits).count("1")) & 1


@dataclass(frozen=True, order=True)
class GroupElement:
    """``sign * e_1^{a_1} ... e_m^{a_m}`` with ``a_i`` stored as bit ``i-1`` of ``bits``."""

    m: int
    sign: int
    bits: int

    def __post_init__(self):
        _check_m(self.m)
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not 0 <= self.bits < (1 << self.m):
            raise ValueError(f"exponent bits {self.bits} out of range for m={self.m}")

    @classmethod
    def identity(cls, m: int) -> GroupElement:
        return cls(m, 1, 0)

    @classmethod
    def minus_one(cls, m: int) -> GroupElement:
        return cls(m, -1, 0)

    @classmethod
    def generator(cls, m: int, i: int) -> GroupElement:
        if not 1 <= i <= m:
            raise IndexError(f"generator e{i} outside 1..{m}")
        return cls(m, 1, 1 << (i - 1))

    @classmethod
    def from_exponents(cls, m: int, exps, sign: int = 1) -> GroupElement:
        bits = 0
        for i, a in enumerate(exps):
            if a & 1:
                bits |= 1 << i
        return cls(m, sign, bits)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.m))

    @property
    def support(self) -> tuple[int, ...]:
        """1-based indices of generators present in the normal form."""
        return tuple(i + 1 for i in range(self.m) if (self.bits >> i) & 1)

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)

    def __neg__(self) -> GroupElement:
        return GroupElement(self.m, -self.sign, self.bits)

    def inverse(self) -> GroupElement:
        # g * g = sign^2 * (-1)^S(a, a), so g^-1 = (-1)^S(a, a) * g
        flip = sign_exponent(self.bits, self.bits)
        return GroupElement(self.m, self.sign * (-1) ** flip, self.bits)

    def power(self, n: int) -> GroupElement:
        out = GroupElement.identity(self.m)
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out * base
        return out

    def order(self) -> int:
        g, n = self, 1
        while not g.is_identity():
            g, n = g * self, n + 1
        return n

    def is_identity(self) -> bool:
        return self.sign == 1 and self.bits == 0

    def is_central(self) -> bool:
        return all(commutes(self, GroupElement.generator(self.m, i)) for i in range(1, self.m + 1))

    def __str__(self) -> str:
        return format_element(self)


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    if a.m != b.m:
        raise GroupMismatch(f"elements of E_{a.m} and E_{b.m}")
    sign = a.sign * b.sign * (-1) ** sign_exponent(a.bits, b.bits)
    return GroupElement(a.m, sign, a.bits ^ b.bits)


def commutator(a: GroupElement, b: GroupElement) -> GroupElement:
    return a * b * a.inverse() * b.inverse()


def commutes(a: GroupElement, b: GroupElement) -> bool:
    return commutator(a, b).is_identity()


def format_element(g: GroupElement) -> str:
    if g.bits == 0:
        return "1" if g.sign == 1 else "-1"
    body = "*".join(f"e{i}" for i in g.support)
    return body if g.sign == 1 else "-" + body


_TOKEN = re.compile(r"e(\d+)$")


def parse_element(text: str, m: int) -> GroupElement:
    """Parse ``"-e1*e3"`` style text.  Factors may appear in any order and repeat."""
    s = text.strip().replace(" ", "")
    sign = 1
    while s.startswith(("-", "+")):
        if s[0] == "-":
            sign = -sign
        s = s[1:]
    g = GroupElement(m, sign, 0)
    if s in ("1", ""):
        if s == "" and text.strip() in ("", "-", "+"):
            raise ValueError(f"cannot parse group element {text!r}")
        return g
    for tok in s.split("*"):
        match = _TOKEN.match(tok)
        if not match:
            raise ValueError(f"bad factor {tok!r} in {text!r}")
        g = g * GroupElement.generator(m, int(match.group(1)))
    return g


def elements(m: int) -> Iterator[GroupElement]:
    """All ``2^{m+1}`` normal forms, sign-major."""
    _check_m(m)
    for sign in (1, -1):
        for bits in range(1 << m):
            yield GroupElement(m, sign, bits)


def order(m: int) -> int:
    _check_m(m)
    return 2 ** (m + 1)


def order_by_enumeration(m: int, cap: int | None = None) -> int:
    """Size of the closure of ``{e_1..e_m}`` under multiplication, by BFS."""
    _check_m(m)
    _check_enum_cap(m, cap)
    gens = [GroupElement.generator(m, i) for i in range(1, m + 1)]
    start = GroupElement.identity(m)
    seen = {start}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for h in gens:
            gh = g * h
            if gh not in seen:
                seen.add(gh)
                queue.append(gh)
    return len(seen)


@dataclass(frozen=True)
class CenterDescription:
    elements: tuple[GroupElement, ...]
    iso_class: str  # "Z2", "Z2xZ2" or "Z4"


def _iso_label(elts) -> str:
    if len(elts) == 2:
        return "Z2"
    return "Z4" if max(g.order() for g in elts) == 4 else "Z2xZ2"


def center(m: int) -> CenterDescription:
    _check_m(m)
    one, minus = GroupElement.identity(m), GroupElement.minus_one(m)
    if m % 2 == 0:
        return CenterDescription((one, minus), "Z2")
    z = GroupElement.from_exponents(m, [1 if i % 2 == 0 else 0 for i in range(m)])
    # z^2 = (-1)^k with m = 2k - 1
    k = (m + 1) // 2
    return CenterDescription((one, minus, z, -z), "Z2xZ2" if k % 2 == 0 else "Z4")


def center_brute(m: int, cap: int | None = None) -> CenterDescription:
    _check_enum_cap(m, cap)
    elts = tuple(g for g in elements(m) if g.is_central())
    return CenterDescription(elts, _iso_label(elts))


def commutator_subgroup(m: int, cap: int | None = None) -> frozenset[GroupElement]:
    """Subgroup generated by all ``aba^-1b^-1``, by vectorised brute force over pairs."""
    _check_m(m)
    _check_enum_cap(m, cap)
    n = 1 << m
    sign = np.concatenate([np.ones(n, np.int64), -np.ones(n, np.int64)])
    bits = np.concatenate([np.arange(n, dtype=np.int64)] * 2)
    inv_sign, inv_bits = _inverse_arrays(sign, bits)
    sa, ba = sign[:, None], bits[:, None]
    sb, bb = sign[None, :], bits[None, :]
    s1, b1 = _multiply_arrays(sa, ba, sb, bb)
    s2, b2 = _multiply_arrays(s1, b1, inv_sign[:, None], inv_bits[:, None])
    s3, b3 = _multiply_arrays(s2, b2, inv_sign[None, :], inv_bits[None, :])
    pairs = np.unique(np.stack([s3.ravel(), b3.ravel()], axis=1), axis=0)
    gens = {GroupElement(m, int(s), int(b)) for s, b in pairs}
    closed = {GroupElement.identity(m)}
    frontier = list(closed)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = g * h
                if gh not in closed:
                    closed.add(gh)
                    nxt.append(gh)
        frontier = nxt
    return frozenset(closed)


def _popcount(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=np.int64)
    count = np.zeros_like(x)
    while np.any(x):
        count += x & 1
        x >>= 1
    return count


def _multiply_arrays(sa, ba, sb, bb):
    flips = (_popcount(bb & (ba >> 1)) + _popcount(ba & bb)) & 1
    return sa * sb * (1 - 2 * flips), ba ^ bb


def _inverse_arrays(sign, bits):
    flips = _popcount(bits & (bits >> 1)) + _popcount(bits)
    return sign * (1 - 2 * (flips & 1)), bits


def embed(g: GroupElement, m_new: int) -> GroupElement:
    """Image under the inclusion ``E_m -> E_{m_new}`` sending ``e_i`` to ``e_i``."""
    if m_new < g.m:
        raise ValueError("can only embed into a larger group")
    return GroupElement(m_new, g.sign, g.bits)
