from __future__ import annotations

import functools
import time
from dataclasses import dataclass, field
from typing import Any

from .linalg import DEFAULT_TOL


@dataclass
class VerificationReport:
    """Outcome of a named check.

    ``passed`` is always ``max_error <= tol`` for leaf reports; a parent built
    with :meth:`combine` passes iff every child passes.  ``info`` carries
    non-gating observations.
    """

    name: str
    passed: bool
    max_error: float
    tol: float = DEFAULT_TOL
    witness: dict | None = None
    elapsed_ms: float = 0.0
    details: list[VerificationReport] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def leaf(cls, name: str, max_error: float, tol: float = DEFAULT_TOL,
             witness: dict | None = None, **info) -> VerificationReport:
        max_error = float(max_error)
        passed = max_error <= tol
        return cls(name, passed, max_error, tol,
                   None if passed else witness, info=dict(info))

    @classmethod
    def worst(cls, name: str, items, tol: float = DEFAULT_TOL) -> VerificationReport:
        """Leaf for the largest of ``(error, witness)`` pairs from repeated instances."""
        items = list(items)
        if not items:
            return cls.leaf(name, 0.0, tol, checked=0)
        err, wit = max(items, key=lambda t: t[0])
        return cls.leaf(name, err, tol, wit, checked=len(items))

    @classmethod
    def combine(cls, name: str, children: list[VerificationReport],
                tol: float = DEFAULT_TOL, **info) -> VerificationReport:
        worst = max((c.max_error for c in children), default=0.0)
        passed = all(c.passed for c in children)
        witness = None
        if not passed:
            first = next(c for c in children if not c.passed)
            witness = {"check": first.name, **(first.witness or {})}
        return cls(name, passed, worst, tol, witness, details=list(children),
                   info=dict(info))

    def failures(self) -> list[VerificationReport]:
        """Leaf reports that failed, depth first."""
        if not self.details:
            return [] if self.passed else [self]
        out = []
        for c in self.details:
            out.extend(c.failures())
        return out

    def to_dict(self, include_timing: bool = False) -> dict:
        d: dict[str, Any] = {
            "name": self.name,
            "passed": self.passed,
            "max_error": self.max_error,
            "tol": self.tol,
        }
        if self.witness is not None:
            d["witness"] = self.witness
        if self.info:
            d["info"] = self.info
        if include_timing:
            d["elapsed_ms"] = self.elapsed_ms
        if self.details:
            d["details"] = [c.to_dict(include_timing) for c in self.details]
        return d

    def summary_lines(self, indent: int = 0) -> list[str]:
        mark = "PASS" if self.passed else "FAIL"
        line = f"{'  ' * indent}[{mark}] {self.name}  max_error={self.max_error:.3e}"
        if self.witness and not self.details:
            line += f"  witness={self.witness}"
        lines = [line]
        for c in self.details:
            lines.extend(c.summary_lines(indent + 1))
        return lines


def with_timing(fn):
    """Decorator stamping ``elapsed_ms`` onto the returned report."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.elapsed_ms = (time.perf_counter() - start) * 1e3
        return rep

    return wrapper
