"""Command-line entry point.

Exit codes: 0 when every requested check passes, 1 when a check fails and 2
for usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import braid, decomp, espgroup, ghz, linalg, reps, ybx
from .linalg import DEFAULT_TOL
from .report import VerificationReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_ANGLE = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*(pi)?\s*$")


def parse_angle(text: str) -> float:
    """``"0.3"``, ``"0.25pi"``, ``"pi"`` or ``"-0.5*pi"`` to radians."""
    s = text.strip().lower()
    if s.startswith("-pi") or s.startswith("+pi"):
        s = s[0] + "1" + s[1:]
    match = _ANGLE.match(s)
    if not match or (match.group(1) is None and match.group(2) is None):
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}")
    coeff = float(match.group(1)) if match.group(1) is not None else 1.0
    return coeff * math.pi if match.group(2) else coeff


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _angle_list(text: str) -> list[float]:
    return [parse_angle(t) for t in text.split(",") if t.strip()]


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)
    tol: float = DEFAULT_TOL
    seed: int = 42
    dense_cap: int | None = None
    output: str = "text"

    def rng(self, shard: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, shard])


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dense-cap", type=int, default=None)
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    return p


def _spec_args(p: argparse.ArgumentParser, m_flag: str | None = "--m") -> None:
    p.add_argument("--class", dest="rep_class", type=int, choices=(1, 2), default=2)
    p.add_argument("--N", type=int, default=3, help="class 2 block size in qubits")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--angles", type=_angle_list, default=None,
                   help="class 1 deformation angles, k comma-separated values")
    if m_flag == "--m":
        p.add_argument("--m", type=int, default=3, help="number of group generators")
    elif m_flag == "--strands":
        p.add_argument("--strands", type=int, default=3)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="braidforge",
                                     description="Braid representations from extraspecial 2-groups")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a verifier")
    vsub = verify.add_subparsers(dest="check", required=True)
    p = vsub.add_parser("group", parents=[common])
    p.add_argument("--m", type=int, default=5)
    p = vsub.add_parser("rep", parents=[common])
    _spec_args(p, "--m")
    p = vsub.add_parser("braid", parents=[common])
    _spec_args(p, "--strands")
    p.add_argument("--method", choices=("expand", "sweep", "dense"), default="expand")
    p = vsub.add_parser("gybe", parents=[common])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p = vsub.add_parser("qybe", parents=[common])
    _spec_args(p, "--strands")
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--y", type=float, default=None)
    p.add_argument("--samples", type=int, default=0, help="random (x, y) pairs in [-5, 5]^2")
    p = vsub.add_parser("qybe-additive", parents=[common])
    _spec_args(p, "--strands")
    p.add_argument("--theta1", type=parse_angle, default=None)
    p.add_argument("--theta2", type=parse_angle, default=None)
    p.add_argument("--samples", type=int, default=0, help="random pairs in [-3, 3]^2")
    p = vsub.add_parser("characteristic", parents=[common])
    _spec_args(p, "--strands")

    g = sub.add_parser("ghz", help="GHZ states")
    gsub = g.add_subparsers(dest="action", required=True)
    p = gsub.add_parser("generate", parents=[common])
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--index", type=int, required=True)
    p = gsub.add_parser("verify", parents=[common])
    p.add_argument("--qubits", type=int, required=True)

    p = sub.add_parser("evolve", parents=[common], help="apply exp(-theta' M) to a basis state")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--theta-prime", type=parse_angle, required=True)
    p.add_argument("--basis-index", type=int, required=True)

    p = sub.add_parser("decompose", parents=[common], help="decomposition multiplicities")
    _spec_args(p, "--strands")

    p = sub.add_parser("export", parents=[common], help="write matrices or states as JSON")
    p.add_argument("what", choices=("bell-matrix", "generator", "ghz-basis", "hamiltonian"))
    p.add_argument("--output", required=True, help="file path, or - for stdout")
    p.add_argument("--qubits", type=int, default=3)
    p.add_argument("--index", type=int, default=1, help="generator index")
    _spec_args(p, "--m")
    return parser


# ---------------------------------------------------------------- helpers


def _spec_from(ns, m: int) -> reps.RepSpec:
    if m < 1:
        raise UsageError("need at least one generator (strands >= 2)")
    if ns.rep_class == 2:
        if ns.angles:
            raise UsageError("--angles only applies to class 1")
        return reps.RepSpec.class2(m, ns.N, ns.k)
    phases = None
    if ns.angles is not None:
        if len(ns.angles) != ns.k:
            raise UsageError(f"--angles needs {ns.k} values for k={ns.k}")
        phases = reps.PhaseParams.from_angles(ns.angles)
    return reps.RepSpec.class1(m, ns.k, phases)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (complex, np.complexfloating)):
        return linalg.complex_to_json(o)
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def dumps(obj, compact: bool = False) -> str:
    if compact:
        return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_json_default)
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default)


def _emit_report(cfg: RunConfig, rep: VerificationReport, out) -> int:
    if cfg.output == "json":
        out.write(dumps(rep.to_dict()) + "\n")
    else:
        out.write("\n".join(rep.summary_lines()) + "\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


@contextmanager
def _dense_cap(cap: int | None):
    key = "BRAIDFORGE_DENSE_CAP"
    old = os.environ.get(key)
    if cap is not None:
        if cap < 1:
            raise UsageError("--dense-cap must be positive")
        os.environ[key] = str(cap)
    try:
        yield
    finally:
        if cap is not None:
            if old is None:
                os.environ.pop(key, None)
            else:
                os.environ[key] = old


# ---------------------------------------------------------------- commands


def _verify_group(cfg, ns) -> VerificationReport:
    m = ns.m
    if not 1 <= m <= espgroup.ENUMERATION_CAP:
        raise UsageError(f"--m must be in 1..{espgroup.ENUMERATION_CAP}")
    enum = espgroup.order_by_enumeration(m)
    children = [VerificationReport.leaf("order", abs(enum - espgroup.order(m)), 0.0,
                                        {"enumerated": enum, "formula": espgroup.order(m)})]
    formula = espgroup.center(m)
    brute = espgroup.center_brute(m)
    same = set(formula.elements) == set(brute.elements) and formula.iso_class == brute.iso_class
    children.append(VerificationReport.leaf(
        "center", 0.0 if same else 1.0, 0.0,
        {"formula": [str(g) for g in formula.elements], "brute": [str(g) for g in brute.elements]},
        elements=[str(g) for g in formula.elements], iso_class=formula.iso_class))
    if m >= 2:
        comm = espgroup.commutator_subgroup(m)
        want = {espgroup.GroupElement.identity(m), espgroup.GroupElement.minus_one(m)}
        children.append(VerificationReport.leaf("commutator-subgroup", 0.0 if comm == want else 1.0,
                                                0.0, {"found": sorted(str(g) for g in comm)}))
    return VerificationReport.combine("group", children, cfg.tol, m=m, order=enum)


def _sample_pairs(cfg: RunConfig, ns, a: str, b: str, lo: float, hi: float,
                  shard: int) -> list[tuple[float, float]]:
    pairs = []
    va, vb = getattr(ns, a), getattr(ns, b)
    if va is not None or vb is not None:
        if va is None or vb is None:
            raise UsageError(f"give both --{a} and --{b}")
        pairs.append((va, vb))
    if ns.samples < 0:
        raise UsageError("--samples must be >= 0")
    if ns.samples:
        draws = cfg.rng(shard).uniform(lo, hi, size=(ns.samples, 2))
        pairs.extend((float(x), float(y)) for x, y in draws)
    if not pairs:
        raise UsageError(f"give --{a}/--{b} or --samples")
    return pairs


def _verify(cfg: RunConfig, ns) -> VerificationReport:
    check = ns.check
    if check == "group":
        return _verify_group(cfg, ns)
    if check == "gybe":
        return braid.verify_gybe(ns.N, ns.k, tol=cfg.tol)
    if check == "rep":
        return reps.verify_esp_relations(_spec_from(ns, ns.m), tol=cfg.tol)
    rep = braid.BraidRep(_spec_from(ns, ns.strands - 1))
    if check == "braid":
        return braid.verify_braid_relations(rep, tol=cfg.tol, method=ns.method)
    if check == "characteristic":
        children = [ybx.characteristic_check(rep.generator(i), tol=cfg.tol)
                    for i in range(1, rep.strands)]
        for i, c in enumerate(children, start=1):
            c.name = f"characteristic[b{i}]"
        return VerificationReport.combine("characteristic", children, cfg.tol)
    if check == "qybe":
        pairs = _sample_pairs(cfg, ns, "x", "y", -5.0, 5.0, shard=1)
        children = [ybx.verify_qybe(rep, x, y, tol=cfg.tol) for x, y in pairs]
        return VerificationReport.combine("qybe-sweep", children, cfg.tol, samples=len(pairs))
    if check == "qybe-additive":
        pairs = _sample_pairs(cfg, ns, "theta1", "theta2", -3.0, 3.0, shard=2)
        children = [ybx.verify_qybe_additive(rep, a, b, tol=cfg.tol) for a, b in pairs]
        return VerificationReport.combine("qybe-additive-sweep", children, cfg.tol,
                                          samples=len(pairs))
    raise UsageError(f"unknown check {check!r}")


def _ghz(cfg: RunConfig, ns, out) -> int:
    if ns.action == "verify":
        return _emit_report(cfg, ghz.verify_ghz_columns(ns.qubits, tol=cfg.tol), out)
    state = ghz.ghz_state(ns.qubits, ns.index)
    if cfg.output == "json":
        out.write(dumps({"qubits": ns.qubits, "index": ns.index,
                         "state": linalg.state_to_json(state)}) + "\n")
    else:
        out.write(_format_state(ns.qubits, state))
    return EXIT_OK


def _format_state(N: int, v: np.ndarray) -> str:
    lines = []
    for idx in np.nonzero(np.abs(v) > 1e-15)[0]:
        word = ",".join("+1/2" if s > 0 else "-1/2" for s in ghz.spin_word(N, int(idx) + 1))
        z = complex(v[idx])
        lines.append(f"{int(idx) + 1:>6}  |{word}>  {z.real:+.16f} {z.imag:+.16f}i")
    return "\n".join(lines) + "\n"


def _evolve(cfg: RunConfig, ns, out) -> int:
    v = ybx.evolve(ns.qubits, ns.theta_prime, ns.basis_index)
    expected = ybx.evolve_closed_form(ns.qubits, ns.theta_prime, ns.basis_index)
    ok, err = linalg.approx_eq(v, expected, cfg.tol)
    norm_err = abs(float(np.linalg.norm(v)) - 1.0)
    passed = ok and norm_err <= cfg.tol
    if cfg.output == "json":
        out.write(dumps({"qubits": ns.qubits, "theta_prime": ns.theta_prime,
                         "basis_index": ns.basis_index, "state": linalg.state_to_json(v),
                         "closed_form_error": err, "norm_error": norm_err,
                         "passed": passed}) + "\n")
    else:
        out.write(f"theta' = {ns.theta_prime!r} rad\n")
        out.write(_format_state(ns.qubits, v))
        out.write(f"closed-form error {err:.3e}, norm error {norm_err:.3e}\n")
    return EXIT_OK if passed else EXIT_FAIL


def _decompose(cfg: RunConfig, ns, out) -> int:
    spec = _spec_from(ns, ns.strands - 1)
    return _emit_report(cfg, decomp.verify_decomposition(spec, tol=cfg.tol), out)


def _export(cfg: RunConfig, ns) -> dict:
    what = ns.what
    if what == "bell-matrix":
        return {"qubits": ns.qubits, **linalg.matrix_to_json(ghz.bell_matrix(ns.qubits).dense())}
    if what == "hamiltonian":
        return {"qubits": ns.qubits,
                **linalg.matrix_to_json(ybx.hamiltonian(ghz.almost_complex_for(ns.qubits)))}
    if what == "ghz-basis":
        return {"qubits": ns.qubits,
                "states": [linalg.state_to_json(ghz.ghz_state(ns.qubits, j))
                           for j in range(1, 2 ** ns.qubits + 1)]}
    spec = _spec_from(ns, ns.m)
    return {"spec": spec.to_json(), "index": ns.index,
            **reps.generator(spec, ns.index).to_json()}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    cfg = RunConfig(ns.command, {k: v for k, v in vars(ns).items()
                                 if k not in ("tol", "seed", "dense_cap", "json")},
                    ns.tol, ns.seed, ns.dense_cap, "json" if ns.json else "text")
    try:
        with _dense_cap(cfg.dense_cap):
            if ns.command == "verify":
                return _emit_report(cfg, _verify(cfg, ns), stdout)
            if ns.command == "ghz":
                return _ghz(cfg, ns, stdout)
            if ns.command == "evolve":
                return _evolve(cfg, ns, stdout)
            if ns.command == "decompose":
                return _decompose(cfg, ns, stdout)
            if ns.command == "export":
                payload = dumps(_export(cfg, ns), compact=True) + "\n"
                if ns.output == "-":
                    stdout.write(payload)
                else:
                    with open(ns.output, "w", encoding="utf-8") as fh:
                        fh.write(payload)
                    stdout.write(f"wrote {ns.what} to {ns.output}\n")
                return EXIT_OK
    except (UsageError, ValueError, IndexError, OSError) as exc:
        stderr.write(f"braidforge: error: {exc}\n")
        return EXIT_USAGE
    return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
