"""Command-line front end.

Pattern and circuit arguments are file paths, ``-`` for stdin, or ``@name``
for a shipped fixture.  ``ONEWAY_FIXTURES`` points ``@name`` lookups at
another directory.

Exit status: 0 on success, 1 on unreadable input, 2 on usage errors and 3
when the answer is negative (rejected pattern, no flow, inconsistent
dependencies, failed round trip).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .construct import RBB, ConstructionMode, build, circuit_normal_form
from .corpus import FIXTURE_DIR
from .deps import check_dependencies
from .extract import remove_idops, semantic_report
from .flow import FlowProblem, find_mod_star_decomp
from .formats import (
    ParseError,
    expr_to_circuit,
    expr_to_json,
    format_circuit,
    format_pattern,
    parse_circuit,
    parse_pattern,
)
from .pattern_core import Pattern, PatternError, geometry_of
from .rewrite import RewriteTrace, normalize, standardize
from .sim_oracle import (
    MAX_QUBITS,
    TooLarge,
    branch_unitary,
    circuit_unitary,
    equal_up_to_phase,
    gates_unitary,
    run_pattern,
)
from .stable_index import KET, Circuit, Gate, depth, from_gates_free, gate_counts, isomorphic, qubit_count, to_htcz

NEGATIVE = 3


@dataclass(frozen=True)
class Config:
    tol: float = 1e-9
    seed: int = 0
    max_qubits: int = MAX_QUBITS
    output: str = "text"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.output not in ("text", "json"):
            raise ValueError(f"unknown output format {self.output}")

    @property
    def json(self) -> bool:
        return self.output == "json"


def fixture_dir() -> Path:
    return Path(os.environ.get("ONEWAY_FIXTURES", FIXTURE_DIR))


def read_source(arg: str, suffix: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if arg.startswith("@"):
        return (fixture_dir() / f"{arg[1:]}{suffix}").read_text()
    return Path(arg).read_text()


def load_pattern(arg: str) -> Pattern:
    return parse_pattern(read_source(arg, ".mcal"))


def load_circuit(arg: str) -> Circuit:
    return parse_circuit(read_source(arg, ".qc"))


def write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit(cfg: Config, obj, text: str) -> None:
    print(json.dumps(obj, indent=2) if cfg.json else text)


def complex_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(m)]


# round trip


@dataclass
class RoundtripReport:
    circuit: Circuit
    variant: str
    reason: str | None = None
    isomorphic: bool = False
    unitary: bool = False
    counts_in: dict = field(default_factory=dict)
    counts_out: dict = field(default_factory=dict)

    @property
    def bounds(self) -> bool:
        a, b = self.counts_in, self.counts_out
        if not a or not b:
            return False
        if b["qubits"] > a["qubits"] or b["depth"] > a["depth"]:
            return False
        return all(b["gates"].get(k, 0) <= n for k, n in a["gates"].items()) and set(b["gates"]) <= set(a["gates"])

    @property
    def passed(self) -> bool:
        return self.reason is None and self.isomorphic and self.unitary and self.bounds

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "status": "PASS" if self.passed else "FAIL",
            "reason": self.reason,
            "isomorphic": self.isomorphic,
            "unitary": self.unitary,
            "bounds": self.bounds,
            "input": self.counts_in,
            "output": self.counts_out,
        }

    def line(self) -> str:
        a, b = self.counts_in, self.counts_out
        if self.reason:
            return f"FAIL {self.variant} rejected: {self.reason}"
        return (
            f"{'PASS' if self.passed else 'FAIL'} {self.variant} iso={self.isomorphic} unitary={self.unitary} "
            f"qubits {a['qubits']}->{b['qubits']} depth {a['depth']}->{b['depth']} "
            f"gates {a['gates']}->{b['gates']}"
        )


def _counts(e) -> dict:
    return {"qubits": qubit_count(e), "depth": depth(e), "gates": {k: v for k, v in sorted(gate_counts(e).items())}}


def reference_expr(c: Circuit, mode: ConstructionMode):
    """The input normal form over H, T, CZ that a round trip should reproduce."""
    return remove_idops(to_htcz(from_gates_free(circuit_normal_form(c, mode).gates)))


def roundtrip(c: Circuit, mode: ConstructionMode = ConstructionMode(), tol: float = 1e-9) -> RoundtripReport:
    if any(g.name == KET for g in c.gates):
        raise ValueError("round trips take circuits without fresh qubits")
    rep = RoundtripReport(c, mode.variant)
    b = build(c, mode)
    res = semantic_report(b.pattern)
    ref = reference_expr(c, mode)
    rep.counts_in = _counts(ref)
    if not res.ok:
        rep.reason = res.reason
        return rep
    rep.counts_out = _counts(res.expr)
    rep.isomorphic = isomorphic(res.expr, ref) is not None
    f = res.flow.f
    outs = []
    for s in b.inputs:
        x = s
        while x in f:
            x = f[x]
        outs.append(res.index_of(x))
    u = circuit_unitary(res.expr, list(b.inputs), outs)
    rep.unitary = equal_up_to_phase(u, gates_unitary(c), tol)
    return rep


def random_circuit(rng: random.Random, qubits: int, gates: int, lnn: bool = False) -> Circuit:
    """Uniform gates from H, T, Tdg, CZ; CZ on neighbouring wires when ``lnn``."""
    qs = tuple(f"q{i}" for i in range(qubits))
    kinds = ["H", "T", "Tdg"] + (["CZ"] if qubits > 1 else [])
    out = []
    for _ in range(gates):
        k = rng.choice(kinds)
        if k != "CZ":
            out.append(Gate(k, (rng.choice(qs),)))
        elif lnn:
            i = rng.randrange(qubits - 1)
            out.append(Gate("CZ", (qs[i], qs[i + 1])))
        else:
            out.append(Gate("CZ", tuple(rng.sample(qs, 2))))
    return Circuit(qs, tuple(out))


# subcommands


def cmd_compile(args, cfg: Config) -> int:
    c = load_circuit(args.circuit)
    mode = ConstructionMode(args.mode.upper(), not args.no_normalize)
    write_text(args.output, format_pattern(build(c, mode).pattern))
    return 0


def cmd_rewrite(args, cfg: Config) -> int:
    p = load_pattern(args.pattern)
    trace = RewriteTrace() if args.trace else None
    out = normalize(p, trace) if args.to == "normal" else standardize(p, trace)
    write_text(args.output, format_pattern(out))
    if trace is not None:
        steps = [{"rule": r, "index": i} for r, i in trace.steps]
        print(json.dumps(steps), file=sys.stderr)
    return 0


def cmd_semantic(args, cfg: Config) -> int:
    res = semantic_report(load_pattern(args.pattern))
    if not res.ok:
        _emit(cfg, {"status": "rejected", "reason": res.reason, "detail": res.detail}, f"rejected: {res.reason}" + (f" ({res.detail})" if res.detail else ""))
        return NEGATIVE
    text = format_circuit(expr_to_circuit(res.expr))
    if args.output:
        write_text(args.output, text)
    if cfg.json:
        print(json.dumps({"status": "extracted", "normalized_input": res.normalized_input, "expr": expr_to_json(res.expr)}, indent=2))
    elif not args.output:
        sys.stdout.write(text)
    return 0


def _flow_json(flow) -> dict:
    return {
        "f": {str(v): str(w) for v, w in flow.f.items()},
        "L": [str(v) for v in flow.order],
        "layers": {str(v): k for v, k in flow.layers.items()},
    }


def _mediators(angles) -> frozenset:
    return frozenset(v for v, (_, a) in angles.items() if a == 2)


def cmd_check_flow(args, cfg: Config) -> int:
    g, angles = geometry_of(load_pattern(args.pattern))
    flow = find_mod_star_decomp(FlowProblem(g, _mediators(angles)))
    if flow is None:
        _emit(cfg, {"status": "no-flow"}, "no-flow")
        return NEGATIVE
    print(json.dumps(_flow_json(flow), indent=2))
    return 0


def cmd_verify_deps(args, cfg: Config) -> int:
    p = load_pattern(args.pattern)
    if args.flow:
        f = json.loads(Path(args.flow).read_text())["f"]
    else:
        g, angles = geometry_of(p)
        flow = find_mod_star_decomp(FlowProblem(g, _mediators(angles)))
        if flow is None:
            _emit(cfg, {"status": "no-flow"}, "no-flow")
            return NEGATIVE
        f = flow.f
    rep = check_dependencies(p, f)
    if rep.ok:
        _emit(cfg, {"status": "consistent"}, "consistent")
        return 0
    _emit(cfg, {"status": "inconsistent", "qubit": rep.qubit, "kind": rep.kind}, f"inconsistent: {rep.qubit} ({rep.kind})")
    return NEGATIVE


def cmd_simulate(args, cfg: Config) -> int:
    bm = run_pattern(load_pattern(args.pattern), max_qubits=cfg.max_qubits)
    head = {"inputs": list(bm.inputs), "outputs": list(bm.outputs)}
    if args.as_unitary:
        u = branch_unitary(bm, cfg.tol)
        if u is None:
            print(json.dumps({**head, "unitary": None}))
            return NEGATIVE
        print(json.dumps({**head, "unitary": complex_json(u)}))
        return 0
    rows = [{"outcomes": dict(zip(bm.measured, bits)), "kraus": complex_json(k)} for bits, k in bm.branches]
    print(json.dumps({**head, "branches": rows}))
    return 0


def cmd_roundtrip(args, cfg: Config) -> int:
    mode = ConstructionMode(args.mode.upper())
    if args.random:
        rng = random.Random(cfg.seed)
        circuits = [
            random_circuit(rng, rng.randint(1, args.qubits), rng.randint(0, args.gates), lnn=mode.variant == RBB)
            for _ in range(args.random)
        ]
    elif args.circuit:
        circuits = [load_circuit(args.circuit)]
    else:
        raise SystemExit("roundtrip needs a circuit file or --random N")
    reports = [roundtrip(c, mode, cfg.tol) for c in circuits]
    if cfg.json:
        print(json.dumps([r.to_json() for r in reports], indent=2))
    else:
        for r in reports:
            print(r.line())
    return 0 if all(r.passed for r in reports) else NEGATIVE


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="numerical tolerance (default 1e-9)")
    p.add_argument("--max-qubits", type=int, default=argparse.SUPPRESS, help="simulator size limit")
    return p


def make_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="oneway", description="Circuits to one-way patterns and back.", parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", parents=[common], help="circuit to pattern")
    p.add_argument("circuit")
    p.add_argument("--mode", choices=["dkp", "rbb"], default="dkp")
    p.add_argument("--no-normalize", action="store_true", help="stop at standard form")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("rewrite", parents=[common], help="standardize or normalize a pattern")
    p.add_argument("pattern")
    p.add_argument("--to", choices=["standard", "normal"], default="normal")
    p.add_argument("--trace", action="store_true", help="rule log as JSON on stderr")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("semantic", parents=[common], help="pattern back to a circuit")
    p.add_argument("pattern")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_semantic)

    p = sub.add_parser("check-flow", parents=[common], help="find a modified flow")
    p.add_argument("pattern")
    p.set_defaults(func=cmd_check_flow)

    p = sub.add_parser("verify-deps", parents=[common], help="check dependencies against a flow")
    p.add_argument("pattern")
    p.add_argument("--flow", help="JSON with an 'f' map, as printed by check-flow")
    p.set_defaults(func=cmd_verify_deps)

    p = sub.add_parser("simulate", parents=[common], help="branch table or unitary of a pattern")
    p.add_argument("pattern")
    p.add_argument("--as-unitary", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("roundtrip", parents=[common], help="construct, extract and compare")
    p.add_argument("circuit", nargs="?")
    p.add_argument("--mode", choices=["dkp", "rbb"], default="dkp")
    p.add_argument("--random", type=int, metavar="N", help="N random circuits instead of a file")
    p.add_argument("--qubits", type=int, default=4)
    p.add_argument("--gates", type=int, default=12)
    p.set_defaults(func=cmd_roundtrip)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    cfg = Config(
        tol=getattr(args, "tol", 1e-9),
        seed=getattr(args, "seed", 0),
        max_qubits=getattr(args, "max_qubits", MAX_QUBITS),
        output="json" if getattr(args, "json", False) else "text",
    )
    try:
        return args.func(args, cfg)
    except (ParseError, PatternError, OSError, TooLarge) as e:
        print(f"oneway: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
