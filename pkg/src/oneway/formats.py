"""Text formats for patterns and circuits, plus JSON exports.

Pattern files (``.mcal``) hold one command per line, executed top to bottom::

    input v
    N w
    E v w
    M v XY -1 s: a+b
    X w v

Circuit files (``.qc``) start with ``in a b`` and list gates ``H a``,
``T a``, ``Tdg a``, ``CZ a b``, ``ZZ a b``, ``J t a`` and ``KET+ a``.
Angles are integer multiples of pi/4.  ``#`` starts a comment.
"""

from __future__ import annotations

from .pattern_core import (
    XY,
    YZ,
    CorrectX,
    CorrectZ,
    Entangle,
    Measure,
    Pattern,
    PatternError,
    Prepare,
    Shift,
)
from .stable_index import KET, Circuit, Gate, StableIndexExpr, successor_fn, to_pattern_order


class ParseError(SyntaxError):
    def __init__(self, msg: str, lineno: int, col: int = 1, text: str = ""):
        super().__init__(f"line {lineno}, col {col}: {msg}", ("<input>", lineno, col, text))


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line, raw


def _signal(tok: str) -> frozenset:
    return frozenset(q for q in tok.split("+") if q)


def _fmt_signal(s) -> str:
    return "+".join(sorted(map(str, s)))


def _int(tok: str, n: int, raw: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer angle, got {tok!r}", n, raw.find(tok) + 1, raw) from None


def parse_pattern(text: str) -> Pattern:
    inputs: list = []
    cmds: list = []
    seen_header = False
    for n, line, raw in _lines(text):
        toks = line.split()
        op, args = toks[0], toks[1:]
        try:
            if op == "input":
                if seen_header or cmds:
                    raise ParseError("input header must come first and only once", n, 1, raw)
                seen_header = True
                inputs = args
            elif op == "N" and len(args) == 1:
                cmds.append(Prepare(args[0]))
            elif op == "E" and len(args) == 2:
                cmds.append(Entangle(*args))
            elif op == "M" and len(args) >= 3:
                v, plane, angle = args[:3]
                if plane not in (XY, YZ):
                    raise ParseError(f"unknown plane {plane!r}", n, raw.find(plane) + 1, raw)
                rest = " ".join(args[3:]).strip().strip("[]").strip()
                sign = frozenset()
                if rest:
                    if not rest.startswith("s:"):
                        raise ParseError("sign dependency must read 's: a+b'", n, raw.find(rest) + 1, raw)
                    sign = _signal(rest[2:].replace(" ", ""))
                cmds.append(Measure(v, _int(angle, n, raw), plane, sign))
            elif op in ("X", "Z", "S") and len(args) in (1, 2):
                dep = _signal(args[1]) if len(args) == 2 else frozenset()
                cmds.append({"X": CorrectX, "Z": CorrectZ, "S": Shift}[op](args[0], dep))
            else:
                raise ParseError(f"cannot read {line!r}", n, 1, raw)
        except PatternError as e:
            raise ParseError(str(e), n, 1, raw) from None
    return Pattern(tuple(cmds), tuple(inputs))


def format_command(c) -> str:
    match c:
        case Prepare(v):
            return f"N {v}"
        case Entangle(v, w):
            return f"E {v} {w}"
        case Measure(v, angle, plane, sign):
            tail = f" s: {_fmt_signal(sign)}" if sign else ""
            return f"M {v} {plane} {angle}{tail}"
        case CorrectX(v, dep):
            return f"X {v} {_fmt_signal(dep)}"
        case CorrectZ(v, dep):
            return f"Z {v} {_fmt_signal(dep)}"
        case Shift(v, dep):
            return f"S {v} {_fmt_signal(dep)}"
    raise TypeError(c)


def format_pattern(p: Pattern) -> str:
    lines = ["input " + " ".join(map(str, p.inputs)) if p.inputs else "input"]
    lines += [format_command(c) for c in p.commands]
    return "\n".join(lines) + "\n"


_ARITY = {"H": 1, "T": 1, "Tdg": 1, "CZ": 2, "ZZ": 2, KET: 1}


def parse_circuit(text: str) -> Circuit:
    qubits = None
    gates: list = []
    for n, line, raw in _lines(text):
        toks = line.split()
        op, args = toks[0], toks[1:]
        if op == "in":
            if qubits is not None or gates:
                raise ParseError("'in' header must come first and only once", n, 1, raw)
            qubits = args
        elif op == "J" and len(args) == 2:
            gates.append(Gate("J", (args[1],), _int(args[0], n, raw)))
        elif _ARITY.get(op) == len(args):
            if op in ("CZ", "ZZ") and args[0] == args[1]:
                raise ParseError(f"{op} on a single qubit", n, raw.rfind(args[1]) + 1, raw)
            gates.append(Gate(op, tuple(args)))
        else:
            raise ParseError(f"cannot read {line!r}", n, 1, raw)
    if qubits is None:
        qubits = list(dict.fromkeys(q for g in gates for q in g.qubits))
    extra = [q for g in gates for q in g.qubits if q not in qubits]
    return Circuit(tuple(qubits) + tuple(dict.fromkeys(extra)), tuple(gates))


def format_circuit(c: Circuit) -> str:
    lines = ["in " + " ".join(map(str, c.qubits))]
    for g in c.gates:
        if g.name == "J":
            lines.append(f"J {g.param} {g.qubits[0]}")
        elif g.name == "T" and g.param not in (None, 1):
            lines.extend([f"T {g.qubits[0]}"] * g.param if g.param > 0 else [f"Tdg {g.qubits[0]}"] * -g.param)
        else:
            lines.append(" ".join([g.name, *map(str, g.qubits)]))
    return "\n".join(lines) + "\n"


def expr_to_circuit(e: StableIndexExpr) -> Circuit:
    """Gate list of an expression, naming each wire after its first index."""
    f = successor_fn(e)
    wire = {}
    starts = list(e.free_in) + [t.advanced[0] for t in e.terms if t.gate == KET]
    for s in starts:
        x = s
        wire[x] = s
        while x in f:
            x = f[x]
            wire[x] = s
    gates = []
    for t in to_pattern_order(e):
        match t.gate:
            case "H":
                gates.append(Gate("H", (wire[t.deprecated[0]],)))
            case "J":
                gates.append(Gate("J", (wire[t.deprecated[0]],), t.param))
            case "T":
                gates.append(Gate("T", (wire[t.stable[0]],), t.param))
            case "CZ" | "ZZ":
                gates.append(Gate(t.gate, tuple(wire[x] for x in t.stable)))
            case "KET+":
                gates.append(Gate(KET, (wire[t.advanced[0]],)))
            case _:
                raise ValueError(f"{t.gate} has no circuit-file form")
    return Circuit(tuple(starts), tuple(gates))


def expr_to_json(e: StableIndexExpr) -> dict:
    return {
        "terms": [
            {
                "gate": t.gate,
                "param": t.param,
                "stable": list(t.stable),
                "deprecated": list(t.deprecated),
                "advanced": list(t.advanced),
            }
            for t in e.terms
        ],
        "free_in": list(e.free_in),
        "free_out": list(e.free_out),
    }
