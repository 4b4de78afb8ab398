"""Circuit to pattern constructions.

Both variants share one pipeline: bring the circuit to normal form, cut it
into J and two-qubit phase gates, lay it out as a stable-index expression and
map every term to its elementary pattern.  DKP uses CZ directly; the
simplified RBB variant uses ZZ with a fresh mediator qubit per gate and keeps
the expression on a grid.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .pattern_core import YZ, CorrectX, CorrectZ, Entangle, Measure, Pattern, Prepare, canon
from .rewrite import normalize, standardize
from .stable_index import (
    CZ,
    KET,
    ZZ,
    Circuit,
    Gate,
    NotNearestNeighbor,
    StableIndexExpr,
    UnknownGate,
    from_gates_free,
    from_gates_grid,
    to_pattern_order,
    wire_ends,
)

DKP = "DKP"
RBB = "RBB"


class UnsupportedTerm(ValueError):
    pass


@dataclass(frozen=True)
class ConstructionMode:
    variant: str = DKP
    normalize: bool = True

    def __post_init__(self):
        if self.variant not in (DKP, RBB):
            raise ValueError(f"unknown variant {self.variant}")


def _as_circuit(gates) -> Circuit:
    return gates if isinstance(gates, Circuit) else Circuit.of(gates)


def _t_run(q, r: int) -> list:
    r = canon(r)
    name = "T" if r > 0 else "Tdg"
    return [Gate(name, (q,))] * abs(r)


def circuit_normal_form(gates, mode: ConstructionMode = ConstructionMode()) -> Circuit:
    """Cancel CZ pairs and park T powers just before the next H on their wire.

    For RBB each surviving CZ becomes ZZ with T^-2 on both ends; a cancelled
    pair contributes no net phase.  The result is a product of two-qubit
    phase gates and T^r H blocks, plus terminal T^r runs.
    """
    c = _as_circuit(gates)
    pos = {q: i for i, q in enumerate(c.qubits)}
    rbb = mode.variant == RBB
    tcount = {q: 0 for q in c.qubits}
    partners = {q: set() for q in c.qubits}
    out: list = []

    def flush_cz(q):
        for r in sorted(partners[q], key=pos.get):
            a, b = sorted((q, r), key=pos.get)
            out.append(Gate(ZZ if rbb else CZ, (a, b)))
            partners[r].discard(q)
        partners[q].clear()

    for g in c.gates:
        match g.name:
            case "T" | "Tdg":
                (q,) = g.qubits
                tcount[q] += (g.param if g.param is not None else 1) if g.name == "T" else -1
            case "CZ":
                a, b = g.qubits
                if rbb and abs(pos[a] - pos[b]) != 1:
                    raise NotNearestNeighbor(f"CZ on {a},{b}")
                on = b not in partners[a]
                partners[a].symmetric_difference_update({b})
                partners[b].symmetric_difference_update({a})
                if rbb:
                    delta = -2 if on else 2
                    tcount[a] += delta
                    tcount[b] += delta
            case "H":
                (q,) = g.qubits
                flush_cz(q)
                out.extend(_t_run(q, tcount[q]))
                tcount[q] = 0
                out.append(g)
            case "KET+":
                out.append(g)
            case _:
                raise UnknownGate(g.name)
    for q in c.qubits:
        flush_cz(q)
    for q in c.qubits:
        out.extend(_t_run(q, tcount[q]))
    return Circuit(c.qubits, tuple(out))


def to_j_gates(c: Circuit) -> Circuit:
    """Fold each T^r H block into J(r); a terminal T^m becomes J(m) then J(0)."""
    out: list = []
    pending = {q: 0 for q in c.qubits}
    for g in c.gates:
        match g.name:
            case "T" | "Tdg":
                (q,) = g.qubits
                pending[q] += (g.param if g.param is not None else 1) if g.name == "T" else -1
            case "H":
                (q,) = g.qubits
                out.append(Gate("J", (q,), canon(pending[q])))
                pending[q] = 0
            case _:
                out.append(g)
    for q in c.qubits:
        if canon(pending[q]):
            out.append(Gate("J", (q,), canon(pending[q])))
            out.append(Gate("J", (q,), 0))
    return Circuit(c.qubits, tuple(out))


def mediator_name(a, b, k: int) -> str:
    return f"{a}~{b}~{k}"


def phi(e: StableIndexExpr, inputs: Sequence | None = None) -> Pattern:
    """Map each term to its elementary pattern, composing in term pre-order.

    H terms are accepted as J(0).
    """
    cmds: list = []
    for k, t in enumerate(to_pattern_order(e)):
        match t.gate:
            case "KET+":
                cmds.append(Prepare(t.advanced[0]))
            case "J" | "H":
                v, w = t.deprecated[0], t.advanced[0]
                theta = t.param if t.gate == "J" else 0
                cmds += [Prepare(w), Entangle(v, w), Measure(v, -theta), CorrectX(w, {v})]
            case "CZ":
                cmds.append(Entangle(*t.stable))
            case "ZZ" | "ZZZ":
                theta = 2 if t.gate == "ZZ" else t.param
                m = mediator_name(t.stable[0], t.stable[-1], k)
                plane = "XY" if theta == 2 else YZ
                cmds.append(Prepare(m))
                cmds += [Entangle(m, x) for x in t.stable]
                cmds.append(Measure(m, theta, plane))
                cmds += [CorrectZ(x, {m}) for x in t.stable]
            case _:
                raise UnsupportedTerm(t.gate)
    if inputs is None:
        inputs = sorted(e.free_in, key=str)
    return Pattern(tuple(cmds), tuple(inputs))


@dataclass(frozen=True)
class Construction:
    """A constructed pattern with the register alignment to its source circuit."""

    pattern: Pattern
    expr: StableIndexExpr
    inputs: tuple  # pattern input per circuit qubit (None for fresh qubits)
    outputs: tuple  # pattern output per circuit qubit


def build(gates, mode: ConstructionMode = ConstructionMode()) -> Construction:
    c = _as_circuit(gates)
    jc = to_j_gates(circuit_normal_form(c, mode))
    if mode.variant == DKP:
        e = from_gates_free(jc.gates)
    else:
        e, _ = from_gates_grid(jc.gates, c.qubits)
    fresh = {g.qubits[0] for g in c.gates if g.name == KET}
    starts = [None if q in fresh else f"{q}.0" for q in c.qubits]
    p = phi(e, [s for s in starts if s is not None])
    p = normalize(p) if mode.normalize else standardize(p)
    ends = wire_ends(e)
    outs = tuple(ends.get(f"{q}.0", f"{q}.0") for q in c.qubits)
    return Construction(p, e, tuple(starts), outs)


def construct(gates, mode: ConstructionMode = ConstructionMode()) -> Pattern:
    return build(gates, mode).pattern
