"""Named fixture patterns and circuits.

The same objects are shipped as text files under ``fixtures/``; tests check
that the files and these builders agree.
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

from .deps import predicted_normal_form
from .flow import FlowProblem, find_mod_star_decomp
from .pattern_core import (
    YZ,
    CorrectX,
    CorrectZ,
    Entangle,
    Geometry,
    Measure,
    Pattern,
    Prepare,
    geometry_of,
)
from .stable_index import Circuit, Gate, from_gates_free

FIXTURE_DIR = Path(__file__).with_name("fixtures")


def fj(theta: int, v="v", w="w") -> Pattern:
    return Pattern((Prepare(w), Entangle(v, w), Measure(v, -theta), CorrectX(w, {v})), (v,))


def fzz(a="a", v="v", w="w") -> Pattern:
    cmds = (Prepare(a), Entangle(a, v), Entangle(a, w), Measure(a, 2), CorrectZ(v, {a}), CorrectZ(w, {a}))
    return Pattern(cmds, (v, w))


def fzzz(d: int, theta: int, a="a") -> Pattern:
    """Multi-qubit phase exp(-i theta Z..Z / 2) through one mediator measured in the YZ plane."""
    qs = [f"q{i}" for i in range(d)]
    cmds = [Prepare(a), *(Entangle(a, q) for q in qs), Measure(a, theta, YZ)]
    cmds += [CorrectZ(q, {a}) for q in qs]
    return Pattern(tuple(cmds), tuple(qs))


def chain(t1: int = 1, t2: int = 1) -> Pattern:
    """Normal form of J(t2) after J(t1) on one wire v -> w -> x."""
    cmds = (
        Prepare("w"),
        Prepare("x"),
        Entangle("v", "w"),
        Entangle("w", "x"),
        Measure("v", -t1),
        Measure("w", -t2, sign={"v"}),
        CorrectX("x", {"w"}),
        CorrectZ("x", {"v"}),
    )
    return Pattern(cmds, ("v",))


def k2() -> Pattern:
    return Pattern((Prepare("v"), Prepare("w"), Entangle("v", "w"), Measure("v", 0), Measure("w", 0)), ())


EXTREMAL_EDGES = [("a", "b"), ("a", "e"), ("b", "c"), ("b", "d"), ("b", "e"), ("c", "d"), ("d", "e")]


def extremal() -> Pattern:
    """n = 5, k = 2, m = 7 = nk - k(k+1)/2: saturates the edge bound and has a flow."""
    g = Geometry.build("abcde", EXTREMAL_EDGES, {"a", "b"}, {"b", "c"})
    angles = {v: ("XY", 1) for v in g.measured}
    flow = find_mod_star_decomp(FlowProblem(g))
    return predicted_normal_form(g, flow.f, angles, flow.order, ("a", "b"))


# Reversal of four logical rows through three auxiliary rows.  Row r of the
# output carries the parity of these input rows.
REVERSAL_MAP = ((6,), (4, 5, 6), (4,), (2, 3, 4), (2,), (0, 1, 2), (0,))


def lnn_cnot_synthesis(rows: Sequence[int], n: int) -> list:
    """Nearest-neighbour CNOTs (control, target) realising x -> A x over GF(2).

    ``rows[i]`` is the bitmask of inputs XORed into output i.  Gaussian
    elimination restricted to adjacent row operations; the operations are
    returned in circuit order.
    """
    a = list(rows)
    ops = []

    def add(i, j):
        a[i] ^= a[j]
        ops.append((j, i))

    for c in range(n):
        bit = 1 << c
        low = max(i for i in range(c, n) if a[i] & bit)
        for k in range(low - 1, c - 1, -1):
            if not a[k] & bit:
                add(k, k + 1)
        last = max(i for i in range(c, n) if a[i] & bit)
        for k in range(c + 1, last + 1):
            if not a[k] & bit:
                add(k, k - 1)
        for k in range(last, c, -1):
            add(k, k - 1)
    for c in range(n - 1, 0, -1):
        bit = 1 << c
        hits = [i for i in range(c) if a[i] & bit]
        if not hits:
            continue
        first = hits[0]
        for k in range(c - 1, first - 1, -1):
            if not a[k] & bit:
                add(k, k + 1)
        for k in range(first, c):
            add(k, k + 1)
    assert a == [1 << i for i in range(n)]
    return ops[::-1]


def reversal_circuit() -> Circuit:
    rows = [sum(1 << j for j in r) for r in REVERSAL_MAP]
    qs = [f"r{i}" for i in range(7)]
    gates = []
    for c, t in lnn_cnot_synthesis(rows, 7):
        gates += [Gate("H", (qs[t],)), Gate("CZ", (qs[c], qs[t])), Gate("H", (qs[t],))]
    return Circuit(tuple(qs), tuple(gates))


def _reversal_geometry() -> tuple:
    e = from_gates_free(reversal_circuit().gates)
    g = Geometry.build(
        sorted(e.indices),
        [tuple(t.deprecated + t.advanced) if t.gate == "H" else tuple(t.stable) for t in e.terms],
        set(),
        set(),
    )
    ends = {}
    for x in e.free_out:
        ends[x.split(".")[0]] = x
    starts = [f"r{i}.0" for i in range(7)]
    finals = [ends[f"r{i}"] for i in range(7)]
    return g, starts, finals


def reversal(augmented: bool = False) -> Pattern:
    """Reversal geometry with every measurement at angle 0.

    The plain version has the even rows as its only inputs and outputs and no
    corrections.  The augmented version makes every row an input and an
    output and carries the corrections dictated by its flow.
    """
    g, starts, finals = _reversal_geometry()
    pick = range(7) if augmented else range(0, 7, 2)
    ins = [starts[i] for i in pick]
    outs = [finals[i] for i in pick]
    geo = Geometry(g.vertices, g.edges, frozenset(ins), frozenset(outs))
    angles = {v: ("XY", 0) for v in geo.measured}
    if augmented:
        flow = find_mod_star_decomp(FlowProblem(geo))
        return predicted_normal_form(geo, flow.f, angles, flow.order, ins)
    cmds = [Prepare(v) for v in sorted(set(geo.vertices) - set(ins))]
    cmds += [Entangle(a, b) for a, b in geo.edge_list()]
    cmds += [Measure(v, 0) for v in sorted(geo.measured)]
    return Pattern(tuple(cmds), tuple(ins))


def h_then_t() -> Circuit:
    return Circuit(("a",), (Gate("H", ("a",)), Gate("T", ("a",))))


def ghz_like() -> Circuit:
    gates = [Gate("H", ("a",)), Gate("CZ", ("a", "b")), Gate("H", ("b",)), Gate("T", ("b",)), Gate("CZ", ("b", "c")), Gate("H", ("c",))]
    return Circuit(("a", "b", "c"), tuple(gates))


def patterns() -> dict:
    return {
        "fJ": fj(1),
        "fZz": fzz(),
        "fZzz3": fzzz(3, 2),
        "chain": chain(),
        "k2": k2(),
        "extremal": extremal(),
        "reversal": reversal(),
        "reversal_augmented": reversal(True),
    }


def circuits() -> dict:
    return {"h_t": h_then_t(), "ghz_like": ghz_like(), "reversal": reversal_circuit()}


def write_fixtures(directory: Path = FIXTURE_DIR) -> None:
    from .formats import format_circuit, format_pattern

    directory.mkdir(parents=True, exist_ok=True)
    for name, p in patterns().items():
        (directory / f"{name}.mcal").write_text(format_pattern(p))
    for name, c in circuits().items():
        (directory / f"{name}.qc").write_text(format_circuit(c))


def geometry(name: str):
    return geometry_of(patterns()[name])
