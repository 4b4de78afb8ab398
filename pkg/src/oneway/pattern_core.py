"""Measurement-calculus command language, geometries and their composition.

Patterns are stored in execution order: the first command in
``Pattern.commands`` is the first one applied.  Angles are integers counting
multiples of pi/4 ("eighths" of a full turn), kept canonical in -3..4.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Union

QubitId = str
Signal = frozenset  # parity of the outcomes of the qubits it contains

XY = "XY"
YZ = "YZ"


class PatternError(ValueError):
    """Raised when a pattern violates well-formedness."""


class NotComposable(ValueError):
    pass


def canon(eighths: int) -> int:
    """Reduce a multiple of pi/4 to the representative in -3..4."""
    return (eighths + 3) % 8 - 3


def radians(eighths: int) -> float:
    return eighths * math.pi / 4


def is_pauli_x(eighths: int) -> bool:
    return canon(eighths) in (0, 4)


def is_pauli_y(eighths: int) -> bool:
    return canon(eighths) in (2, -2)


def signal(qubits: Iterable[QubitId] = ()) -> frozenset:
    return frozenset(qubits)


@dataclass(frozen=True)
class Prepare:
    v: QubitId


@dataclass(frozen=True)
class Entangle:
    v: QubitId
    w: QubitId

    def __post_init__(self):
        if self.v == self.w:
            raise PatternError(f"entangling {self.v} with itself")


@dataclass(frozen=True)
class Measure:
    v: QubitId
    angle: int = 0
    plane: str = XY
    sign: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "angle", canon(self.angle))
        object.__setattr__(self, "sign", frozenset(self.sign))
        if self.plane not in (XY, YZ):
            raise PatternError(f"unsupported plane {self.plane}")


@dataclass(frozen=True)
class CorrectX:
    v: QubitId
    dep: frozenset

    def __post_init__(self):
        object.__setattr__(self, "dep", frozenset(self.dep))


@dataclass(frozen=True)
class CorrectZ:
    v: QubitId
    dep: frozenset

    def __post_init__(self):
        object.__setattr__(self, "dep", frozenset(self.dep))


@dataclass(frozen=True)
class Shift:
    v: QubitId
    dep: frozenset

    def __post_init__(self):
        object.__setattr__(self, "dep", frozenset(self.dep))


Command = Union[Prepare, Entangle, Measure, CorrectX, CorrectZ, Shift]


def qubits_of(cmd: Command) -> tuple:
    if isinstance(cmd, Entangle):
        return (cmd.v, cmd.w)
    return (cmd.v,)


def signals_of(cmd: Command) -> frozenset:
    if isinstance(cmd, Measure):
        return cmd.sign
    if isinstance(cmd, (CorrectX, CorrectZ, Shift)):
        return cmd.dep
    return frozenset()


@dataclass(frozen=True)
class Pattern:
    commands: tuple = ()
    inputs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "commands", tuple(self.commands))
        object.__setattr__(self, "inputs", tuple(self.inputs))

    def __iter__(self):
        return iter(self.commands)

    def __len__(self):
        return len(self.commands)

    @property
    def qubits(self) -> list:
        seen = dict.fromkeys(self.inputs)
        for cmd in self.commands:
            seen.update(dict.fromkeys(qubits_of(cmd)))
        return list(seen)

    @property
    def measured(self) -> list:
        return [c.v for c in self.commands if isinstance(c, Measure)]

    @property
    def outputs(self) -> list:
        gone = set(self.measured)
        return [q for q in self.qubits if q not in gone]


@dataclass(frozen=True)
class Violation:
    index: int
    kind: str
    message: str


@dataclass
class WellFormedReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_pattern(p: Pattern) -> WellFormedReport:
    report = WellFormedReport()

    def bad(i, kind, msg):
        report.violations.append(Violation(i, kind, msg))

    live = set(p.inputs)
    if len(live) != len(p.inputs):
        bad(-1, "DuplicatePrepare", "repeated input qubit")
    prepared = set()
    measured = set()
    referenced = set()
    for i, cmd in enumerate(p.commands):
        for q in signals_of(cmd):
            if q not in measured:
                bad(i, "ForwardSignalReference", f"signal of {q} read before its measurement")
        if isinstance(cmd, Shift):
            if cmd.v not in measured:
                bad(i, "ForwardSignalReference", f"shift of {cmd.v} before its measurement")
            elif cmd.v in referenced:
                bad(i, "LateShift", f"shift of {cmd.v} after its outcome was read")
            referenced.update(cmd.dep)
            continue
        referenced.update(signals_of(cmd))
        if isinstance(cmd, Prepare):
            if cmd.v in live or cmd.v in prepared or cmd.v in measured:
                bad(i, "DuplicatePrepare", f"{cmd.v} prepared twice")
            prepared.add(cmd.v)
            live.add(cmd.v)
            continue
        for q in qubits_of(cmd):
            if q in measured:
                bad(i, "UsedAfterMeasure", f"{q} used after measurement")
            elif q not in live:
                bad(i, "UsedBeforePrepare", f"{q} used before preparation")
        if isinstance(cmd, Measure):
            if cmd.v in measured:
                bad(i, "DuplicateMeasure", f"{cmd.v} measured twice")
            measured.add(cmd.v)
            live.discard(cmd.v)
    return report


def require_well_formed(p: Pattern) -> None:
    report = validate_pattern(p)
    if not report.ok:
        v = report.violations[0]
        raise PatternError(f"{v.kind} at command {v.index}: {v.message}")


@dataclass(frozen=True, eq=False)
class Geometry:
    """Open graph (G, I, O).  ``adj`` maps every vertex to its neighbours."""

    vertices: tuple
    edges: frozenset  # of frozenset pairs
    inputs: frozenset
    outputs: frozenset

    @classmethod
    def build(cls, vertices, edges, inputs, outputs) -> "Geometry":
        vs = tuple(dict.fromkeys(vertices))
        es = set()
        for v, w in edges:
            if v == w:
                raise ValueError(f"loop at {v}")
            es.add(frozenset((v, w)))
        vset = set(vs)
        for e in es:
            vset.update(e)
        vs = vs + tuple(sorted(vset - set(vs)))
        return cls(vs, frozenset(es), frozenset(inputs), frozenset(outputs))

    def __post_init__(self):
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            a, b = tuple(e)
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "_adj", adj)
        if not (self.inputs <= set(self.vertices) and self.outputs <= set(self.vertices)):
            raise ValueError("inputs and outputs must be vertices")

    def _key(self):
        return (frozenset(self.vertices), self.edges, self.inputs, self.outputs)

    def __eq__(self, other):
        return isinstance(other, Geometry) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def adj(self) -> Mapping:
        return self._adj

    def neighbours(self, v) -> set:
        return self._adj[v]

    @property
    def measured(self) -> list:
        return [v for v in self.vertices if v not in self.outputs]

    def edge_list(self) -> list:
        return sorted(tuple(sorted(e)) for e in self.edges)

    def to_json(self, angles: Mapping | None = None) -> dict:
        out = {
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edge_list()],
            "inputs": sorted(self.inputs),
            "outputs": sorted(self.outputs),
        }
        if angles is not None:
            out["angles"] = {v: {"plane": pl, "eighths": a} for v, (pl, a) in sorted(angles.items())}
        return out


def geometry_of(p: Pattern) -> tuple:
    """Return ``(geometry, angles)`` where angles maps measured qubits to (plane, eighths)."""
    require_well_formed(p)
    edges = set()
    angles = {}
    for cmd in p.commands:
        if isinstance(cmd, Entangle):
            edges ^= {frozenset((cmd.v, cmd.w))}
        elif isinstance(cmd, Measure):
            angles[cmd.v] = (cmd.plane, cmd.angle)
    prepared = {c.v for c in p.commands if isinstance(c, Prepare)}
    qs = p.qubits
    g = Geometry(
        tuple(qs),
        frozenset(edges),
        frozenset(q for q in qs if q not in prepared),
        frozenset(q for q in qs if q not in angles),
    )
    return g, angles


def compose_geometry(g2: Geometry, g1: Geometry) -> Geometry:
    """Geometry of running g1 first and then g2."""
    shared = set(g1.vertices) & set(g2.vertices)
    if not shared <= (g2.inputs & g1.outputs):
        raise NotComposable(f"shared vertices {sorted(shared - (g2.inputs & g1.outputs))} are not interface qubits")
    vs = tuple(dict.fromkeys(g1.vertices + g2.vertices))
    return Geometry(
        vs,
        g1.edges ^ g2.edges,
        g1.inputs | (g2.inputs - g1.outputs),
        g2.outputs | (g1.outputs - g2.inputs),
    )


def rename_command(cmd: Command, m: Mapping) -> Command:
    r = lambda q: m.get(q, q)  # noqa: E731
    rs = lambda s: frozenset(r(q) for q in s)  # noqa: E731
    if isinstance(cmd, Prepare):
        return Prepare(r(cmd.v))
    if isinstance(cmd, Entangle):
        return Entangle(r(cmd.v), r(cmd.w))
    if isinstance(cmd, Measure):
        return Measure(r(cmd.v), cmd.angle, cmd.plane, rs(cmd.sign))
    return type(cmd)(r(cmd.v), rs(cmd.dep))


def rename_pattern(p: Pattern, m: Mapping) -> Pattern:
    return Pattern(tuple(rename_command(c, m) for c in p.commands), tuple(m.get(q, q) for q in p.inputs))


def compose_pattern(p2: Pattern, p1: Pattern) -> Pattern:
    """Run p1 then p2.  Internal qubits of p2 clashing with p1 are renamed."""
    g1, _ = geometry_of(p1)
    g2, _ = geometry_of(p2)
    taken = set(g1.vertices) | set(g2.vertices)
    fresh = {}
    for q in g2.vertices:
        if q in g2.inputs or q not in g1.vertices:
            continue
        k = 1
        while f"{q}_{k}" in taken:
            k += 1
        fresh[q] = f"{q}_{k}"
        taken.add(fresh[q])
    if fresh:
        p2 = rename_pattern(p2, fresh)
        g2, _ = geometry_of(p2)
    compose_geometry(g2, g1)  # raises NotComposable
    inputs = list(p1.inputs) + [q for q in p2.inputs if q not in g1.outputs]
    return Pattern(p1.commands + p2.commands, tuple(inputs))
