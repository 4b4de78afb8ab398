"""GF(2) dependency algebra for patterns with a (modified) flow.

Matrices are indexed row = dependency source v, column = target w.  For a
successor function f the matrix F records X corrections that survive as
sign dependencies and T records the corrections that turn into signal
shifts.  The dependency set of target w is then (I - T)^{-1} F e_w.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from graphlib import TopologicalSorter

import numpy as np

from . import kernels
from .flow import FlowProblem, is_flow, preorder_edges
from .pattern_core import (
    CorrectX,
    CorrectZ,
    Entangle,
    Geometry,
    Measure,
    Pattern,
    PatternError,
    Prepare,
    geometry_of,
    is_pauli_x,
    is_pauli_y,
)
from .rewrite import is_normal


class NotNormalForm(PatternError):
    pass


class NotAFlow(ValueError):
    pass


class BadMediatorAngle(ValueError):
    pass


@dataclass(frozen=True)
class Gf2Matrix:
    """Square matrix over GF(2); row i is an int whose bit j is entry (i, j)."""

    labels: tuple
    rows: tuple

    @classmethod
    def from_pairs(cls, labels: Sequence, pairs) -> "Gf2Matrix":
        pos = {v: i for i, v in enumerate(labels)}
        rows = [0] * len(labels)
        for v, w in pairs:
            rows[pos[v]] ^= 1 << pos[w]
        return cls(tuple(labels), tuple(rows))

    @classmethod
    def identity(cls, labels: Sequence) -> "Gf2Matrix":
        return cls(tuple(labels), tuple(1 << i for i in range(len(labels))))

    @property
    def n(self) -> int:
        return len(self.labels)

    def __getitem__(self, vw) -> int:
        v, w = vw
        i, j = self.labels.index(v), self.labels.index(w)
        return (self.rows[i] >> j) & 1

    def __add__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        return Gf2Matrix(self.labels, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    __sub__ = __add__

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        out = []
        for r in self.rows:
            acc, j = 0, 0
            while r:
                if r & 1:
                    acc ^= other.rows[j]
                r >>= 1
                j += 1
            out.append(acc)
        return Gf2Matrix(self.labels, tuple(out))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def column(self, w) -> frozenset:
        j = self.labels.index(w)
        return frozenset(v for v, r in zip(self.labels, self.rows) if (r >> j) & 1)

    def pairs(self) -> set:
        return {(self.labels[i], self.labels[j]) for i, r in enumerate(self.rows) for j in range(self.n) if (r >> j) & 1}

    def dense(self) -> np.ndarray:
        return np.array([[(r >> j) & 1 for j in range(self.n)] for r in self.rows], dtype=np.uint8)

    def walk_sum(self) -> "Gf2Matrix":
        """I + A + A^2 + ... for nilpotent A."""
        acc = Gf2Matrix.identity(self.labels)
        power = self
        for _ in range(self.n):
            if power.is_zero():
                return acc
            acc = acc + power
            power = power @ self
        if not power.is_zero():
            raise ValueError("matrix is not nilpotent")
        return acc


def gf2_solve(a: Gf2Matrix, b: frozenset | Sequence) -> frozenset | None:
    """Some x with A x = b, as a set of labels; None if the system is inconsistent."""
    n = a.n
    pos = {v: i for i, v in enumerate(a.labels)}
    bset = {pos[v] for v in b}
    words = (n + 1 + 63) // 64
    aug = np.zeros((n, words), dtype=np.uint64)
    for i, r in enumerate(a.rows):
        r |= (1 << n) if i in bset else 0
        aug[i] = np.frombuffer(r.to_bytes(words * 8, "little"), dtype="<u8")
    x = kernels.gf2_solve_packed(aug, n)
    if x is None:
        return None
    return frozenset(a.labels[i] for i in np.flatnonzero(x))


@dataclass(frozen=True)
class DependencyMatrices:
    F: Gf2Matrix
    T: Gf2Matrix
    A_X: frozenset
    A_Y: frozenset


def _pauli_sets(angles: Mapping) -> tuple:
    ax = frozenset(v for v, (_, a) in angles.items() if is_pauli_x(a))
    ay = frozenset(v for v, (_, a) in angles.items() if is_pauli_y(a))
    return ax, ay


def dependency_pairs(g: Geometry, f: Mapping, angles: Mapping) -> tuple:
    ax, ay = _pauli_sets(angles)
    measured = set(g.measured)
    fpairs, tpairs = [], []
    for v in g.measured:
        w = f[v]
        if w not in ax and w not in ay:
            fpairs.append((v, w))
        if w != v and w in measured and w in ay:
            tpairs.append((v, w))
        tpairs.extend((v, z) for z in g.neighbours(w) if z != v)
    return fpairs, tpairs, ax, ay


def dependency_matrices(g: Geometry, f: Mapping, angles: Mapping) -> DependencyMatrices:
    fp, tp, ax, ay = dependency_pairs(g, f, angles)
    labels = tuple(g.vertices)
    return DependencyMatrices(Gf2Matrix.from_pairs(labels, fp), Gf2Matrix.from_pairs(labels, set(tp)), ax, ay)


@dataclass(frozen=True)
class DependencyReport:
    ok: bool
    qubit: object = None
    kind: str = ""

    def __bool__(self):
        return self.ok


def check_dependencies(p: Pattern, f: Mapping) -> DependencyReport:
    """Column-equation check of every sign and correction expression.

    Each expression d targeting w must satisfy (I - T) d = F e_w (signs and
    X corrections) or (I - T) d = T e_w (Z corrections).  Cost is linear in
    the total size of the expressions times the vertex degree.
    """
    if not is_normal(p):
        raise NotNormalForm("dependencies are checked on normal-form patterns")
    g, angles = geometry_of(p)
    if set(f) != set(g.measured):
        return DependencyReport(False, None, "flow-domain")
    fp, tp, _, _ = dependency_pairs(g, f, angles)
    labels = list(g.vertices)
    pos = {v: i for i, v in enumerate(labels)}
    n = len(labels)
    tp = sorted({(pos[v], pos[w]) for v, w in tp}, key=lambda t: (t[1], t[0]))
    ptr = np.zeros(n + 1, dtype=np.int64)
    for _, y in tp:
        ptr[y + 1] += 1
    ptr = np.cumsum(ptr)
    idx = np.array([x for x, _ in tp], dtype=np.int64)
    f_col = {pos[w]: [] for w in labels}
    for v, w in fp:
        f_col[pos[w]].append(pos[v])
    t_col = {pos[w]: [] for w in labels}
    for x, y in tp:
        t_col[y].append(x)

    def agrees(expr, target: list) -> bool:
        d = np.array(sorted(pos[q] for q in expr), dtype=np.int64)
        r = kernels.column_residual(d, ptr, idx, n)
        want = np.zeros(n, dtype=np.uint8)
        want[target] = 1
        return bool(np.array_equal(r, want))

    xs: dict = {}
    zs: dict = {}
    for c in p.commands:
        if isinstance(c, Measure):
            if not agrees(c.sign, f_col[pos[c.v]]):
                return DependencyReport(False, c.v, "sign")
        elif isinstance(c, CorrectX):
            xs[c.v] = xs.get(c.v, frozenset()) ^ c.dep
        elif isinstance(c, CorrectZ):
            zs[c.v] = zs.get(c.v, frozenset()) ^ c.dep
    for w in sorted(g.outputs, key=str):
        if not agrees(xs.get(w, frozenset()), f_col[pos[w]]):
            return DependencyReport(False, w, "X")
        if not agrees(zs.get(w, frozenset()), t_col[pos[w]]):
            return DependencyReport(False, w, "Z")
    return DependencyReport(True)


def test_dependencies(p: Pattern, f: Mapping) -> bool:
    return check_dependencies(p, f).ok


test_dependencies.__test__ = False  # not a pytest test


def measurement_order(g: Geometry, f: Mapping) -> list:
    """A linear extension of the natural pre-order, restricted to measured vertices."""
    succ = preorder_edges(g, f)
    preds = {v: set() for v in g.vertices}
    for v, ws in succ.items():
        for w in ws:
            preds[w].add(v)
    ts = TopologicalSorter(preds)
    ts.prepare()
    order = []
    while ts.is_active():
        ready = sorted(ts.get_ready(), key=str)
        order.extend(ready)
        ts.done(*ready)
    measured = set(g.measured)
    return [v for v in order if v in measured]


def predicted_normal_form(
    g: Geometry,
    f: Mapping,
    angles: Mapping,
    order: Sequence | None = None,
    inputs: Sequence | None = None,
) -> Pattern:
    """The normal-form pattern whose dependencies the flow (g, f) dictates."""
    mediators = frozenset(v for v, w in f.items() if v == w)
    if not is_flow(FlowProblem(g, mediators), f):
        raise NotAFlow("f is not a modified flow of the geometry")
    for v in mediators:
        if angles[v][1] != 2:
            raise BadMediatorAngle(f"fixed point {v} has angle {angles[v][1]}")
    fp, tp, _, _ = dependency_pairs(g, f, angles)
    order = list(order) if order is not None else measurement_order(g, f)
    t_in: dict = {}
    for x, y in set(tp):
        t_in.setdefault(y, []).append(x)
    rho: dict = {}

    def closure(u) -> frozenset:
        # rho(u) = {u} + sum of rho(x) over T[x, u] = 1; sources precede u in the order
        if u not in rho:
            acc = frozenset((u,))
            for x in t_in.get(u, ()):
                acc ^= closure(x)
            rho[u] = acc
        return rho[u]

    for v in order:
        closure(v)

    def resolve(sources) -> frozenset:
        acc = frozenset()
        for u in sources:
            acc ^= closure(u)
        return acc

    f_in: dict = {}
    for v, w in fp:
        f_in.setdefault(w, []).append(v)
    cmds = [Prepare(v) for v in sorted(set(g.vertices) - g.inputs, key=str)]
    cmds += [Entangle(a, b) for a, b in g.edge_list()]
    for v in order:
        plane, a = angles[v]
        cmds.append(Measure(v, a, plane, resolve(f_in.get(v, ()))))
    outs = sorted(g.outputs, key=str)
    for w in outs:
        d = resolve(f_in.get(w, ()))
        if d:
            cmds.append(CorrectX(w, d))
    for w in outs:
        d = resolve(t_in.get(w, ()))
        if d:
            cmds.append(CorrectZ(w, d))
    ins = tuple(inputs) if inputs is not None else tuple(sorted(g.inputs, key=str))
    return Pattern(tuple(cmds), ins)
