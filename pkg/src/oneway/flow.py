"""Modified and extended flows found by star decomposition.

A flow problem carries two sets of measured vertices: those that may take a
neighbour as successor (``m_xy``) and those that may be fixed points of the
successor function (``m_yz``).  An ordinary modified-flow problem with
mediator candidates M uses ``m_xy`` = all measured vertices, ``m_yz`` = M.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

import networkx as nx

from .pattern_core import Geometry


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class FlowProblem:
    geometry: Geometry
    m: frozenset = frozenset()
    m_xy: frozenset | None = None
    m_yz: frozenset | None = None

    @property
    def extended(self) -> bool:
        return self.m_xy is not None or self.m_yz is not None

    @property
    def may_move(self) -> frozenset:
        if self.m_xy is None:
            return frozenset(self.geometry.measured)
        return frozenset(self.m_xy)

    @property
    def may_fix(self) -> frozenset:
        """Fixed points must lie outside I, like every other successor."""
        fix = self.m_yz if self.m_yz is not None else self.m
        return frozenset(fix) - self.geometry.inputs


@dataclass(frozen=True)
class ModifiedFlow:
    f: Mapping
    order: tuple  # roots in execution order, earliest measured first
    layers: Mapping = field(default_factory=dict)  # vertex -> peel layer, 0 = last measured

    @property
    def mediators(self) -> list:
        return [v for v in self.order if self.f[v] == v]


def _sort_key(v):
    return str(v)


def _star_decomp(p: FlowProblem) -> ModifiedFlow | None:
    g = p.geometry
    out_set = g.outputs
    fixable = p.may_fix
    movable = p.may_move
    outs = {v: set() for v in g.vertices}
    ins = {v: set() for v in g.vertices}
    for v in g.vertices:
        for w in g.neighbours(v):
            if w not in out_set:
                outs[v].add(w)
                ins[w].add(v)

    f: dict = {}
    layer_of: dict = {}
    rev_order: list = []
    unresolved = {v for v in g.vertices if v not in out_set}
    frontier = {v for v in out_set if v not in g.inputs}
    frontier |= {v for v in unresolved if v in fixable and not outs[v]}
    layer = 0

    while True:
        nxt: dict = {}
        progressed = False

        def remove(v, w):
            nonlocal progressed
            progressed = True
            unresolved.discard(v)
            f[v] = w
            layer_of[v] = layer
            rev_order.append(v)
            for z in ins[v]:
                outs[z].discard(v)
                if z in fixable and z in unresolved and not outs[z]:
                    nxt[z] = None
            ins[v] = set()

        for w in sorted(frontier, key=_sort_key):
            if w in unresolved:
                if w in fixable and not outs[w]:
                    remove(w, w)
                else:
                    nxt[w] = None
                continue
            if w in f and f[w] == w:
                continue
            if len(outs[w]) == 1:
                (v,) = outs[w]
                if v in movable:
                    remove(v, w)
                    if v not in g.inputs:
                        nxt[v] = None
                    continue
            nxt[w] = None
        frontier = set(nxt)
        layer += 1
        if not progressed:
            break

    if unresolved:
        return None
    return ModifiedFlow(f, tuple(reversed(rev_order)), layer_of)


def find_mod_star_decomp(p: FlowProblem) -> ModifiedFlow | None:
    """Greedy backward peeling of star geometries; None when no flow exists."""
    return _star_decomp(FlowProblem(p.geometry, p.m, None, frozenset(p.m)))


def find_extended_star_decomp(p: FlowProblem) -> ModifiedFlow | None:
    if p.m_xy is None or p.m_yz is None:
        raise ValueError("extended mode needs m_xy and m_yz")
    if set(p.geometry.measured) - (set(p.m_xy) | set(p.m_yz)):
        return None
    return _star_decomp(p)


def preorder_edges(g: Geometry, f: Mapping) -> dict:
    """Strict predecessor-to-successor arcs generating the natural pre-order."""
    succ = {v: set() for v in g.vertices}
    for v, fv in f.items():
        if fv != v:
            succ[v].add(fv)
        for w in g.neighbours(fv):
            if w != v:
                succ[v].add(w)
    return succ


def _acyclic(succ: Mapping) -> bool:
    ts = TopologicalSorter({v: ws for v, ws in succ.items()})
    try:
        ts.prepare()
    except CycleError:
        return False
    return True


def natural_preorder(g: Geometry, f: Mapping) -> nx.DiGraph | None:
    """Transitive closure of the natural pre-order, or None if it is not antisymmetric."""
    succ = preorder_edges(g, f)
    if not _acyclic(succ):
        return None
    d = nx.DiGraph()
    d.add_nodes_from(g.vertices)
    d.add_edges_from((v, w) for v, ws in succ.items() for w in ws)
    return nx.transitive_closure_dag(d)


def is_flow(p: FlowProblem, f: Mapping) -> bool:
    g = p.geometry
    if set(f) != set(g.measured):
        return False
    targets = list(f.values())
    if len(set(targets)) != len(targets):
        return False
    for v, w in f.items():
        if w == v:
            if v not in p.may_fix:
                return False
        elif w in g.inputs or w not in g.neighbours(v) or v not in p.may_move:
            return False
    return _acyclic(preorder_edges(g, f))


def order_respects_flow(g: Geometry, flow: ModifiedFlow) -> bool:
    """Replay check: each root precedes its centre and the centre's other neighbours."""
    pos = {v: i for i, v in enumerate(flow.order)}
    if set(pos) != set(g.measured):
        return False
    for v, ws in preorder_edges(g, flow.f).items():
        for w in ws:
            if w in pos and pos[w] <= pos[v]:
                return False
    return True


def residual_inputs(g: Geometry, f: Mapping) -> set:
    """Vertices outside the image of f: the inputs of the leftover circuit block."""
    return set(g.vertices) - set(f.values())


def edge_bound_ok(n: int, k: int, m: int) -> bool:
    return m <= n * k - k * (k + 1) // 2


def brute_force_flows(p: FlowProblem, limit: int = 10) -> list:
    """Every successor function that is a flow for ``p``, by exhaustive search."""
    g = p.geometry
    if len(g.vertices) > limit:
        raise TooLarge(len(g.vertices))
    measured = sorted(g.measured, key=_sort_key)
    options = []
    for v in measured:
        opts = []
        if v in p.may_move:
            opts += sorted((w for w in g.neighbours(v) if w not in g.inputs), key=_sort_key)
        if v in p.may_fix:
            opts.append(v)
        options.append(opts)
    found = []

    def go(i, f, used):
        if i == len(measured):
            if _acyclic(preorder_edges(g, f)):
                found.append(dict(f))
            return
        v = measured[i]
        for w in options[i]:
            if w in used:
                continue
            f[v] = w
            used.add(w)
            go(i + 1, f, used)
            used.discard(w)
            del f[v]

    go(0, {}, set())
    return found


def problem_from(geometry: Geometry, m: Iterable = ()) -> FlowProblem:
    return FlowProblem(geometry, frozenset(m))
