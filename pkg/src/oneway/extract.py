"""Patterns back to circuits: candidate circuits, identity cleanup, semantic map."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations

from .deps import check_dependencies
from .flow import FlowProblem, ModifiedFlow, edge_bound_ok, find_mod_star_decomp
from .pattern_core import XY, Geometry, Pattern, canon, geometry_of
from .rewrite import is_normal, normalize
from .stable_index import (
    H,
    T,
    StableIndexExpr,
    Term,
    cz_term,
    h_term,
    ket_term,
    merge_phases,
    t_term,
    to_htcz,
)


class InvalidDecomposition(ValueError):
    pass


def t_powers(angles: Mapping) -> dict:
    """t(u) = -4 theta_u / pi, in units of T."""
    return {u: canon(-a) for u, (_, a) in angles.items()}


def build_circuit(g: Geometry, f: Mapping, order: Sequence, t: Mapping) -> StableIndexExpr:
    """Candidate circuit of a star decomposition.

    Every root u with f(u) != u contributes T^t(u) on u followed by H[:f(u)/u].
    A fixed point a contributes the expansion of its multi-qubit phase gate:
    CZ on every pair of neighbours and T^2 on each neighbour.  Each remaining
    edge becomes one CZ, and the vertices outside the image of f that are not
    inputs are fresh |+> preparations.
    """
    if set(order) != set(g.measured) or len(order) != len(g.measured):
        raise InvalidDecomposition("root order must list each measured vertex once")
    mediators = {v for v in order if f[v] == v}
    terms: list[Term] = []
    for u in order:
        w = f[u]
        if w == u:
            nbrs = sorted(g.neighbours(u), key=str)
            if any(x in mediators for x in nbrs):
                raise InvalidDecomposition(f"fixed points {u} and a neighbour are adjacent")
            terms += [cz_term(a, b) for a, b in combinations(nbrs, 2)]
            terms += [t_term(2, x) for x in nbrs]
            continue
        if w not in g.neighbours(u):
            raise InvalidDecomposition(f"{u} -> {w} is not an edge")
        if t[u]:
            terms.append(t_term(t[u], u))
        terms.append(h_term(u, w))
    for a, b in g.edge_list():
        if f.get(a) == b or f.get(b) == a or a in mediators or b in mediators:
            continue
        terms.append(cz_term(a, b))
    image = set(f.values())
    for v in g.vertices:
        if v not in image and v not in g.inputs:
            terms.append(ket_term(v))
    return StableIndexExpr(terms)


def _find(parent: dict, x):
    while parent.get(x, x) != x:
        parent[x] = parent.get(parent[x], parent[x])
        x = parent[x]
    return x


def remove_idops_with_map(e: StableIndexExpr) -> tuple:
    """``remove_idops`` plus the index unification it performed (old -> kept)."""
    e = merge_phases(to_htcz(e))
    parent: dict = {}
    while True:
        dep_of, adv_of, stab = {}, {}, {}
        for i, t in enumerate(e.terms):
            for x in t.deprecated:
                dep_of[x] = i
            for x in t.advanced:
                adv_of[x] = i
            for x in t.stable:
                stab.setdefault(x, []).append(i)
        used: set = set()
        drop: set = set()
        extra: list = []
        rename: dict = {}

        def lone_phase(x):
            s = stab.get(x, [])
            if len(s) == 1 and e.terms[s[0]].gate == T and e.terms[s[0]].param in (2, -2):
                return s[0]
            return None

        def next_h(x):
            j = dep_of.get(x)
            return j if j is not None and e.terms[j].gate == H else None

        for i, t in enumerate(e.terms):
            if t.gate != H or i in used:
                continue
            a0, a1 = t.deprecated[0], t.advanced[0]
            j = next_h(a1)
            if j is None or j in used:
                continue
            if not stab.get(a1):
                a2 = e.terms[j].advanced[0]
                used.update((i, j))
                drop.update((i, j))
                rename[a2] = a0
                continue
            p1 = lone_phase(a1)
            a2 = e.terms[j].advanced[0]
            k = next_h(a2)
            p2 = lone_phase(a2)
            if p1 is None or p2 is None or k is None or k in used:
                continue
            s = e.terms[p1].param
            if e.terms[p2].param != s:
                continue
            block = (i, p1, j, p2, k)
            used.update(block)
            drop.update(block)
            extra.append(t_term(-s, a0))
            rename[e.terms[k].advanced[0]] = a0
        if not drop:
            break
        for old, new in rename.items():
            parent[old] = new
        # chains of removals in one sweep: resolve renames transitively
        m = {x: _find(rename, x) for x in rename}
        kept = [t.renamed(m) for i, t in enumerate(e.terms) if i not in drop]
        kept += [t.renamed(m) for t in extra]
        e = merge_phases(StableIndexExpr(kept))
    return e, {x: _find(parent, x) for x in parent}


def remove_idops(e: StableIndexExpr) -> StableIndexExpr:
    return remove_idops_with_map(e)[0]


@dataclass
class SemanticResult:
    expr: StableIndexExpr | None
    reason: str | None = None
    detail: str | None = None
    normalized_input: bool = False
    flow: ModifiedFlow | None = None
    pattern: Pattern | None = None
    renamed: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.expr is not None

    def index_of(self, qubit):
        """Index of the extracted circuit standing for a pattern qubit."""
        return self.renamed.get(qubit, qubit)


def semantic_report(p: Pattern) -> SemanticResult:
    normalized = False
    if not is_normal(p):
        p = normalize(p)
        normalized = True
    g, angles = geometry_of(p)
    res = SemanticResult(None, normalized_input=normalized, pattern=p)
    k = len(g.inputs)
    if k != len(g.outputs):
        res.reason = "io-mismatch"
        return res
    if not edge_bound_ok(len(g.vertices), k, len(g.edges)):
        # too many edges for any flow; the search is skipped
        res.reason, res.detail = "no-flow", "edge-bound"
        return res
    if any(plane != XY for plane, _ in angles.values()):
        res.reason = "unsupported-plane"
        return res
    m = frozenset(v for v, (_, a) in angles.items() if a == 2)
    flow = find_mod_star_decomp(FlowProblem(g, m))
    if flow is None:
        res.reason, res.detail = "no-flow", "star-decomposition"
        return res
    res.flow = flow
    report = check_dependencies(p, flow.f)
    if not report:
        res.reason, res.detail = "dependencies", f"{report.kind} at {report.qubit}"
        return res
    expr = build_circuit(g, flow.f, flow.order, t_powers(angles))
    res.expr, res.renamed = remove_idops_with_map(expr)
    return res


def semantic(p: Pattern) -> StableIndexExpr | None:
    return semantic_report(p).expr
