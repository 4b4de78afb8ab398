"""Stable-index tensor expressions: the circuit IR.

A term carries three index lists.  Stable indices are wire segments whose
computational basis the gate preserves; a deprecated index is consumed and
the matching advanced index is produced.  ``None`` is a placeholder for a
missing partner (fresh preparations and projections).

Indices built from gate lists are named ``"<qubit>.<generation>"``.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations

import networkx as nx
from networkx.algorithms import isomorphism as nxiso

from .pattern_core import canon

H, T, J, CZ, ZZ, ZZZ, KET, PROJ = "H", "T", "J", "CZ", "ZZ", "ZZZ", "KET+", "PROJ"
SYMMETRIC = {CZ, ZZ, ZZZ}
DIAGONAL = {T, CZ, ZZ, ZZZ}


class UnknownGate(ValueError):
    pass


class NotNearestNeighbor(ValueError):
    pass


class CyclicExpression(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """One gate of a circuit in execution order."""

    name: str
    qubits: tuple
    param: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))


@dataclass(frozen=True)
class Circuit:
    qubits: tuple
    gates: tuple

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "gates", tuple(self.gates))

    @classmethod
    def of(cls, gates: Iterable[Gate], qubits: Sequence | None = None) -> "Circuit":
        gates = tuple(gates)
        if qubits is None:
            qubits = list(dict.fromkeys(q for g in gates for q in g.qubits))
        return cls(tuple(qubits), gates)


def index_name(qubit, generation: int) -> str:
    return f"{qubit}.{generation}"


def index_key(x) -> tuple:
    """Sort key (qubit, generation) for index names of the ``q.j`` form."""
    head, _, tail = str(x).rpartition(".")
    if head and tail.isdigit():
        return (head, int(tail))
    return (str(x), -1)


@dataclass(frozen=True)
class Term:
    gate: str
    param: int | None = None
    stable: tuple = ()
    deprecated: tuple = ()
    advanced: tuple = ()

    def __post_init__(self):
        for name in ("stable", "deprecated", "advanced"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.gate == T or self.gate == ZZZ or self.gate == J:
            object.__setattr__(self, "param", canon(self.param))

    @property
    def indices(self) -> tuple:
        return tuple(x for x in self.stable + self.deprecated + self.advanced if x is not None)

    def renamed(self, m: Mapping) -> "Term":
        r = lambda xs: tuple(m.get(x, x) if x is not None else None for x in xs)  # noqa: E731
        return Term(self.gate, self.param, r(self.stable), r(self.deprecated), r(self.advanced))

    def __str__(self):
        name = self.gate if self.param is None else f"{self.gate}({self.param})"
        fmt = lambda xs: ",".join("-" if x is None else str(x) for x in xs)  # noqa: E731
        moving = f"{fmt(self.advanced)}/{fmt(self.deprecated)}" if self.deprecated or self.advanced else ""
        return f"{name}[{fmt(self.stable)}:{moving}]"


def h_term(dep, adv) -> Term:
    return Term(H, None, (), (dep,), (adv,))


def j_term(eighths, dep, adv) -> Term:
    return Term(J, eighths, (), (dep,), (adv,))


def t_term(k, x) -> Term:
    return Term(T, k, (x,))


def cz_term(a, b) -> Term:
    return Term(CZ, None, (a, b))


def zz_term(a, b) -> Term:
    return Term(ZZ, None, (a, b))


def zzz_term(eighths, xs) -> Term:
    return Term(ZZZ, eighths, tuple(xs))


def ket_term(adv) -> Term:
    return Term(KET, None, (), (None,), (adv,))


def proj_term(dep) -> Term:
    return Term(PROJ, None, (), (dep,), (None,))


@dataclass(frozen=True)
class StableIndexExpr:
    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        adv, dep = Counter(), Counter()
        for t in self.terms:
            adv.update(x for x in t.advanced if x is not None)
            dep.update(x for x in t.deprecated if x is not None)
        for c, role in ((adv, "advanced"), (dep, "deprecated")):
            twice = [x for x, n in c.items() if n > 1]
            if twice:
                raise ValueError(f"indices {twice} {role} more than once")

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def indices(self) -> list:
        return list(dict.fromkeys(x for t in self.terms for x in t.indices))

    @property
    def free_in(self) -> list:
        adv = {x for t in self.terms for x in t.advanced}
        return [x for x in self.indices if x not in adv]

    @property
    def free_out(self) -> list:
        dep = {x for t in self.terms for x in t.deprecated}
        return [x for x in self.indices if x not in dep]

    def renamed(self, m: Mapping) -> "StableIndexExpr":
        return StableIndexExpr(t.renamed(m) for t in self.terms)

    def __str__(self):
        return " ".join(str(t) for t in self.terms)


def from_gates_free(gates: Iterable[Gate]) -> StableIndexExpr:
    """Transliterate a gate list, allocating ``q.j`` indices as wires advance."""
    gen: dict = {}
    terms = []

    def cur(q):
        gen.setdefault(q, 0)
        return index_name(q, gen[q])

    def advance(q):
        old = cur(q)
        gen[q] += 1
        return old, index_name(q, gen[q])

    for g in gates:
        name = g.name
        if name == KET:
            (q,) = g.qubits
            if q in gen:
                raise ValueError(f"fresh qubit {q} already in use")
            terms.append(ket_term(cur(q)))
        elif name == "H":
            terms.append(h_term(*advance(g.qubits[0])))
        elif name == J:
            terms.append(j_term(g.param, *advance(g.qubits[0])))
        elif name == "T":
            terms.append(t_term(1 if g.param is None else g.param, cur(g.qubits[0])))
        elif name == "Tdg":
            terms.append(t_term(-1, cur(g.qubits[0])))
        elif name in (CZ, ZZ):
            a, b = g.qubits
            terms.append(Term(name, None, (cur(a), cur(b))))
        else:
            raise UnknownGate(name)
    return StableIndexExpr(terms)


def from_gates_grid(gates: Iterable[Gate], qubits: Sequence) -> tuple:
    """Grid-constrained construction for nearest-neighbour circuits over {J, ZZ}.

    Two-qubit terms only join indices of equal depth, never on a pair whose
    previous-depth indices already interact.  Padding blocks J(0)J(0) and
    J(pi/2)^3 are inserted to equalise depths.  Returns (expression, graph).
    """
    pos = {q: i for i, q in enumerate(qubits)}
    depth = {q: 0 for q in qubits}
    graph = nx.Graph()
    graph.add_nodes_from(index_name(q, 0) for q in qubits)
    terms = []

    def push_j(q, eighths):
        old = index_name(q, depth[q])
        depth[q] += 1
        new = index_name(q, depth[q])
        terms.append(j_term(eighths, old, new))
        graph.add_edge(old, new)

    def pad(q, n):
        for _ in range(n):
            push_j(q, 2 if n == 3 else 0)

    for g in gates:
        if g.name == J:
            push_j(g.qubits[0], g.param)
            continue
        if g.name != ZZ:
            raise UnknownGate(g.name)
        v, w = g.qubits
        if abs(pos[v] - pos[w]) != 1:
            raise NotNearestNeighbor(f"ZZ on {v},{w}")
        j, k = depth[v], depth[w]
        if j == k and (
            graph.has_edge(index_name(v, j - 1), index_name(w, j - 1))
            or graph.has_edge(index_name(v, j), index_name(w, j))
        ):
            pad(v, 2)
            pad(w, 2)
        while depth[v] != depth[w]:
            lo = v if depth[v] < depth[w] else w
            gap = abs(depth[v] - depth[w])
            pad(lo, 3 if gap in (1, 3) else 2)
        a, b = index_name(v, depth[v]), index_name(w, depth[w])
        terms.append(zz_term(a, b))
        graph.add_edge(a, b)
    return StableIndexExpr(terms), graph


def successor_fn(e: StableIndexExpr) -> dict:
    f = {}
    for t in e.terms:
        if len(t.deprecated) == 1 and len(t.advanced) == 1 and None not in t.deprecated + t.advanced:
            f[t.deprecated[0]] = t.advanced[0]
    return f


def wire_ends(e: StableIndexExpr) -> dict:
    """Map each wire start (free input or fresh preparation) to its final index."""
    f = successor_fn(e)
    starts = list(e.free_in) + [t.advanced[0] for t in e.terms if t.gate == KET]
    ends = {}
    for x in starts:
        y = x
        while y in f:
            y = f[y]
        ends[x] = y
    return ends


def interaction_graph(e: StableIndexExpr) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(e.indices)
    for t in e.terms:
        if t.gate in (H, J):
            g.add_edge(t.deprecated[0], t.advanced[0])
        elif t.gate in SYMMETRIC:
            g.add_edges_from(combinations(t.stable, 2))
    return g


def _precedence(e: StableIndexExpr) -> list:
    """Successor lists of the term pre-order (indices into ``e.terms``)."""
    adv, dep, stab = {}, {}, defaultdict(list)
    for i, t in enumerate(e.terms):
        for x in t.advanced:
            if x is not None:
                adv[x] = i
        for x in t.deprecated:
            if x is not None:
                dep[x] = i
        for x in t.stable:
            stab[x].append(i)
    succ = [set() for _ in e.terms]
    for x in e.indices:
        a, d, ss = adv.get(x), dep.get(x), stab.get(x, ())
        if a is not None:
            succ[a].update(ss)
            if d is not None:
                succ[a].add(d)
        if d is not None:
            for s in ss:
                succ[s].add(d)
    for i, s in enumerate(succ):
        s.discard(i)
    return succ


def _term_key(t: Term, i: int) -> tuple:
    first = min((index_key(x) for x in t.indices), default=("", -1))
    return (first, t.gate, i)


def to_pattern_order(e: StableIndexExpr) -> list:
    """A deterministic linear extension of the term pre-order."""
    succ = _precedence(e)
    indeg = [0] * len(succ)
    for s in succ:
        for j in s:
            indeg[j] += 1
    heap = [(_term_key(t, i), i) for i, t in enumerate(e.terms) if indeg[i] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, i = heapq.heappop(heap)
        out.append(e.terms[i])
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, (_term_key(e.terms[j], j), j))
    if len(out) != len(e.terms):
        raise CyclicExpression("term pre-order has a cycle")
    return out


def depth(e: StableIndexExpr) -> int:
    """Length of the longest chain of terms under the pre-order."""
    succ = _precedence(e)
    order = to_pattern_order(e)
    pos = {id(t): i for i, t in enumerate(e.terms)}
    longest = [1] * len(e.terms)
    for t in order:
        i = pos[id(t)]
        for j in succ[i]:
            longest[j] = max(longest[j], longest[i] + 1)
    return max(longest, default=0)


def gate_counts(e: StableIndexExpr) -> Counter:
    """Gate counts keyed by arity, in units of H, T/T-dagger, CZ gates.

    J(t) counts as one H plus |t| T gates; preparations and projections are
    counted under arity 0.
    """
    c = Counter()
    for t in e.terms:
        if t.gate == H:
            c[1] += 1
        elif t.gate == J:
            c[1] += 1 + abs(t.param)
        elif t.gate == T:
            c[1] += abs(t.param)
        elif t.gate in SYMMETRIC:
            c[len(t.stable)] += 1
        else:
            c[0] += 1
    return c


def qubit_count(e: StableIndexExpr) -> int:
    """Number of wires: free inputs plus fresh preparations."""
    return len(e.free_in) + sum(1 for t in e.terms if t.gate == KET)


def merge_phases(e: StableIndexExpr) -> StableIndexExpr:
    """Fold all T powers on one index into a single term, dropping T^0."""
    total: dict = {}
    first: dict = {}
    for i, t in enumerate(e.terms):
        if t.gate == T:
            x = t.stable[0]
            total[x] = total.get(x, 0) + t.param
            first.setdefault(x, i)
    keep = {i: x for x, i in first.items()}
    out = []
    for i, t in enumerate(e.terms):
        if t.gate != T:
            out.append(t)
        elif i in keep and canon(total[keep[i]]) != 0:
            out.append(t_term(total[keep[i]], keep[i]))
    return StableIndexExpr(out)


def to_htcz(e: StableIndexExpr) -> StableIndexExpr:
    """Rewrite J, ZZ and ZZZ(pi/2) terms over {H, T, CZ}, up to global phase."""
    out = []
    for t in e.terms:
        if t.gate == J:
            out.append(t_term(t.param, t.deprecated[0]))
            out.append(h_term(t.deprecated[0], t.advanced[0]))
        elif t.gate == ZZ or (t.gate == ZZZ and t.param == 2):
            out.extend(cz_term(a, b) for a, b in combinations(t.stable, 2))
            out.extend(t_term(2, x) for x in t.stable)
        elif t.gate == ZZZ:
            raise UnknownGate(f"ZZZ({t.param}) has no exact H/T/CZ form")
        else:
            out.append(t)
    return StableIndexExpr(out)


@dataclass(frozen=True)
class Isomorphism:
    indices: dict  # index of e1 -> index of e2
    terms: dict  # term position in e1 -> term position in e2


def _labelled_graph(e: StableIndexExpr) -> nx.Graph:
    g = nx.Graph()
    for x in e.indices:
        g.add_node(("i", x), label="index")
    for n, t in enumerate(e.terms):
        g.add_node(("t", n), label=(t.gate, t.param))
        roles = [("s", p, x) for p, x in enumerate(t.stable)]
        roles += [("d", p, x) for p, x in enumerate(t.deprecated)]
        roles += [("a", p, x) for p, x in enumerate(t.advanced)]
        for role, p, x in roles:
            if x is None:
                continue
            if role == "s" and t.gate in SYMMETRIC:
                p = 0
            g.add_edge(("t", n), ("i", x), role=(role, p))
    return g


def isomorphic(e1: StableIndexExpr, e2: StableIndexExpr) -> Isomorphism | None:
    """Find an index relabelling and term bijection carrying e1 onto e2."""
    sig = lambda e: Counter((t.gate, t.param, len(t.stable), len(t.deprecated)) for t in e.terms)  # noqa: E731
    if sig(e1) != sig(e2) or len(e1.indices) != len(e2.indices):
        return None
    g1, g2 = _labelled_graph(e1), _labelled_graph(e2)
    gm = nxiso.GraphMatcher(
        g1,
        g2,
        node_match=lambda a, b: a["label"] == b["label"],
        edge_match=lambda a, b: a["role"] == b["role"],
    )
    if not gm.is_isomorphic():
        return None
    idx, trm = {}, {}
    for (k1, a), (_, b) in gm.mapping.items():
        (idx if k1 == "i" else trm)[a] = b
    return Isomorphism(idx, trm)
