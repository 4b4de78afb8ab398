"""Dense-matrix semantics for circuits and patterns.

Registers are big-endian: the first qubit of an ordering is the most
significant bit of a basis label.  Pattern execution enumerates outcome
branches depth-first and returns one Kraus operator per branch that has
non-zero weight.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .pattern_core import (
    XY,
    CorrectX,
    CorrectZ,
    Entangle,
    Measure,
    Pattern,
    Prepare,
    Shift,
    radians,
    require_well_formed,
)
from .stable_index import (
    Circuit,
    StableIndexExpr,
    UnknownGate,
    index_key,
    to_pattern_order,
    wire_ends,
)

MAX_QUBITS = 16
PHASE_THRESHOLD = 1e-8
ZERO_BRANCH = 1e-24

H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
Z_MAT = np.diag([1, -1]).astype(complex)
I2 = np.eye(2, dtype=complex)
CZ_MAT = np.diag([1, 1, 1, -1]).astype(complex)
ZZ_MAT = np.diag(np.exp(-1j * math.pi / 4 * np.array([1, -1, -1, 1])))
CNOT_MAT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


class TooLarge(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


def t_mat(k: int = 1) -> np.ndarray:
    """T^k with T = exp(-i pi Z / 8)."""
    w = cmath.exp(1j * math.pi * k / 8)
    return np.diag([1 / w, w])


def j_mat(eighths: int) -> np.ndarray:
    """J(theta) = H exp(-i theta Z / 2)."""
    half = radians(eighths) / 2
    return H_MAT @ np.diag([cmath.exp(-1j * half), cmath.exp(1j * half)])


def zpow_parity(d: int) -> np.ndarray:
    """Eigenvalues of Z tensor d, as a vector over basis labels."""
    labels = np.arange(2**d)
    parity = np.array([bin(x).count("1") & 1 for x in labels])
    return 1 - 2 * parity


def zzz_mat(d: int, eighths: int) -> np.ndarray:
    """exp(-i theta Z^{(x)d} / 2)."""
    return np.diag(np.exp(-0.5j * radians(eighths) * zpow_parity(d)))


def kron(*ms) -> np.ndarray:
    return reduce(np.kron, ms, np.eye(1, dtype=complex))


def embed(u: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Full 2^n matrix applying ``u`` to qubit positions ``targets``."""
    k = len(targets)
    rest = [q for q in range(n) if q not in targets]
    perm = list(targets) + rest
    big = np.kron(u, np.eye(2 ** (n - k), dtype=complex)).reshape((2,) * (2 * n))
    inv = np.argsort(perm)
    axes = list(inv) + [n + i for i in inv]
    return big.transpose(axes).reshape(2**n, 2**n)


def gate_matrix(name: str, param=None) -> np.ndarray:
    match name:
        case "H":
            return H_MAT
        case "T":
            return t_mat(1 if param is None else param)
        case "Tdg":
            return t_mat(-1)
        case "J":
            return j_mat(param)
        case "CZ":
            return CZ_MAT
        case "ZZ":
            return ZZ_MAT
        case "CNOT":
            return CNOT_MAT
    raise UnknownGate(name)


def gates_unitary(c: Circuit) -> np.ndarray:
    """Direct product of full-register gate matrices, first gate applied first."""
    pos = {q: i for i, q in enumerate(c.qubits)}
    n = len(c.qubits)
    u = np.eye(2**n, dtype=complex)
    for g in c.gates:
        u = embed(gate_matrix(g.name, g.param), [pos[q] for q in g.qubits], n) @ u
    return u


class _Register:
    """State tensor with named live axes plus one trailing reference axis."""

    def __init__(self, names: Sequence):
        n = len(names)
        self.names = list(names)
        self.psi = np.eye(2**n, dtype=complex).reshape((2,) * n + (2**n,))

    def copy(self) -> "_Register":
        r = object.__new__(_Register)
        r.names = list(self.names)
        r.psi = self.psi.copy()
        return r

    def axis(self, q) -> int:
        return self.names.index(q)

    def apply1(self, u: np.ndarray, q, rename=None):
        k = self.axis(q)
        self.psi = np.moveaxis(np.tensordot(u, self.psi, axes=([1], [k])), 0, k)
        if rename is not None:
            self.names[k] = rename

    def diag(self, phases: np.ndarray, qs: Sequence):
        """Multiply by a diagonal operator given as a tensor over ``qs``."""
        ks = [self.axis(q) for q in qs]
        shape = [1] * self.psi.ndim
        for k in ks:
            shape[k] = 2
        order = np.argsort(ks)
        t = np.asarray(phases).reshape((2,) * len(qs)).transpose(order)
        self.psi = self.psi * t.reshape(shape)

    def negate_one(self, q):
        idx = [slice(None)] * self.psi.ndim
        idx[self.axis(q)] = 1
        self.psi[tuple(idx)] *= -1

    def cz(self, a, b):
        idx = [slice(None)] * self.psi.ndim
        idx[self.axis(a)] = 1
        idx[self.axis(b)] = 1
        self.psi[tuple(idx)] *= -1

    def flip(self, q):
        self.psi = np.flip(self.psi, axis=self.axis(q)).copy()

    def add_plus(self, q):
        self.psi = np.stack([self.psi, self.psi]) / math.sqrt(2)
        self.names.insert(0, q)

    def contract(self, bra: np.ndarray, q):
        k = self.axis(q)
        self.psi = np.tensordot(bra, self.psi, axes=([0], [k]))
        del self.names[k]

    def matrix(self, order: Sequence) -> np.ndarray:
        if sorted(map(str, order)) != sorted(map(str, self.names)):
            raise ShapeMismatch(f"register {self.names} vs requested {list(order)}")
        perm = [self.names.index(q) for q in order] + [len(self.names)]
        m = self.psi.transpose(perm)
        return m.reshape(2 ** len(order), -1)


def _ordered(xs) -> list:
    return sorted(xs, key=index_key)


def circuit_unitary(e: StableIndexExpr, inputs: Sequence | None = None, outputs: Sequence | None = None) -> np.ndarray:
    """Operator from the free-input space to the free-output space.

    Default orderings: inputs sorted, outputs following each input's wire,
    with fresh-qubit wires appended in sorted order.
    """
    if inputs is None:
        inputs = _ordered(e.free_in)
    if outputs is None:
        ends = wire_ends(e)
        outputs = [ends[x] for x in inputs]
        outputs += _ordered(set(e.free_out) - set(outputs))
    if len(e.indices) > 0 and len(inputs) > MAX_QUBITS:
        raise TooLarge(len(inputs))
    reg = _Register(inputs)
    for t in to_pattern_order(e):
        match t.gate:
            case "H":
                reg.apply1(H_MAT, t.deprecated[0], t.advanced[0])
            case "J":
                reg.apply1(j_mat(t.param), t.deprecated[0], t.advanced[0])
            case "T":
                reg.diag(np.diag(t_mat(t.param)), t.stable)
            case "CZ":
                reg.cz(*t.stable)
            case "ZZ":
                reg.diag(np.diag(ZZ_MAT), t.stable)
            case "ZZZ":
                reg.diag(np.diag(zzz_mat(len(t.stable), t.param)), t.stable)
            case "KET+":
                reg.add_plus(t.advanced[0])
            case "PROJ":
                reg.contract(np.array([1, -1j]) / math.sqrt(2), t.deprecated[0])
            case _:
                raise UnknownGate(t.gate)
        if len(reg.names) > MAX_QUBITS:
            raise TooLarge(len(reg.names))
    return reg.matrix(outputs)


def measurement_bra(plane: str, eighths: int, outcome: int) -> np.ndarray:
    """Bra of the measured basis vector; outcome 0 is the ``+`` vector."""
    s = -1 if outcome else 1
    if plane == XY:
        return np.array([1, s * cmath.exp(-1j * radians(eighths))]) / math.sqrt(2)
    # YZ: |+-> = H(|0> +- e^{-i theta}|1>)/sqrt2, so the bra is (<0| +- e^{i theta}<1|) H / sqrt2
    return (np.array([1, s * cmath.exp(1j * radians(eighths))]) / math.sqrt(2)) @ H_MAT


@dataclass
class BranchMap:
    """Kraus operators of a pattern, one per outcome assignment with non-zero weight."""

    measured: tuple
    inputs: tuple
    outputs: tuple
    branches: list  # of (bits: tuple of int, Kraus matrix)

    def superoperator(self) -> np.ndarray:
        return sum(np.kron(k, k.conj()) for _, k in self.branches)

    def trace_defect(self) -> float:
        dim = 2 ** len(self.inputs)
        s = sum(k.conj().T @ k for _, k in self.branches)
        return float(np.max(np.abs(s - np.eye(dim))))


def run_pattern(
    p: Pattern,
    inputs: Sequence | None = None,
    outputs: Sequence | None = None,
    max_qubits: int = MAX_QUBITS,
) -> BranchMap:
    require_well_formed(p)
    inputs = tuple(sorted(p.inputs) if inputs is None else inputs)
    outputs = tuple(sorted(p.outputs) if outputs is None else outputs)
    measured = tuple(p.measured)
    cmds = p.commands
    branches = []

    def parity(dep, s):
        return sum(s[q] for q in dep) & 1

    def go(i: int, reg: _Register, raw: dict, s: dict):
        while i < len(cmds):
            c = cmds[i]
            i += 1
            if isinstance(c, Prepare):
                reg.add_plus(c.v)
                if len(reg.names) > max_qubits:
                    raise TooLarge(f"{len(reg.names)} live qubits")
            elif isinstance(c, Entangle):
                reg.cz(c.v, c.w)
            elif isinstance(c, CorrectX):
                if parity(c.dep, s):
                    reg.flip(c.v)
            elif isinstance(c, CorrectZ):
                if parity(c.dep, s):
                    reg.negate_one(c.v)
            elif isinstance(c, Shift):
                s[c.v] ^= parity(c.dep, s)
            elif isinstance(c, Measure):
                angle = -c.angle if parity(c.sign, s) else c.angle
                for bit in (0, 1):
                    nxt = reg.copy() if bit == 0 else reg
                    nxt.contract(measurement_bra(c.plane, angle, bit), c.v)
                    if np.vdot(nxt.psi, nxt.psi).real < ZERO_BRANCH:
                        continue
                    go(i, nxt, {**raw, c.v: bit}, {**s, c.v: bit})
                return
        bits = tuple(raw[q] for q in measured)
        branches.append((bits, reg.matrix(outputs)))

    if len(inputs) > max_qubits:
        raise TooLarge(f"{len(inputs)} inputs")
    go(0, _Register(inputs), {}, {})
    return BranchMap(measured, inputs, outputs, branches)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"{a.shape} vs {b.shape}")
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) < PHASE_THRESHOLD:
        return float(np.max(np.abs(a), initial=0.0)) <= tol
    ratio = a[k] / b[k]
    if abs(ratio) < PHASE_THRESHOLD:
        return False
    phase = ratio / abs(ratio)
    return float(np.max(np.abs(a - phase * b))) <= tol


def branch_unitary(bm: BranchMap, tol: float = 1e-9) -> np.ndarray | None:
    """The common isometry U with K_b = e^{i phi_b} sqrt(p_b) U, if there is one."""
    if not bm.branches:
        return None
    dim_in = 2 ** len(bm.inputs)
    u = None
    for _, k in bm.branches:
        pb = float(np.vdot(k, k).real) / dim_in
        kn = k / math.sqrt(pb)
        if u is None:
            u = kn
            if np.max(np.abs(u.conj().T @ u - np.eye(dim_in))) > tol:
                return None
        elif not equal_up_to_phase(kn, u, tol):
            return None
    return u


def pattern_as_unitary(
    p: Pattern,
    inputs: Sequence | None = None,
    outputs: Sequence | None = None,
    tol: float = 1e-9,
) -> np.ndarray | None:
    return branch_unitary(run_pattern(p, inputs, outputs), tol)


def same_channel(b1: BranchMap, b2: BranchMap, tol: float = 1e-10) -> bool:
    s1, s2 = b1.superoperator(), b2.superoperator()
    if s1.shape != s2.shape:
        return False
    return float(np.max(np.abs(s1 - s2))) <= tol


def unitary_channel(u: np.ndarray) -> np.ndarray:
    return np.kron(u, u.conj())
