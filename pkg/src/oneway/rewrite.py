"""Standardization, Pauli simplification and signal shifting.

``standardize`` is a single left-to-right pass.  Corrections are not moved
command by command; each live qubit keeps pending X and Z buffers which
entangling commands propagate and measurements absorb.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .pattern_core import (
    XY,
    CorrectX,
    CorrectZ,
    Entangle,
    Measure,
    Pattern,
    PatternError,
    Prepare,
    Shift,
    is_pauli_x,
    is_pauli_y,
    require_well_formed,
)


class NotStandardForm(PatternError):
    pass


@dataclass
class RewriteTrace:
    steps: list = field(default_factory=list)  # of (rule, command index)

    def add(self, rule: str, index: int):
        self.steps.append((rule, index))


_PHASE = {Prepare: 0, Entangle: 1, Measure: 2, Shift: 2, CorrectX: 3, CorrectZ: 3}


def is_standard(p: Pattern) -> bool:
    phases = [_PHASE[type(c)] for c in p.commands]
    if phases != sorted(phases):
        return False
    outputs = set(p.outputs)
    return all(c.v in outputs for c in p.commands if isinstance(c, (CorrectX, CorrectZ)))


def is_normal(p: Pattern) -> bool:
    if not is_standard(p):
        return False
    for c in p.commands:
        if isinstance(c, Shift):
            return False
        if isinstance(c, Measure) and c.sign and (is_pauli_x(c.angle) or is_pauli_y(c.angle)):
            return False
    return True


def _pair_key(e: Entangle) -> tuple:
    return tuple(sorted((str(e.v), str(e.w))))


def standardize(p: Pattern, trace: RewriteTrace | None = None) -> Pattern:
    require_well_formed(p)
    trace = trace if trace is not None else RewriteTrace()
    xs: dict = {}
    zs: dict = {}
    preps, ents, middle = [], [], []
    for i, c in enumerate(p.commands):
        if isinstance(c, Prepare):
            preps.append(c)
        elif isinstance(c, Entangle):
            xv, xw = xs.get(c.v, frozenset()), xs.get(c.w, frozenset())
            if xv:
                zs[c.w] = zs.get(c.w, frozenset()) ^ xv
                trace.add("EX", i)
            if xw:
                zs[c.v] = zs.get(c.v, frozenset()) ^ xw
                trace.add("EX", i)
            ents.append(c)
        elif isinstance(c, CorrectX):
            xs[c.v] = xs.get(c.v, frozenset()) ^ c.dep
        elif isinstance(c, CorrectZ):
            zs[c.v] = zs.get(c.v, frozenset()) ^ c.dep
        elif isinstance(c, Shift):
            for buf in (xs, zs):
                for q, dep in buf.items():
                    if c.v in dep:
                        buf[q] = dep ^ c.dep
            middle.append(c)
        elif isinstance(c, Measure):
            flip, shift = xs.pop(c.v, frozenset()), zs.pop(c.v, frozenset())
            if c.plane != XY:
                flip, shift = shift, flip
            if flip:
                trace.add("absorb-sign", i)
            middle.append(Measure(c.v, c.angle, c.plane, c.sign ^ flip))
            if shift:
                trace.add("absorb-shift", i)
                middle.append(Shift(c.v, shift))
    preps.sort(key=lambda c: str(c.v))
    ents.sort(key=_pair_key)
    outs = sorted(p.outputs, key=str)
    corr = [CorrectX(q, xs[q]) for q in outs if xs.get(q)]
    corr += [CorrectZ(q, zs[q]) for q in outs if zs.get(q)]
    return Pattern(tuple(preps + ents + middle + corr), p.inputs)


def pauli_simplify(p: Pattern, trace: RewriteTrace | None = None) -> Pattern:
    if not is_standard(p):
        raise NotStandardForm("pauli_simplify needs a standard-form pattern")
    trace = trace if trace is not None else RewriteTrace()
    out = []
    for i, c in enumerate(p.commands):
        if isinstance(c, Measure) and c.sign:
            if is_pauli_x(c.angle):
                trace.add("pauli-x", i)
                out.append(Measure(c.v, c.angle, c.plane))
                continue
            if is_pauli_y(c.angle):
                trace.add("pauli-y", i)
                out.append(Measure(c.v, c.angle, c.plane))
                out.append(Shift(c.v, c.sign))
                continue
        out.append(c)
    return Pattern(tuple(out), p.inputs)


def signal_shift(p: Pattern, trace: RewriteTrace | None = None) -> Pattern:
    """Remove every shift by substituting it into the signals that follow."""
    if not is_standard(p):
        raise NotStandardForm("signal_shift needs a standard-form pattern")
    trace = trace if trace is not None else RewriteTrace()
    sub: dict = {}

    def raw(e: frozenset) -> frozenset:
        out = e
        for u in e:
            out = out ^ sub.get(u, frozenset())
        return out

    out = []
    for i, c in enumerate(p.commands):
        if isinstance(c, Shift):
            sub[c.v] = sub.get(c.v, frozenset()) ^ raw(c.dep)
            trace.add("shift", i)
        elif isinstance(c, Measure):
            out.append(Measure(c.v, c.angle, c.plane, raw(c.sign)))
        elif isinstance(c, (CorrectX, CorrectZ)):
            dep = raw(c.dep)
            if dep:
                out.append(type(c)(c.v, dep))
        else:
            out.append(c)
    return Pattern(tuple(out), p.inputs)


def normalize(p: Pattern, trace: RewriteTrace | None = None) -> Pattern:
    return signal_shift(pauli_simplify(standardize(p, trace), trace), trace)
