"""Running Liffig programs as state machines.

Execution visits one label at a time.  On arrival the label's assertion is
checked (prose parts are skipped), then a guarded command whose guard is
true is executed and its terminal names the next label or the result.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Optional

from . import model as m
from . import semantics as sem
from .model import (Aborted, AssertionViolation, Fault, Halted, HoleReached, Nondeterminism,
                    Program, State, Trace)

log = logging.getLogger(__name__)

DEFAULT_FUEL = 10**7


@dataclass(frozen=True)
class RunConfig:
    fuel: int = DEFAULT_FUEL
    check_assertions: bool = True
    check_annotations: bool = False
    guard_policy: str = "first-true"    # or "fail-on-overlap"
    variant: Optional[m.Term] = None
    # keep every visited state; when off only the first and last visit are kept
    record: bool = True
    on_visit: Optional[Callable[[str, Mapping], None]] = None

    def __post_init__(self):
        if self.fuel < 1:
            raise ValueError("fuel must be at least 1")
        if self.guard_policy not in ("first-true", "fail-on-overlap"):
            raise ValueError(f"unknown guard policy {self.guard_policy!r}")


class _Compiled:
    def __init__(self, program: Program, check_annotations: bool, overlap: bool):
        self.program = program
        self.steps = {b.label: sem.compile_block(b, check_annotations, overlap)
                      for b in program.blocks}
        self.checks: dict[str, object] = {}
        self.formulas: dict[str, m.Formula] = {}
        self.weakened: set[str] = set()
        for b in program.blocks:
            f = m.resolve_assertion(program, b.label)
            self.formulas[b.label] = f
            if m.contains(f, m.Opaque):
                self.weakened.add(b.label)
            g = sem.simplify(sem.weaken_opaque(f))
            self.checks[b.label] = None if isinstance(g, m.TrueF) else sem.compile_formula(g)


_cache: dict[tuple, _Compiled] = {}


def compiled(program: Program, check_annotations: bool = False,
             overlap: bool = False) -> _Compiled:
    key = (id(program), check_annotations, overlap)
    hit = _cache.get(key)
    if hit is not None and hit.program is program:
        return hit
    if len(_cache) > 64:
        _cache.clear()
    c = _cache[key] = _Compiled(program, check_annotations, overlap)
    return c


def initial_state(program: Program, inputs: Mapping[str, int] | None = None) -> State:
    """Declarations first, then inputs; unset scalars are 0, arrays zero-filled."""
    d: dict = {}
    for decl in program.decls:
        if decl.is_array:
            d[decl.name] = (decl.init or 0,) * decl.size
        else:
            d[decl.name] = decl.init or 0
    for name, value in (inputs or {}).items():
        if name not in d:
            raise KeyError(f"unknown variable {name!r}")
        if isinstance(d[name], tuple):
            raise KeyError(f"{name!r} is an array and cannot be set as an input")
        d[name] = int(value)
        if not m.INT_MIN <= d[name] <= m.INT_MAX:
            raise ValueError(f"input {name}={value} outside the 64-bit range")
    return State._wrap(d)


@dataclass(frozen=True)
class StepResult:
    """Outcome of executing one block.

    ``kind`` is one of ``goto``, ``return``, ``abort``, ``hole``,
    ``annotation`` (a checked annotation was false) or ``overlap``.
    """

    kind: str
    state: State
    label: str | None = None
    value: int | None = None
    prose: str | None = None
    formula: m.Formula | None = None
    guards: tuple[int, ...] = ()


_KINDS = {sem.GOTO: "goto", sem.RETURN: "return", sem.ABORT: "abort", sem.HOLE: "hole",
          sem.ANNOT_FAIL: "annotation", sem.OVERLAP: "overlap"}


def step(program: Program, label: str, state: Mapping, cfg: RunConfig = RunConfig()) -> StepResult:
    """Execute block ``label`` once.  Term faults raise EvalFault."""
    c = compiled(program, cfg.check_annotations, cfg.guard_policy == "fail-on-overlap")
    if label not in c.steps:
        raise m.UnknownLabel(label)
    code, payload, s = c.steps[label](sem._raw(state))
    st = State._wrap(s)
    kind = _KINDS[code]
    if code == sem.GOTO:
        return StepResult(kind, st, label=payload)
    if code == sem.RETURN:
        return StepResult(kind, st, value=payload)
    if code == sem.HOLE:
        return StepResult(kind, st, prose=payload)
    if code == sem.ANNOT_FAIL:
        return StepResult(kind, st, formula=payload)
    if code == sem.OVERLAP:
        return StepResult(kind, st, guards=payload)
    return StepResult(kind, st)


def run(program: Program, inputs: Mapping[str, int] | None = None,
        cfg: RunConfig = RunConfig()) -> Trace:
    """Execute ``program`` from its start label and return the trace.

    Every outcome, including faults and fuel exhaustion, is reported in
    ``trace.result``; unknown input names raise KeyError up front.
    """
    c = compiled(program, cfg.check_annotations, cfg.guard_policy == "fail-on-overlap")
    steps, checks = c.steps, c.checks if cfg.check_assertions else None
    s = initial_state(program, inputs)._d
    label = program.start
    record, on_visit = cfg.record, cfg.on_visit
    visits: list = []
    warnings: list[str] = []
    warned: set[str] = set()
    count = 0
    last = None
    fuel = cfg.fuel
    result: m.Outcome
    try:
        while True:
            if count >= fuel:
                result = Fault("fuel_exhausted", label)
                break
            count += 1
            if record or count == 1:
                visits.append((label, State._wrap(s)))
            else:
                last = (label, s)
            if on_visit is not None:
                on_visit(label, s)
            if checks is not None:
                chk = checks[label]
                if label in c.weakened and label not in warned:
                    warned.add(label)
                    warnings.append(f"assertion of {label} contains prose; only its formal "
                                    f"parts are checked")
                if chk is not None and not chk(s):
                    result = AssertionViolation(label, c.formulas[label])
                    break
            code, payload, s = steps[label](s)
            if code == 0:
                label = payload
            elif code == 1:
                result = Halted(payload)
                break
            elif code == 2:
                result = Aborted(label)
                break
            elif code == 3:
                result = HoleReached(label, payload)
                break
            elif code == 4:
                result = AssertionViolation(label, payload)
                break
            else:
                result = Nondeterminism(label, payload)
                break
    except sem.EvalFault as e:
        result = Fault(e.kind, label)
    except sem.OpaqueNotEvaluable:
        result = Fault("opaque", label)
    if last is not None:
        visits.append((last[0], State._wrap(last[1])))
    for w in warnings:
        log.warning(w)
    return Trace(visits=visits, result=result, visit_count=count, warnings=warnings)


@dataclass(frozen=True)
class VariantOk:
    def __bool__(self):
        return True

    def __str__(self):
        return "VARIANT OK"


@dataclass(frozen=True)
class ViolationAt:
    index: int
    label: str
    earlier: int | None
    value: int

    def __bool__(self):
        return False

    def __str__(self):
        if self.earlier is None:
            return f"VARIANT NEGATIVE at visit {self.index} ({self.label}): {self.value}"
        return (f"VARIANT VIOLATION at visit {self.index} ({self.label}): "
                f"{self.earlier} -> {self.value}")


def check_variant(program: Program, trace: Trace, variant: m.Term) -> VariantOk | ViolationAt:
    """Check that ``variant`` is nonnegative at every visit and strictly
    smaller on each return to a label than at the previous visit there."""
    fn = sem.compile_term(variant)
    last: dict[str, int] = {}
    for i, (label, st) in enumerate(trace.visits):
        v = fn(st._d)
        if v < 0:
            return ViolationAt(i, label, None, v)
        if label in last and not v < last[label]:
            return ViolationAt(i, label, last[label], v)
        last[label] = v
    return VariantOk()
