"""Verification conditions: extraction, finite checking, and transcription.

A condition ``{P} C {Q}`` holds over a window when every state in the
window that satisfies ``P`` is taken by ``C`` only to states satisfying
``Q``.  Checking enumerates the variables occurring free in the triple;
other variables cannot affect the verdict.  Verdicts are relative to the
window and never claim more.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import model as m
from . import parser as ps
from . import printer
from . import semantics as sem
from .model import LiffigError, Program, State, VerificationCondition


class StateSpaceTooLarge(LiffigError):
    pass


class MissingAssertion(LiffigError):
    pass


class InconsistentGrouping(LiffigError):
    pass


class AssertionMismatch(LiffigError):
    pass


class UnknownTarget(LiffigError):
    pass


class SnippetError(LiffigError):
    pass


# -- extraction ------------------------------------------------------------

def _vc_command(guard: m.Formula | None, body: m.Command) -> m.Seq:
    stmts = m.flatten(body)
    if guard is not None:
        stmts = (m.Guard(guard),) + stmts
    return m.Seq(stmts)


def extract_vcs(program: Program) -> list[VerificationCondition]:
    """One condition per guarded command (or straight-line body), in block order."""
    out = []
    resolved = {lab: m.resolve_assertion(program, lab) for lab in program.labels}
    for b in program.blocks:
        if isinstance(b.body, m.IfFi):
            arms = [(gc.guard, gc.body, gc.terminal) for gc in b.body.commands]
        elif isinstance(b.body, m.Straight):
            arms = [(None, b.body.body, b.body.terminal)]
        else:
            continue
        for guard, body, terminal in arms:
            post = terminal.label if isinstance(terminal, m.Goto) else program.halt
            out.append(VerificationCondition(
                b.label, resolved[b.label], _vc_command(guard, body), post, resolved[post]))
    return out


# -- windows and verdicts --------------------------------------------------

@dataclass(frozen=True)
class DomainWindow:
    default: tuple[int, int] = (1, 12)
    per_variable: Mapping[str, tuple[int, int]] = field(default_factory=dict)
    array_elements: tuple[int, int] = (0, 12)
    array_length_cap: int = 4
    state_cap: int = 10**7

    def __post_init__(self):
        for lo, hi in [self.default, self.array_elements, *self.per_variable.values()]:
            if lo > hi:
                raise ValueError(f"empty range {lo}..{hi}")
        if self.array_length_cap < 1:
            raise ValueError("array length cap must be positive")

    def range_of(self, name: str) -> range:
        lo, hi = self.per_variable.get(name, self.default)
        return range(lo, hi + 1)

    def __str__(self) -> str:
        return f"{self.default[0]}..{self.default[1]}"


def parse_window(text: str, **kw) -> DomainWindow:
    lo, _, hi = text.partition("..")
    return DomainWindow(default=(int(lo), int(hi)), **kw)


@dataclass(frozen=True)
class Valid:
    window: DomainWindow
    states: int = 0
    faults: tuple = ()

    def __str__(self):
        return "VALID"


@dataclass(frozen=True)
class CounterExample:
    state: State
    post_state: State | None
    faults: tuple = ()

    def __str__(self):
        return f"COUNTEREXAMPLE {m.format_state(self.state)}"


@dataclass(frozen=True)
class NotCheckable:
    reason: str     # "opaque" | "hole"

    def __str__(self):
        return f"NOTCHECKABLE {self.reason}"


VcVerdict = Valid | CounterExample | NotCheckable


def _has_opaque_guard(c: m.Command) -> bool:
    return any(isinstance(s, m.Guard) and m.contains(s.formula, m.Opaque)
               for s in m.walk_command(c))


def _axes(vc: VerificationCondition, window: DomainWindow, array_sizes: Mapping[str, int]):
    scalars, arrays = m.free_vars(vc.pre, vc.command, vc.post)
    names = sorted(scalars | arrays)
    axes = []
    for name in names:
        if name in arrays:
            size = min(array_sizes.get(name, window.array_length_cap), window.array_length_cap)
            lo, hi = window.array_elements
            axes.append(list(itertools.product(range(lo, hi + 1), repeat=size)))
        else:
            axes.append(window.range_of(name))
    return names, axes


MAX_FAULTS = 5


def _scan(vc: VerificationCondition, names: list[str], axes: list, first: Sequence | None):
    """Enumerate states in lexicographic order; ``first`` restricts the leading axis."""
    pre = sem.compile_formula(vc.pre)
    cmd = sem.compile_command(vc.command)
    post = sem.compile_formula(vc.post)
    if first is not None:
        axes = [first] + axes[1:]
    faults: list = []
    count = 0
    for values in itertools.product(*axes):
        count += 1
        s = dict(zip(names, values))
        try:
            if not pre(s):
                continue
            t = cmd(s)
            if t is sem.BLOCKED or isinstance(t, sem.HoleSignal):
                continue
            if not post(t):
                return ("cx", s, t, count, faults)
        except sem.EvalFault as e:
            if len(faults) < MAX_FAULTS:
                faults.append((m.format_state(s), e.kind))
    return ("ok", None, None, count, faults)


def _scan_job(args):
    return _scan(*args)


def check_vc(vc: VerificationCondition, window: DomainWindow = DomainWindow(),
             array_sizes: Mapping[str, int] | None = None, workers: int = 1) -> VcVerdict:
    """Brute-force check of ``vc`` over ``window``.

    States where evaluation faults are skipped and listed in the verdict's
    ``faults``.  With several workers the leading variable's range is split
    among processes; the witness reported is still the lexicographically
    smallest one, so the verdict does not depend on the split.
    """
    for f in (vc.pre, vc.post):
        if m.contains(f, m.Opaque):
            return NotCheckable("opaque")
    if vc.has_hole:
        return NotCheckable("hole")
    if _has_opaque_guard(vc.command):
        return NotCheckable("opaque")
    names, axes = _axes(vc, window, array_sizes or {})
    total = 1
    for ax in axes:
        total *= len(ax)
    if total > window.state_cap:
        raise StateSpaceTooLarge(f"{total} states exceed the cap of {window.state_cap}")
    if workers <= 1 or not axes or len(axes[0]) < 2:
        results = [_scan(vc, names, axes, None)]
    else:
        lead = list(axes[0])
        k = min(workers, len(lead))
        chunks = [lead[i * len(lead) // k:(i + 1) * len(lead) // k] for i in range(k)]
        with ProcessPoolExecutor(k) as pool:
            results = list(pool.map(_scan_job, [(vc, names, axes, c) for c in chunks]))
    faults = tuple(f for r in results for f in r[4])[:MAX_FAULTS]
    for kind, s, t, _, _ in results:
        if kind == "cx":
            return CounterExample(State._wrap(s), State._wrap(t), faults)
    return Valid(window, sum(r[3] for r in results), faults)


@dataclass
class ProgramReport:
    results: list[tuple[VerificationCondition, VcVerdict]]

    @property
    def counts(self) -> dict[str, int]:
        c = {"VALID": 0, "COUNTEREXAMPLE": 0, "NOTCHECKABLE": 0}
        for _, v in self.results:
            c[str(v).split()[0]] += 1
        return c

    def summary(self) -> str:
        c = self.counts
        return (f"{c['VALID']} VALID, {c['COUNTEREXAMPLE']} COUNTEREXAMPLE, "
                f"{c['NOTCHECKABLE']} NOTCHECKABLE")

    def lines(self) -> list[str]:
        out = []
        for vc, v in self.results:
            note = ""
            if getattr(v, "faults", ()):
                note = f"  ({len(v.faults)} faulting states skipped)"
            out.append(f"{{{vc.pre_label}}} {printer.command(vc.command)} "
                       f"{{{vc.post_label}}}: {v}{note}")
        return out


def check_program(program: Program, window: DomainWindow = DomainWindow(),
                  workers: int = 1) -> ProgramReport:
    sizes = {d.name: d.size for d in program.decls if d.is_array}
    return ProgramReport([(vc, check_vc(vc, window, sizes, workers))
                          for vc in extract_vcs(program)])


# -- condition lists -------------------------------------------------------

@dataclass
class VcList:
    """Everything a condition-list file records."""

    decls: tuple[m.Decl, ...]
    assertions: dict[str, m.Formula]
    conditions: list[tuple[str, m.Command, str]]
    start: str
    halt: str
    returns: m.Term

    def vcs(self) -> list[VerificationCondition]:
        missing = [lab for pre, _, post in self.conditions for lab in (pre, post)
                   if lab not in self.assertions]
        if missing:
            raise MissingAssertion(f"no assertion for label {missing[0]}")
        resolved = {lab: m.resolve_formula(f, self.assertions)
                    for lab, f in self.assertions.items()}
        return [VerificationCondition(pre, resolved[pre], c, post, resolved[post])
                for pre, c, post in self.conditions]


def program_vclist(program: Program) -> VcList:
    halt = program.block(program.halt).body
    if isinstance(halt, m.ReturnBlock):
        ret = halt.term
    else:
        ret = halt.terminal.term
    return VcList(
        decls=tuple(d for d in program.decls if not d.implicit),
        assertions=program.assertions,
        conditions=[(vc.pre_label, vc.command, vc.post_label) for vc in extract_vcs(program)],
        start=program.start,
        halt=program.halt,
        returns=ret,
    )


def write_vclist(vl: VcList) -> str:
    lines = [printer.decl(d) for d in vl.decls]
    lines += [f"start: {vl.start}", f"halt: {vl.halt}", f"return: {printer.term(vl.returns)}",
              "assertions:"]
    lines += [f"{lab}: {printer.formula(f)}" for lab, f in vl.assertions.items()]
    lines.append("conditions:")
    for pre, c, post in vl.conditions:
        text = printer.command(c)
        lines.append(f"{{{pre}}} {text} {{{post}}}" if text else f"{{{pre}}} {{{post}}}")
    return "\n".join(lines) + "\n"


def read_vclist(text: str) -> VcList:
    """Parse a condition-list file (see :func:`write_vclist` for the layout)."""
    header, assertion_lines, condition_lines = [], [], []
    section = header
    for n, raw in enumerate(text.split("\n"), 1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if line == "assertions:":
            section = assertion_lines
        elif line == "conditions:":
            section = condition_lines
        else:
            section.append((n, line))
    decl_text, meta = [], {}
    for n, line in header:
        key, sep, value = line.partition(":")
        if sep and key in ("start", "halt", "return") and not value.startswith("="):
            meta[key] = value.strip()
        else:
            decl_text.append(line)
    decls = tuple(ps.parse_decls("\n".join(decl_text)))
    labels = []
    for n, line in assertion_lines:
        lab, sep, _ = line.partition(":")
        if not sep:
            raise ps.ParseError([ps.Diagnostic("error", m.SourceSpan(n, 1), "expected 'Label:'")])
        labels.append(lab.strip())
    assertions = {}
    for n, line in assertion_lines:
        lab, _, rest = line.partition(":")
        assertions[lab.strip()] = ps.formula_or_opaque(rest.strip(), set(labels),
                                                       m.SourceSpan(n, len(lab) + 2))
    conditions = []
    for n, line in condition_lines:
        if not (line.startswith("{") and line.endswith("}")):
            raise ps.ParseError([ps.Diagnostic("error", m.SourceSpan(n, 1),
                                               "expected '{Pre} command {Post}'")])
        close = line.index("}")
        open_ = line.rindex("{")
        pre, post = line[1:close].strip(), line[open_ + 1:-1].strip()
        body = line[close + 1:open_].strip()
        conditions.append((pre, ps.parse_command(body, set(labels)), post))
    if not labels:
        raise ps.ParseError([ps.Diagnostic("error", m.SourceSpan(1, 1), "no assertions")])
    start = meta.get("start", labels[0])
    halt = meta.get("halt", labels[-1])
    returns = ps.parse_term(meta["return"]) if "return" in meta else m.IntLit(0)
    return VcList(decls, assertions, conditions, start, halt, returns)


# -- transcription ---------------------------------------------------------

def vcs_to_liffig(vcs: Sequence[VerificationCondition] | Sequence[tuple],
                  assertions: Mapping[str, m.Formula], start: str, halt: str,
                  returns: m.Term = m.Var("z"), decls: Sequence[m.Decl] = ()) -> Program:
    """Transcribe conditions grouped by precondition label into a program.

    ``{L} g; body {M}`` becomes the guarded command ``g -> body; goto M`` in
    block ``L``.  A label with a single unguarded condition gets a
    straight-line body; labels without conditions become ``abort``; the
    halt label returns ``returns``.  Blocks follow the order of
    ``assertions``.
    """
    triples = [(v.pre_label, v.command, v.post_label) if isinstance(v, VerificationCondition)
               else tuple(v) for v in vcs]
    for lab in (start, halt):
        if lab not in assertions:
            raise MissingAssertion(f"no assertion for label {lab}")
    groups: dict[str, list] = {}
    last = None
    for pre, cmd, post in triples:
        for lab in (pre, post):
            if lab not in assertions:
                raise MissingAssertion(f"no assertion for label {lab}")
        if pre in groups and pre != last:
            raise InconsistentGrouping(f"conditions for {pre} are not adjacent")
        groups.setdefault(pre, []).append((cmd, post))
        last = pre
    if halt in groups:
        raise InconsistentGrouping(f"halt label {halt} has outgoing conditions")
    blocks = []
    for lab, f in assertions.items():
        if lab == halt:
            body: m.Body = m.ReturnBlock(returns)
        elif lab not in groups:
            body = m.AbortBlock()
        else:
            arms = groups[lab]
            if len(arms) == 1 and not _guarded(arms[0][0]):
                cmd, post = arms[0]
                body = m.Straight(m.Seq(m.flatten(cmd)), m.Goto(post))
            else:
                gcs = []
                for cmd, post in arms:
                    stmts = m.flatten(cmd)
                    if _guarded(cmd):
                        guard, stmts = stmts[0].formula, stmts[1:]
                    else:
                        guard = m.TrueF()
                    gcs.append(m.GuardedCommand(guard, m.Seq(stmts), m.Goto(post)))
                body = m.IfFi(tuple(gcs))
        blocks.append(m.Block(lab, f, body))
    if blocks[0].label != start:
        blocks.sort(key=lambda b: b.label != start)
    return ps.build_program(list(decls), blocks)


def _guarded(cmd: m.Command) -> bool:
    stmts = m.flatten(cmd)
    return bool(stmts) and isinstance(stmts[0], m.Guard)


def synthesize(vl: VcList) -> Program:
    return vcs_to_liffig(vl.conditions, vl.assertions, vl.start, vl.halt, vl.returns, vl.decls)


# -- growth by snippets ----------------------------------------------------

def merge_snippet(program: Program, new_blocks: Sequence[m.Block] = (),
                  new_commands: Mapping[str, Sequence[m.GuardedCommand]] | None = None) -> Program:
    """Grow ``program`` by new blocks and extra guarded commands.

    New blocks either take a fresh label (inserted before the halt block)
    or replace an ``abort`` block carrying the same assertion.  Guarded
    commands are appended to existing ``if...fi`` blocks or turn an
    ``abort`` block into one.  Every other block is left untouched.
    """
    new_commands = dict(new_commands or {})
    blocks = {b.label: b for b in program.blocks}
    order = list(program.labels)
    for nb in new_blocks:
        old = blocks.get(nb.label)
        if old is None:
            order.insert(order.index(program.halt), nb.label)
        else:
            if old.assertion != nb.assertion:
                raise AssertionMismatch(
                    f"block {nb.label}: {printer.formula(nb.assertion)!r} differs from "
                    f"{printer.formula(old.assertion)!r}")
            if not isinstance(old.body, m.AbortBlock):
                raise SnippetError(f"block {nb.label} exists and is not an abort block")
        blocks[nb.label] = nb
    for lab, gcs in new_commands.items():
        if lab not in blocks:
            raise UnknownTarget(f"no block {lab} to extend")
        old = blocks[lab]
        if isinstance(old.body, m.AbortBlock):
            existing: tuple = ()
        elif isinstance(old.body, m.IfFi):
            existing = old.body.commands
        else:
            raise SnippetError(f"block {lab} is neither abort nor if...fi")
        blocks[lab] = m.Block(lab, old.assertion, m.IfFi(existing + tuple(gcs)), span=old.span)
    for b in blocks.values():
        for g in ps.gotos(b):
            if g.label not in blocks:
                raise UnknownTarget(f"goto {g.label} from {b.label}: no such label")
    explicit = [d for d in program.decls if not d.implicit]
    return ps.build_program(explicit, [blocks[lab] for lab in order])
