"""AST, program state and execution outcomes for Liffig programs.

All node types are frozen dataclasses.  Source spans ride along on every
node for diagnostics but are excluded from equality and hashing, so two
programs parsed from differently formatted text compare equal when their
structure agrees.
"""

from __future__ import annotations

import re
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from typing import Union

RESERVED = frozenset(
    ["if", "fi", "goto", "return", "abort", "int", "all", "some", "in", "or",
     "swap", "true", "false", "mod"]
)
IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


class LiffigError(Exception):
    """Base class for every error raised by this package."""


class CyclicReference(LiffigError):
    pass


class UnknownLabel(LiffigError):
    pass


def check_ident(name: str) -> str:
    if not IDENT_RE.match(name) or name in RESERVED:
        raise ValueError(f"not a valid identifier: {name!r}")
    return name


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


# -- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Var:
    name: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class ArrayRef:
    array: str
    index: Term
    span: SourceSpan | None = _span()


BINOPS = ("+", "-", "*", "/", "^", "mod")


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Term
    right: Term
    span: SourceSpan | None = _span()


FUNCTIONS = {"gcd": 2}


@dataclass(frozen=True)
class Apply:
    fn: str
    args: tuple[Term, ...]
    span: SourceSpan | None = _span()


Term = Union[IntLit, Var, ArrayRef, BinOp, Apply]


# -- formulas --------------------------------------------------------------

@dataclass(frozen=True)
class TrueF:
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class FalseF:
    span: SourceSpan | None = _span()


COMPARISONS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Compare:
    op: str
    left: Term
    right: Term
    span: SourceSpan | None = _span()


# div(a, b) holds when b divides a
PREDICATES = {"even": 1, "odd": 1, "div": 2}


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple[Term, ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Not:
    body: Formula
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class BoundedAll:
    var: str
    lo: Term
    hi: Term
    body: Formula
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class BoundedSome:
    var: str
    lo: Term
    hi: Term
    body: Formula
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class LabelRef:
    label: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Opaque:
    """Prose that is outside the formal fragment; never evaluated."""

    prose: str
    span: SourceSpan | None = _span()


Formula = Union[TrueF, FalseF, Compare, Pred, Not, And, Or, Implies,
                BoundedAll, BoundedSome, LabelRef, Opaque]


# -- commands --------------------------------------------------------------

@dataclass(frozen=True)
class ParAssign:
    targets: tuple[Var | ArrayRef, ...]
    sources: tuple[Term, ...]
    span: SourceSpan | None = _span()

    def __post_init__(self):
        if len(self.targets) != len(self.sources) or not self.targets:
            raise ValueError("parallel assignment needs equally many targets and sources")


@dataclass(frozen=True)
class Swap:
    a: str
    b: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Guard:
    formula: Formula
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Hole:
    prose: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Seq:
    commands: tuple[Command, ...] = ()
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Annot:
    formula: Formula
    span: SourceSpan | None = _span()


Command = Union[ParAssign, Swap, Guard, Hole, Seq, Annot]


@dataclass(frozen=True)
class Goto:
    label: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Return:
    term: Term
    span: SourceSpan | None = _span()


Terminal = Union[Goto, Return]


@dataclass(frozen=True)
class GuardedCommand:
    guard: Formula
    body: Command
    # None only when the body ends in a hole that stands in for the rest
    terminal: Terminal | None
    span: SourceSpan | None = _span()


# -- blocks and programs ---------------------------------------------------

@dataclass(frozen=True)
class IfFi:
    commands: tuple[GuardedCommand, ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Straight:
    body: Command
    terminal: Terminal | None
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class AbortBlock:
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class ReturnBlock:
    term: Term
    span: SourceSpan | None = _span()


Body = Union[IfFi, Straight, AbortBlock, ReturnBlock]


@dataclass(frozen=True)
class Block:
    label: str
    assertion: Formula
    body: Body
    span: SourceSpan | None = _span()

    @property
    def returns(self) -> bool:
        return isinstance(self.body, ReturnBlock) or (
            isinstance(self.body, Straight) and isinstance(self.body.terminal, Return))


@dataclass(frozen=True)
class Decl:
    name: str
    size: int | None = None     # None for scalars
    init: int | None = None
    implicit: bool = False
    span: SourceSpan | None = _span()

    @property
    def is_array(self) -> bool:
        return self.size is not None


@dataclass(frozen=True)
class Program:
    decls: tuple[Decl, ...]
    blocks: tuple[Block, ...]
    start: str
    halt: str
    warnings: tuple = field(default=(), compare=False, repr=False)

    def block(self, label: str) -> Block:
        for b in self.blocks:
            if b.label == label:
                return b
        raise UnknownLabel(label)

    @property
    def labels(self) -> list[str]:
        return [b.label for b in self.blocks]

    @property
    def assertions(self) -> dict[str, Formula]:
        return {b.label: b.assertion for b in self.blocks}

    def decl(self, name: str) -> Decl | None:
        for d in self.decls:
            if d.name == name:
                return d
        return None


# -- verification conditions -----------------------------------------------

@dataclass(frozen=True)
class VerificationCondition:
    pre_label: str
    pre: Formula
    command: Command
    post_label: str
    post: Formula

    @property
    def has_hole(self) -> bool:
        return any(isinstance(c, Hole) for c in walk_command(self.command))


# -- state -----------------------------------------------------------------

class State(Mapping):
    """Immutable map from variable names to ints (scalars) or int tuples (arrays)."""

    __slots__ = ("_d",)

    def __init__(self, values: Mapping | None = None, **kw):
        d = {}
        for k, v in {**(values or {}), **kw}.items():
            d[k] = tuple(int(x) for x in v) if isinstance(v, (list, tuple)) else int(v)
        self._d = d

    @classmethod
    def _wrap(cls, d: dict) -> State:
        s = cls.__new__(cls)
        s._d = d
        return s

    def __getitem__(self, key: str):
        return self._d[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __hash__(self) -> int:
        return hash(frozenset(self._d.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, State):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"State({format_state(self)})"

    @property
    def scalars(self) -> dict[str, int]:
        return {k: v for k, v in self._d.items() if isinstance(v, int)}

    @property
    def arrays(self) -> dict[str, tuple[int, ...]]:
        return {k: v for k, v in self._d.items() if isinstance(v, tuple)}

    def set(self, **changes) -> State:
        return State({**self._d, **changes})

    def as_dict(self) -> dict:
        return dict(self._d)


def format_state(state: Mapping) -> str:
    parts = []
    for k, v in state.items():
        if isinstance(v, tuple):
            parts.append(f"{k}=[{','.join(map(str, v))}]")
        else:
            parts.append(f"{k}={v}")
    return ",".join(parts)


# -- outcomes --------------------------------------------------------------

@dataclass(frozen=True)
class Halted:
    value: int

    def __str__(self):
        return f"Halted({self.value})"


@dataclass(frozen=True)
class Aborted:
    label: str

    def __str__(self):
        return f"Aborted({self.label})"


@dataclass(frozen=True)
class AssertionViolation:
    label: str
    formula: Formula

    def __str__(self):
        return f"AssertionViolation({self.label})"


@dataclass(frozen=True)
class HoleReached:
    label: str
    prose: str

    def __str__(self):
        return f'HoleReached({self.label}, "{self.prose}")'


FAULT_KINDS = ("overflow", "div_by_zero", "index_out_of_bounds", "fuel_exhausted",
               "domain", "write_conflict", "opaque")


@dataclass(frozen=True)
class Fault:
    kind: str
    label: str

    def __str__(self):
        return f"Fault({self.kind}, {self.label})"


@dataclass(frozen=True)
class Nondeterminism:
    """More than one guard was true under the fail-on-overlap policy."""

    label: str
    guards: tuple[int, ...]

    def __str__(self):
        return f"Nondeterminism({self.label}, guards={list(self.guards)})"


Outcome = Union[Halted, Aborted, AssertionViolation, HoleReached, Fault, Nondeterminism]


@dataclass
class Trace:
    visits: list[tuple[str, State]]
    result: Outcome
    visit_count: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def labels(self) -> list[str]:
        return [lab for lab, _ in self.visits]

    @property
    def final_state(self) -> State:
        return self.visits[-1][1]

    def export(self) -> str:
        lines = [f"{lab}\t{format_state(st)}" for lab, st in self.visits]
        lines.append(f"RESULT {self.result}")
        return "\n".join(lines) + "\n"


# -- traversal helpers -----------------------------------------------------

def walk_command(c: Command) -> Iterator[Command]:
    yield c
    if isinstance(c, Seq):
        for sub in c.commands:
            yield from walk_command(sub)


def flatten(c: Command) -> tuple[Command, ...]:
    """Statements of a command with nested sequences spliced in."""
    if isinstance(c, Seq):
        out: list[Command] = []
        for sub in c.commands:
            out.extend(flatten(sub))
        return tuple(out)
    return (c,)


def term_children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, ArrayRef):
        return (t.index,)
    if isinstance(t, BinOp):
        return (t.left, t.right)
    if isinstance(t, Apply):
        return t.args
    return ()


def term_vars(t: Term, scalars: set, arrays: set, bound: frozenset = frozenset()) -> None:
    if isinstance(t, Var):
        if t.name not in bound:
            scalars.add(t.name)
    elif isinstance(t, ArrayRef):
        arrays.add(t.array)
    for c in term_children(t):
        term_vars(c, scalars, arrays, bound)


def formula_vars(f: Formula, scalars: set, arrays: set, bound: frozenset = frozenset()) -> None:
    if isinstance(f, Compare):
        term_vars(f.left, scalars, arrays, bound)
        term_vars(f.right, scalars, arrays, bound)
    elif isinstance(f, Pred):
        for a in f.args:
            term_vars(a, scalars, arrays, bound)
    elif isinstance(f, Not):
        formula_vars(f.body, scalars, arrays, bound)
    elif isinstance(f, (And, Or, Implies)):
        formula_vars(f.left, scalars, arrays, bound)
        formula_vars(f.right, scalars, arrays, bound)
    elif isinstance(f, (BoundedAll, BoundedSome)):
        term_vars(f.lo, scalars, arrays, bound)
        term_vars(f.hi, scalars, arrays, bound)
        formula_vars(f.body, scalars, arrays, bound | {f.var})


def command_vars(c: Command, scalars: set, arrays: set) -> None:
    for sub in walk_command(c):
        if isinstance(sub, ParAssign):
            for t in sub.targets + sub.sources:
                term_vars(t, scalars, arrays)
        elif isinstance(sub, Swap):
            scalars.update((sub.a, sub.b))
        elif isinstance(sub, (Guard, Annot)):
            formula_vars(sub.formula, scalars, arrays)


def free_vars(*items) -> tuple[set, set]:
    """Scalar and array names occurring free in the given terms/formulas/commands."""
    scalars: set = set()
    arrays: set = set()
    for it in items:
        if isinstance(it, (ParAssign, Swap, Guard, Hole, Seq, Annot)):
            command_vars(it, scalars, arrays)
        elif isinstance(it, (IntLit, Var, ArrayRef, BinOp, Apply)):
            term_vars(it, scalars, arrays)
        else:
            formula_vars(it, scalars, arrays)
    return scalars, arrays


def contains(f: Formula, kind: type) -> bool:
    if isinstance(f, kind):
        return True
    if isinstance(f, Not):
        return contains(f.body, kind)
    if isinstance(f, (And, Or, Implies)):
        return contains(f.left, kind) or contains(f.right, kind)
    if isinstance(f, (BoundedAll, BoundedSome)):
        return contains(f.body, kind)
    return False


def label_refs(f: Formula) -> list[str]:
    if isinstance(f, LabelRef):
        return [f.label]
    if isinstance(f, Not):
        return label_refs(f.body)
    if isinstance(f, (And, Or, Implies)):
        return label_refs(f.left) + label_refs(f.right)
    if isinstance(f, (BoundedAll, BoundedSome)):
        return label_refs(f.body)
    return []


def _substitute_refs(f: Formula, lookup) -> Formula:
    if isinstance(f, LabelRef):
        return lookup(f.label)
    if isinstance(f, Not):
        return Not(_substitute_refs(f.body, lookup), span=f.span)
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_substitute_refs(f.left, lookup), _substitute_refs(f.right, lookup),
                        span=f.span)
    if isinstance(f, (BoundedAll, BoundedSome)):
        return type(f)(f.var, f.lo, f.hi, _substitute_refs(f.body, lookup), span=f.span)
    return f


def resolve_formula(f: Formula, assertions: Mapping[str, Formula]) -> Formula:
    """Expand every label reference in ``f`` using ``assertions``."""
    cache: dict[str, Formula] = {}

    def lookup(label: str, active: tuple = ()) -> Formula:
        if label in active:
            raise CyclicReference(" -> ".join(active + (label,)))
        if label not in assertions:
            raise UnknownLabel(label)
        if label not in cache:
            cache[label] = _substitute_refs(
                assertions[label], lambda l: lookup(l, active + (label,)))
        return cache[label]

    return _substitute_refs(f, lookup)


def resolve_assertion(program: Program, label: str) -> Formula:
    """Assertion of block ``label`` with label references expanded recursively."""
    assertions = program.assertions
    if label not in assertions:
        raise UnknownLabel(label)
    return resolve_formula(LabelRef(label), assertions)
