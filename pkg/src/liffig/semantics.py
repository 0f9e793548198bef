"""Meaning of terms, formulas and commands over the integers.

Every construct is translated once into Python source and compiled, so the
interpreter and the condition checker run the very same code.  States are
plain dicts on the hot paths (``name -> int`` for scalars, ``name ->
tuple`` for arrays) and are never mutated in place: commands build a new
dict.  Arithmetic is 64-bit signed; leaving that range is an overflow
fault rather than wraparound.
"""

from __future__ import annotations

import functools
import math
from collections.abc import Mapping

from . import model as m
from .model import INT_MAX, INT_MIN, LiffigError


class EvalFault(LiffigError):
    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind}{': ' + detail if detail else ''}")
        self.kind = kind


class OpaqueNotEvaluable(LiffigError):
    pass


class Blocked:
    """Result of a command whose guard (or checked annotation) is false."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Blocked"

    def __bool__(self):
        return False


BLOCKED = Blocked()


class HoleSignal:
    """Execution arrived at an unfilled hole."""

    def __init__(self, prose: str, state: dict):
        self.prose = prose
        self.state = state

    def __repr__(self):
        return f"HoleSignal({self.prose!r})"


class AnnotationFailed:
    def __init__(self, formula: m.Formula):
        self.formula = formula


# -- runtime helpers referenced by generated code --------------------------

def _ck(v):
    if INT_MIN <= v <= INT_MAX:
        return v
    raise EvalFault("overflow", str(v))


def _fdiv(a, b):
    if b == 0:
        raise EvalFault("div_by_zero")
    return _ck(a // b)


def _fmod(a, b):
    # 0 <= result < |b|; matches a - b*(a/b) whenever b > 0
    if b == 0:
        raise EvalFault("div_by_zero")
    return a % abs(b)


def _pow(a, b):
    if b < 0:
        raise EvalFault("domain", "negative exponent")
    if b > 64 and abs(a) > 1:
        raise EvalFault("overflow")
    return _ck(a ** b)


def _gcd(a, b):
    if a <= 0 or b <= 0:
        raise EvalFault("domain", f"gcd({a},{b}) needs positive arguments")
    return math.gcd(a, b)


def _at(arr, i):
    if 0 <= i < len(arr):
        return arr[i]
    raise EvalFault("index_out_of_bounds", f"index {i} of length {len(arr)}")


def _aset(arr, i, v):
    if 0 <= i < len(arr):
        return arr[:i] + (v,) + arr[i + 1:]
    raise EvalFault("index_out_of_bounds", f"index {i} of length {len(arr)}")


def _divides(d, a):
    return a == 0 if d == 0 else a % d == 0


def _range(lo, hi):
    return range(lo, hi + 1)


def _distinct(*cells):
    if len(set(cells)) != len(cells):
        raise EvalFault("write_conflict", "two targets name the same array cell")


_RUNTIME = {
    "_ck": _ck, "_fdiv": _fdiv, "_fmod": _fmod, "_pow": _pow, "_gcd": _gcd,
    "_at": _at, "_aset": _aset, "_divides": _divides, "_range": _range,
    "_distinct": _distinct, "_BLOCKED": BLOCKED, "HoleSignal": HoleSignal,
    "AnnotationFailed": AnnotationFailed,
}


# -- source generation -----------------------------------------------------

def _bound(name: str) -> str:
    return f"q_{name}"


def term_src(t: m.Term, bound: frozenset = frozenset()) -> str:
    if isinstance(t, m.IntLit):
        return repr(t.value)
    if isinstance(t, m.Var):
        return _bound(t.name) if t.name in bound else f"s[{t.name!r}]"
    if isinstance(t, m.ArrayRef):
        return f"_at(s[{t.array!r}], {term_src(t.index, bound)})"
    if isinstance(t, m.BinOp):
        a, b = term_src(t.left, bound), term_src(t.right, bound)
        if t.op in ("+", "-", "*"):
            return f"_ck({a} {t.op} {b})"
        return {"/": "_fdiv", "mod": "_fmod", "^": "_pow"}[t.op] + f"({a}, {b})"
    if isinstance(t, m.Apply):
        if t.fn == "gcd":
            return f"_gcd({', '.join(term_src(a, bound) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


_PY_CMP = {"=": "==", "!=": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def formula_src(f: m.Formula, bound: frozenset = frozenset()) -> str:
    if isinstance(f, m.TrueF):
        return "True"
    if isinstance(f, m.FalseF):
        return "False"
    if isinstance(f, m.Compare):
        return f"({term_src(f.left, bound)} {_PY_CMP[f.op]} {term_src(f.right, bound)})"
    if isinstance(f, m.Pred):
        args = [term_src(a, bound) for a in f.args]
        if f.name == "even":
            return f"({args[0]} % 2 == 0)"
        if f.name == "odd":
            return f"({args[0]} % 2 == 1)"
        if f.name == "div":
            return f"_divides({args[1]}, {args[0]})"
    if isinstance(f, m.Not):
        return f"(not {formula_src(f.body, bound)})"
    if isinstance(f, m.And):
        return f"({formula_src(f.left, bound)} and {formula_src(f.right, bound)})"
    if isinstance(f, m.Or):
        return f"({formula_src(f.left, bound)} or {formula_src(f.right, bound)})"
    if isinstance(f, m.Implies):
        return f"((not {formula_src(f.left, bound)}) or {formula_src(f.right, bound)})"
    if isinstance(f, (m.BoundedAll, m.BoundedSome)):
        fn = "all" if isinstance(f, m.BoundedAll) else "any"
        inner = bound | {f.var}
        return (f"{fn}({formula_src(f.body, inner)} for {_bound(f.var)} in "
                f"_range({term_src(f.lo, bound)}, {term_src(f.hi, bound)}))")
    if isinstance(f, m.Opaque):
        raise OpaqueNotEvaluable(f"prose is not evaluable: {f.prose!r}")
    if isinstance(f, m.LabelRef):
        raise OpaqueNotEvaluable(f"unresolved label reference {f.label}")
    raise TypeError(f"not a formula: {f!r}")


class _Emitter:
    """Emits Python statements for commands operating on a dict ``s``.

    ``s`` is copied before the first write; ``fresh`` tracks whether the
    current ``s`` is already a private copy.
    """

    def __init__(self, check_annotations: bool, on_blocked: str, on_annot: str,
                 on_hole: str, consts: list):
        self.check_annotations = check_annotations
        self.on_blocked = on_blocked
        self.on_annot = on_annot
        self.on_hole = on_hole
        self.consts = consts
        self.tmp = 0

    def const(self, value) -> str:
        self.consts.append(value)
        return f"_c[{len(self.consts) - 1}]"

    def emit(self, c: m.Command, out: list, ind: str, fresh: bool) -> bool:
        if isinstance(c, m.Seq):
            for sub in c.commands:
                fresh = self.emit(sub, out, ind, fresh)
            return fresh
        if isinstance(c, m.Guard):
            out.append(f"{ind}if not {formula_src(c.formula)}: {self.on_blocked}")
            return fresh
        if isinstance(c, m.Annot):
            if self.check_annotations and not m.contains(c.formula, m.Opaque):
                out.append(f"{ind}if not {formula_src(c.formula)}: "
                           + self.on_annot.format(self.const(c.formula)))
            return fresh
        if isinstance(c, m.Hole):
            out.append(ind + self.on_hole.format(self.const(c.prose)))
            return fresh
        if isinstance(c, m.Swap):
            if not fresh:
                out.append(f"{ind}s = s.copy()")
            out.append(f"{ind}s[{c.a!r}], s[{c.b!r}] = s[{c.b!r}], s[{c.a!r}]")
            return True
        if isinstance(c, m.ParAssign):
            return self.assign(c, out, ind, fresh)
        raise TypeError(f"not a command: {c!r}")

    def assign(self, c: m.ParAssign, out: list, ind: str, fresh: bool) -> bool:
        # all sources and target indices are read in the pre-state
        names = [t.name for t in c.targets if isinstance(t, m.Var)]
        if len(set(names)) != len(names):
            raise ValueError("parallel assignment names a variable twice")
        vals, idxs = [], []
        for t, src in zip(c.targets, c.sources):
            v = f"_v{self.tmp}"
            self.tmp += 1
            out.append(f"{ind}{v} = {term_src(src)}")
            vals.append(v)
            if isinstance(t, m.ArrayRef):
                i = f"_v{self.tmp}"
                self.tmp += 1
                out.append(f"{ind}{i} = {term_src(t.index)}")
                idxs.append(i)
            else:
                idxs.append(None)
        by_array: dict[str, list[str]] = {}
        for t, i in zip(c.targets, idxs):
            if i is not None:
                by_array.setdefault(t.array, []).append(i)
        for cells in by_array.values():
            if len(cells) > 1:
                out.append(f"{ind}_distinct({', '.join(cells)})")
        if not fresh:
            out.append(f"{ind}s = s.copy()")
        for t, v, i in zip(c.targets, vals, idxs):
            if i is None:
                out.append(f"{ind}s[{t.name!r}] = {v}")
            else:
                out.append(f"{ind}s[{t.array!r}] = _aset(s[{t.array!r}], {i}, {v})")
        return True


def _namespace(consts: list) -> dict:
    ns = dict(_RUNTIME)
    ns["_c"] = consts
    return ns


@functools.lru_cache(maxsize=4096)
def compile_term(t: m.Term):
    return eval(f"lambda s: {term_src(t)}", _namespace([]))


@functools.lru_cache(maxsize=4096)
def compile_formula(f: m.Formula):
    return eval(f"lambda s: {formula_src(f)}", _namespace([]))


@functools.lru_cache(maxsize=4096)
def compile_command(c: m.Command, check_annotations: bool = False):
    """Python function ``s -> dict | BLOCKED | HoleSignal`` for ``c``."""
    consts: list = []
    em = _Emitter(check_annotations, "return _BLOCKED", "return _BLOCKED",
                  "return HoleSignal({}, s)", consts)
    lines = ["def _cmd(s):"]
    em.emit(c, lines, "    ", False)
    lines.append("    return s")
    ns = _namespace(consts)
    exec("\n".join(lines), ns)
    return ns["_cmd"]


def _raw(state) -> dict:
    if isinstance(state, m.State):
        return state._d
    if isinstance(state, dict):
        return state
    return m.State(state)._d


def eval_term(state: Mapping, t: m.Term) -> int:
    """Value of ``t`` in ``state``; faults raise :class:`EvalFault`."""
    return compile_term(t)(_raw(state))


def eval_formula(state: Mapping, f: m.Formula) -> bool:
    """Truth of ``f`` in ``state``.  Opaque prose raises OpaqueNotEvaluable."""
    return bool(compile_formula(f)(_raw(state)))


def apply_command(state: Mapping, c: m.Command, check_annotations: bool = False):
    """Run ``c`` from ``state``.

    Returns the new :class:`~liffig.model.State`, ``BLOCKED`` when a guard
    is false, or a :class:`HoleSignal`.  Faults raise :class:`EvalFault`.
    """
    out = compile_command(c, check_annotations)(_raw(state))
    if isinstance(out, dict):
        return m.State._wrap(out)
    if isinstance(out, HoleSignal):
        out.state = m.State._wrap(out.state)
    return out


def weaken_opaque(f: m.Formula, positive: bool = True) -> m.Formula:
    """Replace prose by whatever makes the check weaker.

    In positive position prose becomes ``true``, under a negation
    ``false``, so evaluating the result never reports a violation that
    the prose might have excused.
    """
    if isinstance(f, m.Opaque):
        return m.TrueF() if positive else m.FalseF()
    if isinstance(f, m.Not):
        return m.Not(weaken_opaque(f.body, not positive))
    if isinstance(f, (m.And, m.Or)):
        return type(f)(weaken_opaque(f.left, positive), weaken_opaque(f.right, positive))
    if isinstance(f, m.Implies):
        return m.Implies(weaken_opaque(f.left, not positive), weaken_opaque(f.right, positive))
    if isinstance(f, (m.BoundedAll, m.BoundedSome)):
        return type(f)(f.var, f.lo, f.hi, weaken_opaque(f.body, positive))
    return f


def simplify(f: m.Formula) -> m.Formula:
    """Fold ``true``/``false`` constants out of conjunctions and the like."""
    if isinstance(f, m.Not):
        b = simplify(f.body)
        if isinstance(b, m.TrueF):
            return m.FalseF()
        if isinstance(b, m.FalseF):
            return m.TrueF()
        return m.Not(b)
    if isinstance(f, m.And):
        a, b = simplify(f.left), simplify(f.right)
        if isinstance(a, m.FalseF) or isinstance(b, m.FalseF):
            return m.FalseF()
        if isinstance(a, m.TrueF):
            return b
        if isinstance(b, m.TrueF):
            return a
        return m.And(a, b)
    if isinstance(f, m.Or):
        a, b = simplify(f.left), simplify(f.right)
        if isinstance(a, m.TrueF) or isinstance(b, m.TrueF):
            return m.TrueF()
        if isinstance(a, m.FalseF):
            return b
        if isinstance(b, m.FalseF):
            return a
        return m.Or(a, b)
    if isinstance(f, m.Implies):
        a, b = simplify(f.left), simplify(f.right)
        if isinstance(a, m.FalseF) or isinstance(b, m.TrueF):
            return m.TrueF()
        if isinstance(a, m.TrueF):
            return b
        return m.Implies(a, b)
    return f


# -- whole blocks ----------------------------------------------------------

GOTO, RETURN, ABORT, HOLE, ANNOT_FAIL, OVERLAP = range(6)


def block_source(block: m.Block, check_annotations: bool, overlap: bool, consts: list) -> str:
    """Source of ``step(s) -> (code, payload, new_s)`` for one block."""
    em = _Emitter(check_annotations, "return (_ABORT, None, s)",
                  "return (_ANNOT_FAIL, {}, s)", "return (_HOLE, {}, s)", consts)
    lines = ["def _step(s):"]
    ind = "    "

    def finish(body: m.Command, terminal, ind: str) -> None:
        em.emit(body, lines, ind, False)
        if isinstance(terminal, m.Goto):
            lines.append(f"{ind}return (_GOTO, {terminal.label!r}, s)")
        elif isinstance(terminal, m.Return):
            lines.append(f"{ind}return (_RETURN, {term_src(terminal.term)}, s)")
        else:
            lines.append(f"{ind}return (_HOLE, {em.const('')}, s)")

    body = block.body
    if isinstance(body, m.AbortBlock):
        lines.append(f"{ind}return (_ABORT, None, s)")
    elif isinstance(body, m.ReturnBlock):
        lines.append(f"{ind}return (_RETURN, {term_src(body.term)}, s)")
    elif isinstance(body, m.Straight):
        finish(body.body, body.terminal, ind)
    else:
        gcs = body.commands
        if overlap and len(gcs) > 1:
            for i, gc in enumerate(gcs):
                lines.append(f"{ind}_g{i} = {formula_src(gc.guard)}")
            hits = ", ".join(f"{i}" for i in range(len(gcs)))
            lines.append(f"{ind}_hits = tuple(i for i, g in zip(({hits},), "
                         f"({', '.join(f'_g{i}' for i in range(len(gcs)))},)) if g)")
            lines.append(f"{ind}if len(_hits) > 1: return (_OVERLAP, _hits, s)")
            for i, gc in enumerate(gcs):
                lines.append(f"{ind}if _g{i}:")
                finish(gc.body, gc.terminal, ind + "    ")
        else:
            for gc in gcs:
                if isinstance(gc.guard, m.TrueF):
                    finish(gc.body, gc.terminal, ind)
                    break
                lines.append(f"{ind}if {formula_src(gc.guard)}:")
                finish(gc.body, gc.terminal, ind + "    ")
        lines.append(f"{ind}return (_ABORT, None, s)")
    return "\n".join(lines)


def compile_block(block: m.Block, check_annotations: bool = False, overlap: bool = False):
    consts: list = []
    src = block_source(block, check_annotations, overlap, consts)
    ns = _namespace(consts)
    ns.update(_GOTO=GOTO, _RETURN=RETURN, _ABORT=ABORT, _HOLE=HOLE,
              _ANNOT_FAIL=ANNOT_FAIL, _OVERLAP=OVERLAP)
    exec(src, ns)
    return ns["_step"]
