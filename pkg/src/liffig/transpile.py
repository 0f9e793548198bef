"""C code generation that keeps the label/assertion/goto shape intact.

Each block becomes a C label followed by its assertion as a ``//`` comment
and one ``if (guard) { body goto M; }`` per guarded command; an exhausted
``if...fi`` falls into ``assert(0);``.  With ``checked=True`` every label
also asserts its (resolved) assertion at run time.
"""

from __future__ import annotations

from collections.abc import Sequence

from . import model as m
from . import printer
from .model import LiffigError, Program


class HolePresent(LiffigError):
    pass


class OpaqueGuard(LiffigError):
    pass


class OpaqueAssertion(LiffigError):
    pass


_C_PREC = {"*": 5, "/": 5, "mod": 5, "+": 4, "-": 4}
_C_CMP = {"=": "==", "!=": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


class _Gen:
    def __init__(self, program: Program, ctype: str, indent: str):
        self.program = program
        self.ctype = ctype
        self.ind = indent
        self.helpers: set[str] = set()
        self.q = 0

    # -- expressions -----------------------------------------------------

    def term(self, t: m.Term, prec: int = 0) -> str:
        if isinstance(t, m.IntLit):
            s = str(t.value) + ("LL" if self.ctype != "int" and abs(t.value) > 2**31 - 1 else "")
            return f"({s})" if t.value < 0 and prec > 0 else s
        if isinstance(t, m.Var):
            return t.name
        if isinstance(t, m.ArrayRef):
            return f"{t.array}[{self.term(t.index)}]"
        if isinstance(t, m.Apply):
            self.helpers.add("gcd0")
            return f"gcd0({','.join(self.term(a) for a in t.args)})"
        if isinstance(t, m.BinOp):
            if t.op == "^":
                self.helpers.add("ipow")
                return f"ipow({self.term(t.left)}, {self.term(t.right)})"
            p = _C_PREC[t.op]
            op = "%" if t.op == "mod" else t.op
            s = f"{self.term(t.left, p)} {op} {self.term(t.right, p + 1)}"
            return f"({s})" if p < prec else s
        raise TypeError(t)

    def cond(self, f: m.Formula, prec: int = 0) -> str:
        """C expression for a formula without quantifiers."""
        if isinstance(f, m.TrueF):
            return "1"
        if isinstance(f, m.FalseF):
            return "0"
        if isinstance(f, m.Compare):
            s = f"{self.term(f.left, 3)} {_C_CMP[f.op]} {self.term(f.right, 3)}"
            return f"({s})" if prec > 2 else s
        if isinstance(f, m.Pred):
            a = [self.term(x, 6) for x in f.args]
            if f.name == "even":
                s = f"{a[0]} % 2 == 0"
            elif f.name == "odd":
                s = f"{a[0]} % 2 != 0"
            else:
                s = f"{a[0]} % {a[1]} == 0"
            return f"({s})" if prec > 2 else s
        if isinstance(f, m.Not):
            return f"!{self.cond(f.body, 9)}"
        if isinstance(f, m.And):
            s = f"{self.cond(f.left, 3)} && {self.cond(f.right, 3)}"
            return f"({s})" if prec > 3 else s
        if isinstance(f, m.Or):
            s = f"{self.cond(f.left, 2)} || {self.cond(f.right, 2)}"
            return f"({s})" if prec > 2 else s
        if isinstance(f, m.Implies):
            s = f"!{self.cond(f.left, 9)} || {self.cond(f.right, 2)}"
            return f"({s})" if prec > 2 else s
        if isinstance(f, m.Opaque):
            raise OpaqueGuard(f"prose cannot be compiled: {f.prose!r}")
        if isinstance(f, (m.BoundedAll, m.BoundedSome)):
            raise ValueError("quantifier outside an assertion")
        if isinstance(f, m.LabelRef):
            raise ValueError(f"unresolved label reference {f.label}")
        raise TypeError(f)

    def assertion(self, f: m.Formula, out: list[str], ind: str) -> str:
        """Lower quantifiers into flag loops appended to ``out``; return the test."""
        if isinstance(f, (m.BoundedAll, m.BoundedSome)):
            flag = f"__q{self.q}"
            self.q += 1
            is_all = isinstance(f, m.BoundedAll)
            out.append(f"{ind}int {flag} = {1 if is_all else 0};")
            out.append(f"{ind}for ({self.ctype} {f.var} = {self.term(f.lo)}; "
                       f"{f.var} <= {self.term(f.hi)}; {f.var}++) {{")
            inner = self.assertion(f.body, out, ind + self.ind)
            if is_all:
                out.append(f"{ind}{self.ind}if (!({inner})) {{ {flag} = 0; break; }}")
            else:
                out.append(f"{ind}{self.ind}if ({inner}) {{ {flag} = 1; break; }}")
            out.append(f"{ind}}}")
            return flag
        if isinstance(f, m.Not):
            return f"!({self.assertion(f.body, out, ind)})"
        if isinstance(f, (m.And, m.Or, m.Implies)):
            a = self.assertion(f.left, out, ind)
            b = self.assertion(f.right, out, ind)
            if isinstance(f, m.And):
                return f"({a}) && ({b})"
            if isinstance(f, m.Or):
                return f"({a}) || ({b})"
            return f"!({a}) || ({b})"
        if isinstance(f, m.Opaque):
            raise OpaqueAssertion(f"assertion is prose: {f.prose!r}")
        return self.cond(f)

    # -- statements ------------------------------------------------------

    def statements(self, c: m.Command) -> list[str]:
        out = []
        for s in m.flatten(c):
            if isinstance(s, m.Hole):
                raise HolePresent(f"unfilled hole: {s.prose!r}")
            if isinstance(s, m.Guard):
                raise ValueError("guard inside a block body")
            if isinstance(s, m.Annot):
                out.append(f"/* {printer.formula(s.formula)} */")
            elif isinstance(s, m.Swap):
                self.helpers.add("swap")
                out.append(f"swap(&{s.a}, &{s.b});")
            else:
                out.extend(self.assign(s))
        return out

    def assign(self, a: m.ParAssign) -> list[str]:
        targets = [self.term(t) for t in a.targets]
        sources = [self.term(s) for s in a.sources]
        if len(targets) == 1:
            return [f"{targets[0]} = {sources[0]};"]
        # sequential writes are fine unless a target is read by a later source or index
        conflict = False
        for i, t in enumerate(a.targets):
            name = t.name if isinstance(t, m.Var) else t.array
            later = list(a.sources[i + 1:]) + [x.index for x in a.targets[i + 1:]
                                               if isinstance(x, m.ArrayRef)]
            for e in later:
                sc, ar = m.free_vars(e)
                if name in sc or name in ar:
                    conflict = True
        if not conflict:
            return [f"{t} = {s};" for t, s in zip(targets, sources)]
        decls = [f"{self.ctype} __t{i} = {s};" for i, s in enumerate(sources)]
        writes = [f"{t} = __t{i};" for i, t in enumerate(targets)]
        return ["{ " + " ".join(decls + writes) + " }"]

    def terminal(self, t: m.Terminal | None) -> str:
        if isinstance(t, m.Goto):
            return f"goto {t.label};"
        if isinstance(t, m.Return):
            return f"return {self.term(t.term)};"
        raise HolePresent("guarded command without goto or return")


_HELPERS = {
    "swap": "static void swap({T} *a, {T} *b) {{ {T} t = *a; *a = *b; *b = t; }}",
    "gcd0": ("static {T} gcd0({T} a, {T} b) {{ while (b != 0) {{ {T} t = a % b; a = b; "
             "b = t; }} return a; }}"),
    "ipow": ("static {T} ipow({T} b, {T} e) {{ {T} r = 1; while (e-- > 0) r *= b; "
             "return r; }}"),
}


def to_c(program: Program, fn_name: str, params: Sequence[str],
         return_var: str | None = None, *, checked: bool = False, wide: bool = False,
         indent: int = 2) -> str:
    """C translation unit holding one function ``fn_name(params...)``.

    Declarations are hoisted to the top of the function, since C does not
    allow a declaration directly after a label.
    """
    ctype = "long long" if wide else "int"
    g = _Gen(program, ctype, " " * indent)
    ind = g.ind
    for p in params:
        d = program.decl(p)
        if d is None or d.is_array:
            raise ValueError(f"parameter {p} is not a declared scalar")
    halt = program.block(program.halt)
    if return_var is not None:
        ret = halt.body.term if isinstance(halt.body, m.ReturnBlock) else halt.body.terminal.term
        if ret != m.Var(return_var):
            raise ValueError(f"halt block does not return {return_var}")

    body: list[str] = []
    for b in program.blocks:
        body.append(f"{b.label}: // {printer.formula(b.assertion)}")
        if checked:
            pre: list[str] = []
            test = g.assertion(m.resolve_assertion(program, b.label), pre, ind + ind)
            if pre:
                body.append(ind + "{")
                body += pre
                body.append(f"{ind}{ind}assert({test});")
                body.append(ind + "}")
            else:
                body.append(f"{ind}assert({test});")
        blk = b.body
        if isinstance(blk, m.AbortBlock):
            body.append(f"{ind}assert(0);")
        elif isinstance(blk, m.ReturnBlock):
            body.append(f"{ind}return {g.term(blk.term)};")
        elif isinstance(blk, m.Straight):
            body.append(ind + " ".join(g.statements(blk.body) + [g.terminal(blk.terminal)]))
        else:
            gcs = blk.commands
            if len(gcs) == 1 and isinstance(gcs[0].guard, m.TrueF):
                body.append(ind + " ".join(g.statements(gcs[0].body)
                                           + [g.terminal(gcs[0].terminal)]))
                continue
            for gc in gcs:
                stmts = " ".join(g.statements(gc.body) + [g.terminal(gc.terminal)])
                body.append(f"{ind}if ({g.cond(gc.guard)}) {{ {stmts} }}")
            body.append(f"{ind}assert(0);")

    used_s, used_a = set(), set()
    for b in program.blocks:
        items = _code_items(b) + ([m.resolve_assertion(program, b.label)] if checked else [])
        s, a = m.free_vars(*items)
        used_s |= s
        used_a |= a
    decls = []
    for d in program.decls:
        if d.name in params:
            continue
        if d.is_array and d.name in used_a:
            init = f"{{{d.init}}}" if d.init else "{0}"
            decls.append(f"{ind}{ctype} {d.name}[{d.size}] = {init};")
        elif not d.is_array and d.name in used_s:
            init = str(d.init or 0)
            if checked and d.name.endswith("0") and d.name[:-1] in params and d.init is None:
                init = d.name[:-1]
            decls.append(f"{ind}{ctype} {d.name} = {init};")

    out = [
        f"/* {fn_name}: generated from a Liffig program.",
        " * Local declarations are hoisted to the top of the function;",
        " * each label carries its assertion as a comment.",
        " */",
        "#include <assert.h>",
        "",
    ]
    for h in ("swap", "gcd0", "ipow"):
        if h in g.helpers:
            out.append(_HELPERS[h].format(T=ctype))
    if g.helpers:
        out.append("")
    sig = ", ".join(f"{ctype} {p}" for p in params)
    out.append(f"{ctype} {fn_name}({sig}) {{")
    out += decls
    out += body
    out.append("}")
    return "\n".join(out) + "\n"


def emit_runtime_checked(program: Program, fn_name: str, params: Sequence[str],
                         return_var: str | None = None, **kw) -> str:
    """Like :func:`to_c`, but each label asserts its assertion at run time."""
    return to_c(program, fn_name, params, return_var, checked=True, **kw)


def _code_items(b: m.Block) -> list:
    items = []
    body = b.body
    if isinstance(body, m.IfFi):
        for gc in body.commands:
            items += [gc.guard, gc.body]
            if isinstance(gc.terminal, m.Return):
                items.append(gc.terminal.term)
    elif isinstance(body, m.Straight):
        items.append(body.body)
        if isinstance(body.terminal, m.Return):
            items.append(body.terminal.term)
    elif isinstance(body, m.ReturnBlock):
        items.append(body.term)
    return items
