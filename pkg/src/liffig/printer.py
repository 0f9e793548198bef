"""Canonical Liffig text for terms, formulas, commands and programs.

The output re-parses to a structurally identical value.
"""

from __future__ import annotations

from . import model as m

# binding strength; larger binds tighter
_TERM_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "mod": 2, "^": 4}


def term(t: m.Term, prec: int = 0) -> str:
    if isinstance(t, m.IntLit):
        s = str(t.value)
        return f"({s})" if t.value < 0 and prec >= 3 else s
    if isinstance(t, m.Var):
        return t.name
    if isinstance(t, m.ArrayRef):
        return f"{t.array}[{term(t.index)}]"
    if isinstance(t, m.Apply):
        return f"{t.fn}({','.join(term(a) for a in t.args)})"
    if isinstance(t, m.BinOp):
        p = _TERM_PREC[t.op]
        if t.op == "^":
            # right associative; exponent parsed at unary level
            s = f"{term(t.left, 5)}^{term(t.right, 3)}"
        elif t.op in ("+", "-"):
            s = f"{term(t.left, p)} {t.op} {term(t.right, p + 1)}"
        elif t.op == "mod":
            s = f"{term(t.left, p)} mod {term(t.right, p + 1)}"
        else:
            s = f"{term(t.left, p)}{t.op}{term(t.right, p + 1)}"
        return f"({s})" if p < prec else s
    raise TypeError(t)


# formula levels: 1 implies, 2 or, 3 and, 4 not/atoms
def formula(f: m.Formula, prec: int = 0) -> str:
    if isinstance(f, m.TrueF):
        return "true"
    if isinstance(f, m.FalseF):
        return "false"
    if isinstance(f, m.Compare):
        return f"{term(f.left)} {f.op} {term(f.right)}"
    if isinstance(f, m.Pred):
        return f"{f.name}({', '.join(term(a) for a in f.args)})"
    if isinstance(f, m.LabelRef):
        return f.label
    if isinstance(f, m.Opaque):
        return f.prose
    if isinstance(f, m.Not):
        return f"!{formula(f.body, 4)}"
    if isinstance(f, m.Implies):
        s = f"{formula(f.left, 2)} => {formula(f.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(f, m.Or):
        s = f"{formula(f.left, 2)} or {formula(f.right, 3)}"
        return f"({s})" if prec > 2 else s
    if isinstance(f, m.And):
        s = f"{formula(f.left, 3)} & {formula(f.right, 4)}"
        return f"({s})" if prec > 3 else s
    if isinstance(f, (m.BoundedAll, m.BoundedSome)):
        kw = "all" if isinstance(f, m.BoundedAll) else "some"
        s = f"{kw} {f.var} in {term(f.lo)}..{term(f.hi)} : {formula(f.body)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(f)


def statement(c: m.Command) -> str:
    if isinstance(c, m.ParAssign):
        return f"{', '.join(term(t) for t in c.targets)} := {', '.join(term(s) for s in c.sources)}"
    if isinstance(c, m.Swap):
        return f"swap({c.a}, {c.b})"
    if isinstance(c, m.Hole):
        return f'"{c.prose}"'
    if isinstance(c, m.Annot):
        return "{ " + formula(c.formula) + " }"
    if isinstance(c, m.Guard):
        return formula(c.formula)
    if isinstance(c, m.Seq):
        return command(c)
    raise TypeError(c)


def command(c: m.Command) -> str:
    """Command text in condition-list form: ``guard; stmt; stmt``."""
    return "; ".join(statement(s) for s in m.flatten(c))


def terminal(t: m.Terminal | None) -> str:
    if isinstance(t, m.Goto):
        return f"goto {t.label}"
    if isinstance(t, m.Return):
        return f"return {term(t.term)}"
    return ""


def _stmt_line(body: m.Command, term_: m.Terminal | None) -> str:
    parts = []
    for s in m.flatten(body):
        if isinstance(s, m.Guard):
            raise ValueError("guard statement inside a block body")
        parts.append(statement(s) + ("" if isinstance(s, m.Annot) else ";"))
    if term_ is not None:
        parts.append(terminal(term_))
    elif parts and parts[-1].endswith(";"):
        parts[-1] = parts[-1][:-1]
    return " ".join(parts)


def block(b: m.Block) -> str:
    lines = [f"{b.label}: {formula(b.assertion)}"]
    body = b.body
    if isinstance(body, m.IfFi):
        for i, gc in enumerate(body.commands):
            lead = "  if" if i == 0 else "   |"
            lines.append(f"{lead} {formula(gc.guard)} -> {_stmt_line(gc.body, gc.terminal)}")
        lines.append("  fi")
    elif isinstance(body, m.AbortBlock):
        lines.append("  abort")
    elif isinstance(body, m.ReturnBlock):
        lines.append(f"  return {term(body.term)}")
    else:
        lines.append("  " + _stmt_line(body.body, body.terminal))
    return "\n".join(lines)


def decl(d: m.Decl) -> str:
    s = f"int {d.name}"
    if d.size is not None:
        s += f"[{d.size}]"
    if d.init is not None:
        s += f" := {d.init}"
    return s + ";"


def program(p: m.Program) -> str:
    out = [decl(d) for d in p.decls if not d.implicit]
    out += [block(b) for b in p.blocks]
    return "\n".join(out) + "\n"


pretty_print = program
