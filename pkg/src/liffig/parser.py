"""Parsing Liffig text into :class:`~liffig.model.Program` values.

A source file is a run of declarations followed by labelled blocks.  A
block starts on a line of the form ``L: assertion``; the assertion runs
on over continuation lines until the first line that starts the body
(``if``, ``abort``, ``return``, ``goto``, ``swap``, a string hole, or any
line holding an assignment).  Assertions are parsed as formulas when
possible and kept as opaque prose otherwise, with a warning.  Bodies,
terms and formulas are handled by an ordinary recursive-descent parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import model as m
from .lexer import LexError, Token, tokenize
from .model import INT_MAX, RESERVED, LiffigError, SourceSpan


@dataclass(frozen=True)
class Diagnostic:
    severity: str       # "error" | "warning"
    span: SourceSpan
    message: str
    code: str = "Syntax"

    def __str__(self) -> str:
        return f"{self.span}: {self.severity}: {self.message}"


class ParseError(LiffigError):
    """Raised with every error diagnostic found; no Program is produced."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


class _Fail(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


_COMPARE = frozenset(m.COMPARISONS)


class _Parser:
    def __init__(self, tokens: list[Token], labels=None, eof_span: SourceSpan | None = None):
        self.toks = tokens
        self.pos = 0
        self.labels = labels
        if tokens:
            last = tokens[-1]
            eof_span = SourceSpan(last.line, last.column + last.length, 0)
        self.eof = Token("EOF", "", *(eof_span and (eof_span.line, eof_span.column) or (1, 1)))

    # -- token helpers ---------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else self.eof

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, *texts: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind in ("OP", "KEYWORD") and tok.text in texts

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected '{text}'")
        return self.next()

    def ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "IDENT":
            self.fail("expected identifier")
        return self.next()

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise _Fail(f"{message}, found {found}", tok.span)

    def done(self) -> None:
        if self.peek().kind != "EOF":
            self.fail("unexpected token")

    # -- terms -----------------------------------------------------------

    def term(self) -> m.Term:
        left = self.product()
        while self.at("+", "-"):
            op = self.next()
            left = m.BinOp(op.text, left, self.product(), span=op.span)
        return left

    def product(self) -> m.Term:
        left = self.unary()
        while self.at("*", "/", "mod"):
            op = self.next()
            left = m.BinOp(op.text, left, self.unary(), span=op.span)
        return left

    def unary(self) -> m.Term:
        if self.at("-"):
            op = self.next()
            operand = self.unary()
            if isinstance(operand, m.IntLit):
                return m.IntLit(-operand.value, span=op.span)
            return m.BinOp("-", m.IntLit(0), operand, span=op.span)
        return self.power()

    def power(self) -> m.Term:
        base = self.primary()
        if self.at("^"):
            op = self.next()
            return m.BinOp("^", base, self.unary(), span=op.span)
        return base

    def primary(self) -> m.Term:
        tok = self.peek()
        if tok.kind == "INT":
            self.next()
            value = int(tok.text)
            if value > INT_MAX:
                self.fail("integer literal out of 64-bit range", tok)
            return m.IntLit(value, span=tok.span)
        if tok.kind == "IDENT":
            self.next()
            if self.at("("):
                if tok.text not in m.FUNCTIONS:
                    self.fail(f"unknown function {tok.text!r}", tok)
                args = self.args()
                if len(args) != m.FUNCTIONS[tok.text]:
                    self.fail(f"{tok.text} takes {m.FUNCTIONS[tok.text]} arguments", tok)
                return m.Apply(tok.text, args, span=tok.span)
            if self.accept("["):
                index = self.term()
                self.expect("]")
                return m.ArrayRef(tok.text, index, span=tok.span)
            return m.Var(tok.text, span=tok.span)
        if self.accept("("):
            t = self.term()
            self.expect(")")
            return t
        self.fail("expected term")

    def args(self) -> tuple[m.Term, ...]:
        self.expect("(")
        out = [self.term()]
        while self.accept(","):
            out.append(self.term())
        self.expect(")")
        return tuple(out)

    # -- formulas --------------------------------------------------------

    def formula(self) -> m.Formula:
        left = self.disjunction()
        if self.at("=>"):
            op = self.next()
            return m.Implies(left, self.formula(), span=op.span)
        return left

    def disjunction(self) -> m.Formula:
        left = self.conjunction()
        while self.at("or"):
            op = self.next()
            left = m.Or(left, self.conjunction(), span=op.span)
        return left

    def conjunction(self) -> m.Formula:
        left = self.negation()
        while self.at("&"):
            op = self.next()
            left = m.And(left, self.negation(), span=op.span)
        return left

    def negation(self) -> m.Formula:
        if self.at("!"):
            op = self.next()
            return m.Not(self.negation(), span=op.span)
        if self.at("all", "some"):
            return self.quantifier()
        return self.atom()

    def quantifier(self) -> m.BoundedAll | m.BoundedSome:
        kw = self.next()
        var = self.ident().text
        self.expect("in")
        lo = self.term()
        self.expect("..")
        hi = self.term()
        self.expect(":")
        body = self.formula()
        cls = m.BoundedAll if kw.text == "all" else m.BoundedSome
        return cls(var, lo, hi, body, span=kw.span)

    def atom(self) -> m.Formula:
        tok = self.peek()
        if self.accept("true"):
            return m.TrueF(span=tok.span)
        if self.accept("false"):
            return m.FalseF(span=tok.span)
        if tok.kind == "IDENT" and tok.text in m.PREDICATES and self.at("(", k=1):
            self.next()
            args = self.args()
            if len(args) != m.PREDICATES[tok.text]:
                self.fail(f"{tok.text} takes {m.PREDICATES[tok.text]} arguments", tok)
            return m.Pred(tok.text, args, span=tok.span)
        save = self.pos
        try:
            left = self.term()
            if self.peek().kind == "OP" and self.peek().text in _COMPARE:
                return self.comparison_chain(left)
        except _Fail:
            pass
        self.pos = save
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if tok.kind == "IDENT":
            if self.labels is not None and tok.text not in self.labels:
                self.fail(f"{tok.text!r} is not a label")
            self.next()
            return m.LabelRef(tok.text, span=tok.span)
        self.fail("expected formula")

    def comparison_chain(self, left: m.Term) -> m.Formula:
        # 2 <= k < n reads as 2 <= k & k < n
        result = None
        while self.peek().kind == "OP" and self.peek().text in _COMPARE:
            op = self.next()
            right = self.term()
            cmp = m.Compare(op.text, left, right, span=op.span)
            result = cmp if result is None else m.And(result, cmp, span=op.span)
            left = right
        return result

    # -- statements and bodies -------------------------------------------

    def annotation(self, tok: Token) -> m.Annot:
        return m.Annot(formula_or_opaque(tok.text, self.labels, tok.span), span=tok.span)

    def statement(self) -> m.Command:
        tok = self.peek()
        if self.accept("swap"):
            self.expect("(")
            a = self.ident().text
            self.expect(",")
            b = self.ident().text
            self.expect(")")
            return m.Swap(a, b, span=tok.span)
        targets = [self.lhs()]
        while self.accept(","):
            targets.append(self.lhs())
        if self.at("+=", "-="):
            op = self.next()
            if len(targets) != 1:
                self.fail("compound assignment takes a single target", op)
            value = m.BinOp(op.text[0], targets[0], self.term(), span=op.span)
            return m.ParAssign((targets[0],), (value,), span=tok.span)
        self.expect(":=")
        sources = [self.term()]
        while self.accept(","):
            sources.append(self.term())
        if len(sources) != len(targets):
            self.fail(f"{len(targets)} targets but {len(sources)} sources", tok)
        names = [t.name for t in targets if isinstance(t, m.Var)]
        dup = next((n for n in names if names.count(n) > 1), None)
        if dup is not None:
            raise _Fail(f"{dup} assigned twice in one parallel assignment", tok.span)
        return m.ParAssign(tuple(targets), tuple(sources), span=tok.span)

    def lhs(self) -> m.Var | m.ArrayRef:
        tok = self.ident()
        if self.accept("["):
            index = self.term()
            self.expect("]")
            return m.ArrayRef(tok.text, index, span=tok.span)
        return m.Var(tok.text, span=tok.span)

    def terminal(self) -> m.Terminal | None:
        tok = self.peek()
        if self.accept("goto"):
            return m.Goto(self.ident().text, span=tok.span)
        if self.accept("return"):
            return m.Return(self.term(), span=tok.span)
        return None

    def statements(self) -> tuple[list[m.Command], m.Terminal | None]:
        stmts: list[m.Command] = []
        while True:
            if self.at("goto", "return"):
                return stmts, self.terminal()
            tok = self.peek()
            if tok.kind == "ANNOT":
                self.next()
                stmts.append(self.annotation(tok))
                self.accept(";")
                continue
            if tok.kind == "HOLE":
                self.next()
                stmts.append(m.Hole(tok.text, span=tok.span))
                self.accept(";")
                continue
            if tok.kind == "IDENT" or self.at("swap"):
                stmts.append(self.statement())
                if not self.accept(";") and not self.at("goto", "return"):
                    self.fail("expected ';'")
                continue
            if stmts and isinstance(stmts[-1], m.Hole):
                return stmts, None
            self.fail("expected statement, 'goto' or 'return'")

    def guarded_command(self) -> m.GuardedCommand:
        start = self.peek()
        guard = self.formula()
        stmts: list[m.Command] = []
        while self.peek().kind == "ANNOT":
            stmts.append(self.annotation(self.next()))
        self.expect("->")
        more, terminal = self.statements()
        return m.GuardedCommand(guard, _seq(stmts + more), terminal, span=start.span)

    def body(self) -> m.Body:
        tok = self.peek()
        if self.accept("if"):
            gcs = [self.guarded_command()]
            while self.accept("|"):
                gcs.append(self.guarded_command())
            self.expect("fi")
            return m.IfFi(tuple(gcs), span=tok.span)
        if self.accept("abort"):
            return m.AbortBlock(span=tok.span)
        stmts, terminal = self.statements()
        if not stmts and isinstance(terminal, m.Return):
            return m.ReturnBlock(terminal.term, span=tok.span)
        return m.Straight(_seq(stmts), terminal, span=tok.span)


def _seq(stmts: list[m.Command]) -> m.Seq:
    return m.Seq(tuple(stmts), span=stmts[0].span if stmts else None)


def _run(text: str, rule: str, labels=None, line: int = 1, column: int = 1):
    p = _Parser(tokenize(text, line, column), labels, SourceSpan(line, column, 0))
    result = getattr(p, rule)()
    p.done()
    return result


def parse_formula(text: str, labels=None) -> m.Formula:
    """Parse an assertion.  Bare identifiers are label references; when
    ``labels`` is given they must name one of them."""
    try:
        return _run(text, "formula", labels)
    except _Fail as e:
        raise ParseError([Diagnostic("error", e.span, e.message)]) from None
    except LexError as e:
        raise ParseError([Diagnostic("error", e.span, e.message, e.kind)]) from None


def parse_term(text: str) -> m.Term:
    try:
        return _run(text, "term")
    except _Fail as e:
        raise ParseError([Diagnostic("error", e.span, e.message)]) from None
    except LexError as e:
        raise ParseError([Diagnostic("error", e.span, e.message, e.kind)]) from None


def formula_or_opaque(text: str, labels=None, span: SourceSpan | None = None) -> m.Formula:
    try:
        return _run(text, "formula", labels, *(span and (span.line, span.column) or (1, 1)))
    except (_Fail, LexError):
        return m.Opaque(text, span=span)


def parse_command(text: str, labels=None) -> m.Command:
    """Parse ``;``-separated command text as it appears in a condition list.

    Elements that are not statements are read as guards, so ``x>y; swap(x, y)``
    becomes ``Seq(Guard(x>y), Swap(x, y))``.
    """
    try:
        return _command(text, labels)
    except _Fail as e:
        raise ParseError([Diagnostic("error", e.span, e.message)]) from None
    except LexError as e:
        raise ParseError([Diagnostic("error", e.span, e.message, e.kind)]) from None


def _command(text: str, labels) -> m.Command:
    p = _Parser(tokenize(text), labels)
    items: list[m.Command] = []
    while p.peek().kind != "EOF":
        tok = p.peek()
        if tok.kind == "ANNOT":
            p.next()
            items.append(p.annotation(tok))
        elif tok.kind == "HOLE":
            p.next()
            items.append(m.Hole(tok.text, span=tok.span))
        elif p.at("swap") or _looks_like_assignment(p):
            items.append(p.statement())
        else:
            items.append(m.Guard(p.formula(), span=tok.span))
        if not p.accept(";") and p.peek().kind not in ("EOF", "ANNOT", "HOLE"):
            p.fail("expected ';'")
    return m.Seq(tuple(items))


def _looks_like_assignment(p: _Parser) -> bool:
    save = p.pos
    try:
        p.lhs()
        while p.accept(","):
            p.lhs()
        return p.at(":=", "+=", "-=")
    except _Fail:
        return False
    finally:
        p.pos = save


# -- whole programs --------------------------------------------------------

_LABEL_LINE = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*:(?!=)")
_BODY_WORDS = frozenset(["if", "abort", "return", "goto", "swap", "fi"])


def _line_states(lines: list[str]) -> list[tuple[bool, str]]:
    """For each line: whether it starts outside any string or ``{}`` group,
    and the line with group contents and ``//`` comments blanked out."""
    out = []
    in_str = in_brace = False
    for line in lines:
        top = not (in_str or in_brace)
        visible = []
        i = 0
        while i < len(line):
            ch = line[i]
            if in_str:
                in_str = ch != '"'
                visible.append(" ")
            elif in_brace:
                in_brace = ch != "}"
                visible.append(" ")
            elif line.startswith("//", i):
                break
            elif ch == '"':
                in_str = True
                visible.append('"')
            elif ch == "{":
                in_brace = True
                visible.append("{")
            else:
                visible.append(ch)
            i += 1
        out.append((top, "".join(visible)))
    return out


def _starts_body(visible: str) -> bool:
    s = visible.strip()
    if not s:
        return False
    if s[0] in '"|':
        return True
    first = re.match(r"[A-Za-z][A-Za-z0-9_]*", s)
    if first and first.group(0) in _BODY_WORDS:
        return True
    return any(op in s for op in (":=", "+=", "-=")) or re.search(r"\bgoto\b", s) is not None


def _strip_comment(text: str) -> str:
    cut = text.find("//")
    return text if cut < 0 else text[:cut]


@dataclass
class _RawBlock:
    label: str
    span: SourceSpan
    assertion: str
    assertion_span: SourceSpan
    body_text: str
    body_line: int


def _split(source: str) -> tuple[str, list[_RawBlock]]:
    lines = source.split("\n")
    states = _line_states(lines)
    starts = []
    for i, (top, visible) in enumerate(states):
        mt = _LABEL_LINE.match(visible) if top else None
        if mt and mt.group(1) not in RESERVED:
            starts.append((i, mt))
    preamble = "\n".join(lines[:starts[0][0]] if starts else lines)
    blocks = []
    for n, (i, mt) in enumerate(starts):
        end = starts[n + 1][0] if n + 1 < len(starts) else len(lines)
        label = mt.group(1)
        rest_col = mt.end()
        head = lines[i][rest_col:]
        parts = []
        body_start = end
        if _starts_body(states[i][1][rest_col:]):
            body_start = i
        else:
            parts.append(_strip_comment(head))
            for j in range(i + 1, end):
                if _starts_body(states[j][1]):
                    body_start = j
                    break
                parts.append(_strip_comment(lines[j]))
        text = " ".join(" ".join(parts).split())
        if text.startswith("{") and text.endswith("}") and text.count("{") == 1:
            text = text[1:-1].strip()
        lead = len(head) - len(head.lstrip())
        if body_start == i:
            body_text = " " * rest_col + head
        else:
            body_text = "\n".join(lines[body_start:end])
        blocks.append(_RawBlock(
            label=label,
            span=SourceSpan(i + 1, mt.start(1) + 1, len(label)),
            assertion=text,
            assertion_span=SourceSpan(i + 1, rest_col + lead + 1, len(text)),
            body_text=body_text,
            body_line=body_start + 1,
        ))
    return preamble, blocks


def _parse_decls(text: str) -> list[m.Decl]:
    p = _Parser(tokenize(text))
    decls = []
    while p.peek().kind != "EOF":
        p.expect("int")
        while True:
            tok = p.ident()
            size = init = None
            if p.accept("["):
                size_tok = p.peek()
                if size_tok.kind != "INT" or int(size_tok.text) < 1:
                    p.fail("array size must be a positive integer")
                p.next()
                size = int(size_tok.text)
                p.expect("]")
            if p.accept(":="):
                neg = p.accept("-")
                val = p.peek()
                if val.kind != "INT":
                    p.fail("expected integer initializer")
                p.next()
                init = -int(val.text) if neg else int(val.text)
            decls.append(m.Decl(tok.text, size, init, span=tok.span))
            if not p.accept(","):
                break
        p.accept(";")
    return decls


def parse_decls(text: str) -> list[m.Decl]:
    """Declarations such as ``int p[1000], n := 1;``."""
    try:
        return _parse_decls(text)
    except _Fail as e:
        raise ParseError([Diagnostic("error", e.span, e.message)]) from None
    except LexError as e:
        raise ParseError([Diagnostic("error", e.span, e.message, e.kind)]) from None


def parse_program(source: str) -> m.Program:
    """Parse and check a Liffig program.

    Raises :class:`ParseError` carrying every error found.  Warnings
    (opaque assertions, implicitly declared scalars) are attached to the
    returned program as ``program.warnings``.
    """
    diagnostics: list[Diagnostic] = []
    try:
        preamble, raw = _split(source)
        decls = _parse_decls(preamble)
    except _Fail as e:
        raise ParseError([Diagnostic("error", e.span, e.message)]) from None
    except LexError as e:
        raise ParseError([Diagnostic("error", e.span, e.message, e.kind)]) from None
    if not raw:
        raise ParseError([Diagnostic("error", SourceSpan(1, 1, 0), "program has no blocks",
                                     "NoBlocks")])
    labels = {rb.label for rb in raw}
    blocks = []
    for rb in raw:
        if not rb.assertion:
            assertion = m.TrueF(span=rb.assertion_span)
            diagnostics.append(Diagnostic("warning", rb.span,
                                          f"block {rb.label} has no assertion; using true",
                                          "EmptyAssertion"))
        else:
            assertion = formula_or_opaque(rb.assertion, labels, rb.assertion_span)
            if isinstance(assertion, m.Opaque):
                diagnostics.append(Diagnostic(
                    "warning", rb.assertion_span,
                    f"assertion of {rb.label} is not a formula; kept as prose", "OpaqueAssertion"))
        try:
            p = _Parser(tokenize(rb.body_text, rb.body_line, 1), labels,
                        SourceSpan(rb.body_line, 1, 0))
            body = p.body()
            p.done()
        except _Fail as e:
            diagnostics.append(Diagnostic("error", e.span, e.message))
            continue
        except LexError as e:
            diagnostics.append(Diagnostic("error", e.span, e.message, e.kind))
            continue
        blocks.append(m.Block(rb.label, assertion, body, span=rb.span))
    if any(d.severity == "error" for d in diagnostics):
        raise ParseError([d for d in diagnostics if d.severity == "error"])
    return build_program(decls, blocks, diagnostics)


class _Ordered(dict):
    def add(self, key):
        self.setdefault(key, None)

    def update(self, keys):
        for k in keys:
            self.add(k)


def gotos(block: m.Block) -> list[m.Goto]:
    body = block.body
    if isinstance(body, m.IfFi):
        return [gc.terminal for gc in body.commands if isinstance(gc.terminal, m.Goto)]
    if isinstance(body, m.Straight) and isinstance(body.terminal, m.Goto):
        return [body.terminal]
    return []


def _block_items(block: m.Block) -> list:
    items: list = [block.assertion]
    body = block.body
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


def build_program(decls, blocks, warnings=()) -> m.Program:
    """Assemble a Program, enforcing structural well-formedness.

    Undeclared scalars are declared implicitly (initial value 0) in order
    of first use, with a warning; undeclared arrays are errors.
    """
    errors: list[Diagnostic] = []
    warnings = list(warnings)
    here = SourceSpan(1, 1, 0)

    def err(code, message, span=None):
        errors.append(Diagnostic("error", span or here, message, code))

    explicit = [d for d in decls if not d.implicit]
    seen_decl: dict[str, m.Decl] = {}
    for d in explicit:
        if d.name in seen_decl:
            err("DuplicateDeclaration", f"variable {d.name} declared twice", d.span)
        seen_decl[d.name] = d

    seen: set[str] = set()
    for b in blocks:
        if b.label in seen:
            err("DuplicateLabel", f"label {b.label} defined twice", b.span)
        seen.add(b.label)
    if not blocks:
        err("NoBlocks", "program has no blocks")
    for b in blocks:
        if isinstance(b.body, m.IfFi) and not b.body.commands:
            err("EmptyIf", f"if...fi of {b.label} has no guarded commands", b.span)
        for g in gotos(b):
            if g.label not in seen:
                err("UnknownGotoTarget", f"goto {g.label}: no such label", g.span or b.span)
        for ref in m.label_refs(b.assertion):
            if ref not in seen:
                err("UnknownLabel", f"assertion of {b.label} refers to unknown label {ref}",
                    b.span)
    if not errors:
        assertions = {b.label: b.assertion for b in blocks}
        for b in blocks:
            try:
                m.resolve_formula(b.assertion, assertions)
            except m.CyclicReference as e:
                err("CyclicReference", f"cyclic label reference {e}", b.span)
                break

    scalars, arrays = _Ordered(), _Ordered()
    first_use: dict[str, SourceSpan] = {}
    for b in blocks:
        for item in _block_items(b):
            s, a = _Ordered(), _Ordered()
            if isinstance(item, (m.IntLit, m.Var, m.ArrayRef, m.BinOp, m.Apply)):
                m.term_vars(item, s, a)
            elif isinstance(item, (m.ParAssign, m.Swap, m.Guard, m.Hole, m.Seq, m.Annot)):
                m.command_vars(item, s, a)
            else:
                m.formula_vars(item, s, a)
            for name in s:
                first_use.setdefault(name, b.span or here)
            scalars.update(s)
            arrays.update(a)
    for name in arrays:
        d = seen_decl.get(name)
        if d is None:
            err("ArrayUndeclared", f"array {name} is not declared")
        elif not d.is_array:
            err("TypeMismatch", f"scalar {name} used as an array", d.span)
    implicit = []
    for name in scalars:
        d = seen_decl.get(name)
        if d is None:
            if name in arrays:
                continue
            implicit.append(m.Decl(name, implicit=True))
            warnings.append(Diagnostic("warning", first_use[name],
                                       f"variable {name} implicitly declared (initially 0)",
                                       "ImplicitDeclaration"))
        elif d.is_array:
            err("TypeMismatch", f"array {name} used as a scalar", d.span)

    halts = [b.label for b in blocks if b.returns]
    if blocks and not halts:
        err("NoHaltBlock", "no block returns a value")
    if errors:
        raise ParseError(errors)
    return m.Program(
        decls=tuple(explicit) + tuple(implicit),
        blocks=tuple(blocks),
        start=blocks[0].label,
        halt=halts[-1],
        warnings=tuple(warnings),
    )
