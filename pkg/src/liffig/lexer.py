"""Tokenizer for Liffig source text."""

from __future__ import annotations

from dataclasses import dataclass

from .model import RESERVED, LiffigError, SourceSpan

# longest first
OPERATORS = (
    ":=", "->", "=>", "..", "+=", "-=", "!=", "<=", ">=",
    "=", "<", ">", "+", "-", "*", "/", "^", "&", ",", ";", ":",
    "(", ")", "[", "]", "|", "!",
)


class LexError(LiffigError):
    def __init__(self, kind: str, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.kind = kind
        self.message = message
        self.span = span


class UnterminatedComment(LexError):
    pass


class UnterminatedString(LexError):
    pass


class IllegalCharacter(LexError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str       # IDENT, INT, KEYWORD, OP, ANNOT, HOLE, EOF
    text: str
    line: int
    column: int
    length: int = 0

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, self.length)

    def __repr__(self) -> str:
        if self.kind in ("OP", "KEYWORD"):
            return self.text
        return f"{self.kind.capitalize()} {self.text}"


def tokenize(source: str, line: int = 1, column: int = 1) -> list[Token]:
    """Split ``source`` into tokens.

    ``{...}`` groups become single ANNOT tokens carrying their stripped
    inner text and ``"..."`` strings become HOLE tokens; both may span
    lines.  ``//`` starts a comment running to the end of the line.
    ``line``/``column`` give the position of the first character, so a
    fragment cut out of a larger file still reports true positions.
    """
    tokens: list[Token] = []
    i, n = 0, len(source)
    ln, col = line, column

    def advance(upto: int) -> None:
        nonlocal i, ln, col
        while i < upto:
            if source[i] == "\n":
                ln += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(i + 1)
            continue
        if source.startswith("//", i):
            end = source.find("\n", i)
            advance(n if end < 0 else end)
            continue
        start_ln, start_col = ln, col
        if ch == "{":
            end = source.find("}", i + 1)
            nested = source.find("{", i + 1)
            if end < 0 or (0 <= nested < end):
                raise UnterminatedComment("UnterminatedComment", "unterminated '{' group",
                                          SourceSpan(start_ln, start_col, 1))
            text = " ".join(source[i + 1:end].split())
            tokens.append(Token("ANNOT", text, start_ln, start_col, end + 1 - i))
            advance(end + 1)
            continue
        if ch == '"':
            end = source.find('"', i + 1)
            if end < 0:
                raise UnterminatedString("UnterminatedString", "unterminated string",
                                         SourceSpan(start_ln, start_col, 1))
            text = " ".join(source[i + 1:end].split())
            tokens.append(Token("HOLE", text, start_ln, start_col, end + 1 - i))
            advance(end + 1)
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("INT", source[i:j], start_ln, start_col, j - i))
            advance(j)
            continue
        if ch.isascii() and ch.isalpha():
            j = i
            while j < n and source[j].isascii() and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = "KEYWORD" if word in RESERVED else "IDENT"
            tokens.append(Token(kind, word, start_ln, start_col, j - i))
            advance(j)
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("OP", op, start_ln, start_col, len(op)))
                advance(i + len(op))
                break
        else:
            raise IllegalCharacter("IllegalCharacter", f"illegal character {ch!r}",
                                   SourceSpan(start_ln, start_col, 1))
    return tokens
