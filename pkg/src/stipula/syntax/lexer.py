"""Tokenizer for ``.stipula`` source files (ASCII operator syntax)."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from stipula.errors import LexError

KEYWORDS = frozenset({
    "stipula", "assets", "fields", "agreement",
    "now", "true", "false", "uses", "use_once",
})

# longest match first
OPERATORS = [
    ("->", "ARROW"),
    ("-o", "ASSETARROW"),
    (">>", "EVENTARROW"),
    ("=>", "IMPLIES"),
    ("==", "EQ"),
    ("!=", "NE"),
    ("<=", "LE"),
    (">=", "GE"),
    ("&&", "AND"),
    ("||", "OR"),
    ("<", "LT"),
    (">", "GT"),
    ("!", "NOT"),
    ("+", "PLUS"),
    ("-", "MINUS"),
    ("*", "STAR"),
    ("/", "SLASH"),
    ("@", "AT"),
    ("{", "LBRACE"),
    ("}", "RBRACE"),
    ("(", "LPAREN"),
    (")", "RPAREN"),
    ("[", "LBRACKET"),
    ("]", "RBRACKET"),
    (",", "COMMA"),
    (":", "COLON"),
]

MAX_FRACTION_DIGITS = 4


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def value(self):
        if self.kind == "NUMBER":
            return Decimal(self.text)
        if self.kind == "STRING":
            return _unescape(self.text)
        return self.text


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def _unescape(raw: str) -> str:
    out = []
    it = iter(raw[1:-1])
    for ch in it:
        if ch == "\\":
            out.append(next(it))
        else:
            out.append(ch)
    return "".join(out)


def lex(source: str) -> list[Token]:
    """Split ``source`` into tokens, ending with an ``EOF`` token."""
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                advance(1)
            continue
        start_line, start_col = line, col
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                frac_start = j
                while j < n and source[j].isdigit():
                    j += 1
                if j - frac_start > MAX_FRACTION_DIGITS:
                    raise LexError(start_line, start_col,
                                   f"more than {MAX_FRACTION_DIGITS} fractional digits")
            if j + 1 < n and source[j] == "," and source[j + 1].isdigit():
                raise LexError(line, col + (j - i),
                               "unexpected ',' in number (use '.' as decimal separator)")
            if j < n and _is_ident_char(source[j]):
                raise LexError(start_line, start_col, "malformed number")
            tokens.append(Token("NUMBER", source[i:j], start_line, start_col))
            advance(j - i)
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            word = source[i:j]
            kind = word.upper() if word in KEYWORDS else "IDENT"
            tokens.append(Token(kind, word, start_line, start_col))
            advance(j - i)
            continue
        if ch == '"':
            j = i + 1
            while j < n and source[j] != '"':
                if source[j] == "\\":
                    j += 1
                if j < n and source[j] == "\n":
                    raise LexError(start_line, start_col, "unterminated string")
                j += 1
            if j >= n:
                raise LexError(start_line, start_col, "unterminated string")
            tokens.append(Token("STRING", source[i:j + 1], start_line, start_col))
            advance(j + 1 - i)
            continue
        for text, kind in OPERATORS:
            if source.startswith(text, i):
                # `-o` only when not the start of an identifier such as `-open`
                if kind == "ASSETARROW" and i + 2 < n and _is_ident_char(source[i + 2]):
                    continue
                tokens.append(Token(kind, text, start_line, start_col))
                advance(len(text))
                break
        else:
            raise LexError(start_line, start_col, f"unexpected character {ch!r}")
    tokens.append(Token("EOF", "", line, col))
    return tokens
