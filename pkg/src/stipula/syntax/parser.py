"""Recursive-descent parser producing a :class:`ContractDecl`.

Expression precedence, loosest first::

    ||   &&   !   == != < <= > >=   + -   * /   atoms

Destinations of ``->`` and ``-o`` are classified while parsing: a name that
is one of the agreement's parties makes the statement a send, anything else
is treated as a field or asset (the checker reports unknown names).
"""

from __future__ import annotations

from stipula.errors import ParseError
from stipula.syntax import ast as A
from stipula.syntax.lexer import Token, lex

REL_OPS = {"EQ": "==", "NE": "!=", "LT": "<", "LE": "<=", "GT": ">", "GE": ">="}
ADD_OPS = {"PLUS": "+", "MINUS": "-"}
MUL_OPS = {"STAR": "*", "SLASH": "/"}


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.parties: frozenset[str] = frozenset()
        # start index of a parenthesised group -> index just past its ')'
        self._groups: dict[int, int] = {}

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    def take(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.tok.kind != kind:
            self.error(f"expected {what or kind}, found {self._describe(self.tok)}")
        return self.take()

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            return self.take()
        return None

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(tok.line, tok.col, message)

    @staticmethod
    def _describe(tok: Token) -> str:
        return "end of input" if tok.kind == "EOF" else repr(tok.text)

    @staticmethod
    def span(tok: Token) -> A.Span:
        return A.Span(tok.line, tok.col)

    def ident(self, what: str = "identifier") -> str:
        return self.expect("IDENT", what).text

    def ident_list(self, closer: str) -> tuple[str, ...]:
        names = []
        if not self.at(closer):
            names.append(self.ident())
            while self.accept("COMMA"):
                names.append(self.ident())
        self.expect(closer, f"',' or {closer}")
        return tuple(names)

    # -- contract ------------------------------------------------------------

    def contract(self) -> A.ContractDecl:
        start = self.expect("STIPULA", "'stipula'")
        name = self.ident("contract name")
        self.expect("LBRACE", "'{'")
        assets: tuple[str, ...] = ()
        fields: tuple[str, ...] = ()
        if self.accept("ASSETS"):
            assets = self.name_seq()
        if self.accept("FIELDS"):
            fields = self.name_seq()
        agreement = self.agreement()
        self.parties = frozenset(agreement.parties)
        functions = []
        while self.at("AT"):
            functions.append(self.function())
        self.expect("RBRACE", "'@' or '}'")
        self.expect("EOF", "end of input")
        return A.ContractDecl(name, assets, fields, agreement, tuple(functions),
                              span=self.span(start))

    def name_seq(self) -> tuple[str, ...]:
        names = [self.ident()]
        while self.accept("COMMA"):
            names.append(self.ident())
        return tuple(names)

    def agreement(self) -> A.AgreementDecl:
        start = self.expect("AGREEMENT", "'agreement'")
        self.expect("LPAREN", "'('")
        parties = self.ident_list("RPAREN")
        self.expect("LPAREN", "'('")
        init_fields = self.ident_list("RPAREN")
        self.expect("LBRACE", "'{'")
        groups = []
        while not self.at("RBRACE"):
            who = self.name_seq()
            self.expect("COLON", "':'")
            groups.append((who, self.name_seq()))
        self.expect("RBRACE")
        self.expect("IMPLIES", "'=>'")
        state = self.state_ref()
        return A.AgreementDecl(parties, init_fields, tuple(groups), state,
                               span=self.span(start))

    def state_ref(self) -> str:
        self.expect("AT", "'@'")
        return self.ident("state name")

    def function(self) -> A.FunctionDecl:
        start = self.tok
        state = self.state_ref()
        caller = self.ident("caller")
        self.expect("COLON", "':'")
        name = self.ident("function name")
        params: tuple[str, ...] = ()
        asset_params: tuple[str, ...] = ()
        precondition = None
        if self.at("LPAREN") and self._is_param_list():
            self.take()
            params = self.ident_list("RPAREN")
        if self.accept("LBRACKET"):
            asset_params = self.ident_list("RBRACKET")
        if self.accept("LPAREN"):
            precondition = self.expr()
            self.expect("RPAREN", "')'")
        self.expect("LBRACE", "'{'")
        body, events = self.body()
        self.expect("RBRACE", "'}'")
        self.expect("IMPLIES", "'=>'")
        next_state = self.state_ref()
        return A.FunctionDecl(state, caller, name, params, asset_params, precondition,
                              body, events, next_state, span=self.span(start))

    def _is_param_list(self) -> bool:
        k = 1
        if self.peek(k).kind == "RPAREN":
            return True
        while True:
            if self.peek(k).kind != "IDENT":
                return False
            k += 1
            if self.peek(k).kind == "RPAREN":
                return True
            if self.peek(k).kind != "COMMA":
                return False
            k += 1

    def body(self) -> tuple[tuple, tuple]:
        stmts: list = []
        events: list = []
        while not self.at("RBRACE"):
            start_tok = self.tok
            start = self.pos
            e = self.expr()
            if self.at("EVENTARROW"):
                events.append(self.event_rest(e, start_tok))
            elif events:
                self.error("statements must precede events", start_tok)
            else:
                stmts.append(self.stmt_rest(e, start, start_tok))
        return tuple(stmts), tuple(events)

    def stmts(self) -> tuple:
        out = []
        while not self.at("RBRACE"):
            start_tok = self.tok
            start = self.pos
            e = self.expr()
            if self.at("EVENTARROW"):
                self.error("events cannot be nested here", self.tok)
            out.append(self.stmt_rest(e, start, start_tok))
        return tuple(out)

    def stmt_rest(self, e: A.Expr, start: int, start_tok: Token) -> A.Stmt:
        sp = self.span(start_tok)
        if self.at("LBRACE") and self._groups.get(start) == self.pos:
            self.take()
            body = self.stmts()
            self.expect("RBRACE", "'}'")
            return A.If(e, body, span=sp)
        if self.accept("ARROW"):
            dest = self.ident("destination")
            if dest in self.parties:
                return A.ValueSend(e, dest, span=sp)
            return A.FieldAssign(e, dest, span=sp)
        if self.accept("ASSETARROW"):
            first = self.ident("asset")
            if self.accept("COMMA"):
                source, dest = first, self.ident("destination")
            else:
                if not isinstance(e, A.Name):
                    self.error("shorthand 'E -o X' needs E to be an asset name", start_tok)
                source, dest = e.id, first
            if dest in self.parties:
                return A.AssetSend(e, source, dest, span=sp)
            return A.AssetMove(e, source, dest, span=sp)
        self.error(f"expected '->', '-o', '>>' or '{{', found {self._describe(self.tok)}")

    def event_rest(self, guard: A.Expr, start_tok: Token) -> A.EventDecl:
        self.expect("EVENTARROW")
        state = self.state_ref()
        self.expect("LBRACE", "'{'")
        handler = self.stmts()
        self.expect("RBRACE", "'}'")
        self.expect("IMPLIES", "'=>'")
        next_state = self.state_ref()
        return A.EventDecl(guard, state, handler, next_state, span=self.span(start_tok))

    # -- expressions ---------------------------------------------------------

    def expr(self) -> A.Expr:
        return self.or_expr()

    def or_expr(self) -> A.Expr:
        left = self.and_expr()
        while self.at("OR"):
            t = self.take()
            left = A.BoolOp("||", left, self.and_expr(), span=self.span(t))
        return left

    def and_expr(self) -> A.Expr:
        left = self.not_expr()
        while self.at("AND"):
            t = self.take()
            left = A.BoolOp("&&", left, self.not_expr(), span=self.span(t))
        return left

    def not_expr(self) -> A.Expr:
        if self.at("NOT"):
            t = self.take()
            return A.Not(self.not_expr(), span=self.span(t))
        return self.rel_expr()

    def rel_expr(self) -> A.Expr:
        left = self.add_expr()
        if self.tok.kind in REL_OPS:
            t = self.take()
            left = A.Rel(REL_OPS[t.kind], left, self.add_expr(), span=self.span(t))
            if self.tok.kind in REL_OPS:
                self.error("comparison operators do not chain; add parentheses")
        return left

    def add_expr(self) -> A.Expr:
        left = self.mul_expr()
        while self.tok.kind in ADD_OPS:
            t = self.take()
            left = A.Arith(ADD_OPS[t.kind], left, self.mul_expr(), span=self.span(t))
        return left

    def mul_expr(self) -> A.Expr:
        left = self.atom()
        while self.tok.kind in MUL_OPS:
            t = self.take()
            left = A.Arith(MUL_OPS[t.kind], left, self.atom(), span=self.span(t))
        return left

    def atom(self) -> A.Expr:
        t = self.tok
        sp = self.span(t)
        kind = t.kind
        if kind == "NOW":
            self.take()
            return A.Now(span=sp)
        if kind == "NUMBER":
            self.take()
            return A.RealLit(t.value, span=sp)
        if kind == "STRING":
            self.take()
            return A.StringLit(t.value, span=sp)
        if kind in ("TRUE", "FALSE"):
            self.take()
            return A.BoolLit(kind == "TRUE", span=sp)
        if kind == "IDENT":
            self.take()
            return A.Name(t.text, span=sp)
        if kind in ("USES", "USE_ONCE"):
            self.take()
            self.expect("LPAREN", "'('")
            asset = self.ident("asset")
            party = None
            if kind == "USES" and self.accept("COMMA"):
                party = self.ident("party")
            self.expect("RPAREN", "')'")
            return A.Intrinsic(t.text, asset, party, span=sp)
        if kind == "LPAREN":
            start = self.pos
            self.take()
            inner = self.expr()
            if self.accept("COMMA"):
                second = self.expr()
                self.expect("RPAREN", "')'")
                return A.Pair(inner, second, span=sp)
            self.expect("RPAREN", "')'")
            self._groups[start] = self.pos
            return inner
        self.error(f"expected an expression, found {self._describe(t)}")


def parse(tokens: list[Token]) -> A.ContractDecl:
    return Parser(tokens).contract()


def parse_source(source: str) -> A.ContractDecl:
    return parse(lex(source))


def parse_file(path) -> A.ContractDecl:
    with open(path, encoding="utf-8") as fh:
        return parse_source(fh.read())


def parse_expr(source: str, parties=()) -> A.Expr:
    p = Parser(lex(source))
    p.parties = frozenset(parties)
    e = p.expr()
    p.expect("EOF", "end of input")
    return e


def parse_stmts(source: str, parties=()) -> tuple:
    """Parse a bare statement sequence (used for law instantiation and tests)."""
    p = Parser(lex(source + " }"))
    p.parties = frozenset(parties)
    out = p.stmts()
    p.expect("RBRACE")
    p.expect("EOF", "end of input")
    return out
