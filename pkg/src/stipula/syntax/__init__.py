"""Lexing, parsing, pretty-printing and static checks for Stipula source."""

from stipula.syntax.ast import ContractDecl, free_names
from stipula.syntax.checker import Diagnostic, check_wellformed, errors, lint_asset_drain
from stipula.syntax.lexer import Token, lex
from stipula.syntax.parser import parse, parse_expr, parse_file, parse_source, parse_stmts
from stipula.syntax.printer import pretty

__all__ = [
    "ContractDecl", "Diagnostic", "Token", "check_wellformed", "errors", "free_names",
    "lex", "lint_asset_drain", "parse", "parse_expr", "parse_file", "parse_source",
    "parse_stmts", "pretty",
]
