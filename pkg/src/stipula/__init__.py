"""Toolchain for Stipula legal contracts.

Subpackages: ``syntax`` (lexer, parser, checker, printer), ``runtime``
(configurations and reduction rules), ``driver`` (scripted runs, fuzzing,
REPL), ``equiv`` (bounded bisimulation, renamings, commutation laws).
"""

__version__ = "0.1.0"
