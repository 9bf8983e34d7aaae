"""Exception hierarchy shared by every layer of the toolchain."""

from __future__ import annotations


class StipulaError(Exception):
    """Base class for all errors raised by this package."""


# -- syntax ------------------------------------------------------------------

class LexError(StipulaError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class ParseError(StipulaError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


# -- runtime -----------------------------------------------------------------

class EvalError(StipulaError):
    pass


class AgreeError(StipulaError):
    pass


class CallRejected(StipulaError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class StuckError(StipulaError):
    """A statement could not execute; ``config`` is the frozen stuck configuration."""

    def __init__(self, reason: str, config=None, labels=()):
        super().__init__(reason)
        self.reason = reason
        self.config = config
        self.labels = tuple(labels)


class EventNotReady(StipulaError):
    pass


class TickBlocked(StipulaError):
    pass


class ConservationViolation(StipulaError):
    pass


# -- driver ------------------------------------------------------------------

class ChoiceNotEnabled(StipulaError):
    pass


class ScriptError(StipulaError):
    pass


# -- equivalence -------------------------------------------------------------

class ExplosionError(StipulaError):
    def __init__(self, nodes: int, cap: int):
        super().__init__(f"exploration exceeded node cap ({nodes} > {cap})")
        self.nodes = nodes
        self.cap = cap


class SideConditionViolated(StipulaError):
    pass
