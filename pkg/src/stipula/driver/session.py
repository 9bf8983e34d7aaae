"""Scripted execution: timed transactions applied under a fixed policy."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from stipula.driver.choices import (
    Choice, DoAgree, DoCall, DoTick, settle_choice, step,
)
from stipula.errors import ChoiceNotEnabled, ScriptError, StuckError
from stipula.runtime.rules import rule_of
from stipula.runtime.state import AgreeL, CallL, Configuration, observable
from stipula.syntax.ast import ContractDecl


@dataclass(frozen=True)
class Agree:
    at: int
    label: AgreeL


@dataclass(frozen=True)
class Call:
    at: int
    label: CallL


@dataclass(frozen=True)
class Wait:
    at: int


Transaction = Union[Agree, Call, Wait]


@dataclass(frozen=True)
class Transition:
    at: int
    rule: str
    label: object
    choice: Choice
    config: Configuration  # the configuration reached


@dataclass(frozen=True)
class Rejection:
    at: int
    txn: Transaction
    reason: str


@dataclass
class RunResult:
    transitions: list = field(default_factory=list)
    final: Optional[Configuration] = None
    rejected: list = field(default_factory=list)
    stuck: Optional[str] = None
    log: list = field(default_factory=list)  # transitions and rejections, in order

    @property
    def labels(self) -> list:
        return [t.label for t in self.transitions]

    @property
    def observations(self) -> list:
        return [(t.at, t.label) for t in self.transitions if observable(t.label)]

    @property
    def rules(self) -> list[str]:
        return [t.rule for t in self.transitions]


class Session:
    """A single run in progress; every transition is appended to ``result``."""

    def __init__(self, decl_or_config: Union[ContractDecl, Configuration],
                 strict: bool = False):
        if isinstance(decl_or_config, Configuration):
            self.config = decl_or_config
        else:
            self.config = Configuration.initial(decl_or_config)
        self.strict = strict
        self.result = RunResult(final=self.config)
        self.halted: Optional[str] = None

    @property
    def clock(self) -> int:
        return self.config.clock

    def apply(self, choice: Choice):
        """Take one step; a stuck statement halts the session instead of raising."""
        at = self.config.clock
        try:
            label, nxt = step(self.config, choice, self.strict)
        except StuckError as exc:
            self.config = exc.config
            self.halted = self.result.stuck = f"t={at}: {exc.reason}"
            self.result.final = self.config
            return None
        self.config = nxt
        t = Transition(at, rule_of(label), label, choice, nxt)
        self.result.transitions.append(t)
        self.result.log.append(t)
        self.result.final = nxt
        return label

    def _reject(self, txn: Transaction, reason: str) -> None:
        r = Rejection(txn.at, txn, reason)
        self.result.rejected.append(r)
        self.result.log.append(r)

    def settle(self) -> None:
        while self.halted is None:
            choice = settle_choice(self.config, self.strict)
            if choice is None:
                return
            self.apply(choice)

    def advance_to(self, target: int) -> None:
        self.settle()
        while self.halted is None and self.config.clock < target:
            try:
                self.apply(DoTick())
            except ChoiceNotEnabled as exc:
                self.halted = self.result.stuck = f"t={self.config.clock}: deadlock: {exc}"
                return
            self.settle()

    def submit(self, txn: Transaction) -> bool:
        """Apply one transaction at its time; returns False if it was refused."""
        if txn.at < self.config.clock:
            raise ScriptError(f"transaction at t={txn.at} is in the past "
                              f"(clock is {self.config.clock})")
        self.advance_to(txn.at)
        if self.halted is not None:
            self._reject(txn, self.halted)
            return False
        if isinstance(txn, Wait):
            return True
        contract = self.config.contracts[0].name
        choice = DoAgree(contract, txn.label) if isinstance(txn, Agree) else DoCall(contract, txn.label)
        try:
            self.apply(choice)
        except ChoiceNotEnabled as exc:
            self._reject(txn, str(exc))
            return False
        self.settle()
        return True


def run_trace(decl: ContractDecl, script: Sequence[Transaction],
              until: Optional[int] = None, strict: bool = False) -> RunResult:
    """Run ``script`` from the initial configuration of ``decl``.

    Bodies run to completion eagerly; due events fire in scheduling order,
    after stale ones are discarded.  Refused transactions are recorded.
    """
    session = Session(decl, strict)
    for txn in script:
        session.submit(txn)
    if until is not None:
        if until < session.clock:
            raise ScriptError(f"--until {until} is before the last transaction")
        session.advance_to(until)
    else:
        session.settle()
    return session.result


def replay(initial: Configuration, choices: Sequence[Choice], strict: bool = False) -> Configuration:
    config = initial
    for c in choices:
        _, config = step(config, c, strict)
    return config
