"""Interactive stepping over one contract.

Each turn prints the configuration and a numbered menu of enabled choices;
typing a number takes that step.  Agreements and calls outside the menu can
be typed as JSON (``agree {...}`` / ``call {...}``).  Meta-commands start
with a colon.
"""

from __future__ import annotations

import json
import sys
from typing import Callable, Optional, TextIO

from stipula.driver.choices import (
    DoAgree, DoCall, DoDiscardStale, DoExecStep, DoFireEvent, DoTick, enabled,
)
from stipula.driver.session import Agree, Call, Session, Wait
from stipula.driver.traceio import agree_from_json, call_from_json, loads_json, write_script
from stipula.equiv.bisim import gc_events
from stipula.errors import ChoiceNotEnabled, ScriptError
from stipula.runtime.state import label_str, observable
from stipula.syntax.ast import ContractDecl
from stipula.syntax.printer import stmt_lines

HELP = """\
  <n>             take choice n from the menu
  agree <json>    make an agreement, e.g. agree {"parties":["A","B"],"groups":[]}
  call <json>     call a function, e.g. call {"party":"A","fn":"f"}
  :labels         observable labels so far
  :gc             drop expired pending events
  :save <file>    write the agreements and calls so far as a trace script
  :help           this text
  :quit           leave"""


def describe(choice, config) -> str:
    if isinstance(choice, DoAgree):
        return "agree " + label_str(choice.label)
    if isinstance(choice, DoCall):
        return "call " + label_str(choice.label)
    if isinstance(choice, DoFireEvent):
        ev = choice.event
        return f"fire event {ev.origin} at t={ev.trigger} (@{ev.state} => @{ev.next_state})"
    if isinstance(choice, DoDiscardStale):
        ev = choice.event
        return f"discard stale event {ev.origin} (waits for @{ev.state})"
    if isinstance(choice, DoExecStep):
        res = config.contract(choice.contract).residual
        if res.stmts:
            head = stmt_lines(res.stmts[0], "")[0]
            return f"step: {head}"
        return f"finish body => @{res.target}"
    if isinstance(choice, DoTick):
        return f"tick (t={config.clock} -> {config.clock + 1})"
    return repr(choice)


def show_config(config) -> list[str]:
    lines = [f"t={config.clock}"]
    for rc in config.contracts:
        phase = "(not agreed)" if rc.phase is None else f"@{rc.phase}"
        lines.append(f"{rc.name} {phase}" + (f"  STUCK: {rc.stuck}" if rc.stuck else ""))
        for name, v in rc.memory.items():
            lines.append(f"  {name} = {v}")
        for ev in rc.pending:
            lines.append(f"  pending: {ev.origin} at t={ev.trigger} @{ev.state} => @{ev.next_state}")
    return lines


class Repl:
    def __init__(self, decl: ContractDecl, agrees=(), calls=(), strict: bool = False,
                 out: TextIO = sys.stdout):
        self.session = Session(decl, strict)
        self.agrees, self.calls = tuple(agrees), tuple(calls)
        self.out = out
        self.txns: list = []  # agreements and calls taken, for :save
        self.menu: list = []

    @property
    def config(self):
        return self.session.config

    def say(self, text: str = "") -> None:
        print(text, file=self.out)

    def refresh(self) -> None:
        for line in show_config(self.config):
            self.say(line)
        self.menu = enabled(self.config, self.agrees, self.calls, self.session.strict)
        if not self.menu:
            self.say("no enabled choices")
        for i, ch in enumerate(self.menu, 1):
            self.say(f"  [{i}] {describe(ch, self.config)}")

    def take(self, choice) -> None:
        at = self.config.clock
        label = self.session.apply(choice)
        if self.session.halted:
            self.say(f"stuck: {self.session.halted}")
            return
        if isinstance(choice, DoAgree):
            self.txns.append(Agree(at, choice.label))
        elif isinstance(choice, DoCall):
            self.txns.append(Call(at, choice.label))
        if label is not None and observable(label) and not isinstance(choice, (DoAgree, DoCall)):
            self.say(f"  => {label_str(label)}")

    def handle(self, line: str) -> bool:
        """Process one input line; False means the session is over."""
        line = line.strip()
        if not line:
            return True
        if line in (":quit", ":q"):
            return False
        if line == ":help":
            self.say(HELP)
            return True
        if line == ":labels":
            for at, lab in self.session.result.observations:
                self.say(f"  t={at} {label_str(lab)}")
            return True
        if line == ":gc":
            before = sum(len(rc.pending) for rc in self.config.contracts)
            self.session.config = gc_events(self.config)
            after = sum(len(rc.pending) for rc in self.config.contracts)
            self.say(f"dropped {before - after} expired event(s)")
            self.refresh()
            return True
        if line.startswith(":save"):
            path = line[len(":save"):].strip()
            if not path:
                self.say("usage: :save <file>")
                return True
            try:
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(write_script(self.txns + [Wait(self.config.clock)]))
            except OSError as exc:
                self.say(f"cannot write {path}: {exc.strerror}")
                return True
            self.say(f"saved {len(self.txns)} transaction(s) to {path}")
            return True
        if line.startswith(":"):
            self.say(f"unknown command {line.split()[0]}; try :help")
            return True
        choice = self._parse_choice(line)
        if choice is None:
            return True
        try:
            self.take(choice)
        except ChoiceNotEnabled as exc:
            self.say(f"not enabled: {exc}")
            return True
        self.refresh()
        return True

    def _parse_choice(self, line: str):
        if line.isdigit():
            n = int(line)
            if 1 <= n <= len(self.menu):
                return self.menu[n - 1]
            self.say(f"pick a number between 1 and {len(self.menu)}")
            return None
        verb, _, rest = line.partition(" ")
        if verb not in ("agree", "call"):
            self.say("expected a menu number, agree <json>, call <json> or :help")
            return None
        try:
            obj = loads_json(rest)
            contract = self.config.contracts[0].name
            if verb == "agree":
                return DoAgree(contract, agree_from_json(obj))
            return DoCall(contract, call_from_json(obj))
        except (json.JSONDecodeError, ScriptError, AttributeError) as exc:
            self.say(f"bad {verb}: {exc}")
            return None

    def loop(self, read: Callable[[str], str] = input) -> None:
        self.refresh()
        while True:
            try:
                line = read("> ")
            except EOFError:
                break
            if not self.handle(line):
                break


def run_repl(decl: ContractDecl, agrees=(), calls=(), strict: bool = False,
             out: Optional[TextIO] = None, read: Callable[[str], str] = input) -> Repl:
    repl = Repl(decl, agrees, calls, strict, out or sys.stdout)
    repl.loop(read)
    return repl


__all__ = ["Repl", "describe", "run_repl", "show_config"]
