"""Enabled-choice enumeration, scripted runs, trace files and the REPL back-end."""

from stipula.driver.choices import (
    DoAgree, DoCall, DoDiscardStale, DoExecStep, DoFireEvent, DoTick, enabled, step,
)
from stipula.driver.session import (
    Agree, Call, RunResult, Session, Transition, Wait, replay, run_trace,
)

__all__ = [
    "Agree", "Call", "DoAgree", "DoCall", "DoDiscardStale", "DoExecStep", "DoFireEvent",
    "DoTick", "RunResult", "Session", "Transition", "Wait", "enabled", "replay",
    "run_trace", "step",
]
