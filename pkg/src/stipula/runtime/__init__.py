"""Configurations and the transition relation."""

from stipula.runtime.conservation import ConservationReport, conservation_report
from stipula.runtime.evaluate import CodeCounter, eval_expr
from stipula.runtime.rules import (
    apply_agree, apply_call, discard_stale_event, due_events, exec_step, finish_body,
    fire_event, rule_of, tick,
)
from stipula.runtime.state import (
    AgreeL, AssetOutL, CallL, Configuration, Memory, PendingEvent, Residual,
    RuntimeContract, Silent, TickL, ValueOutL, config_digest, label_key, label_str,
    observable,
)
from stipula.runtime.values import (
    EMPTY, Bool, Fungible, PairV, Party, Real, Str, Time, Token, TokenV, UsageCode,
)

__all__ = [
    "EMPTY", "AgreeL", "AssetOutL", "Bool", "CallL", "CodeCounter", "Configuration",
    "ConservationReport", "Fungible", "Memory", "PairV", "Party", "PendingEvent", "Real",
    "Residual", "RuntimeContract", "Silent", "Str", "TickL", "Time", "Token", "TokenV",
    "UsageCode", "ValueOutL", "apply_agree", "apply_call", "config_digest",
    "conservation_report", "discard_stale_event", "due_events", "eval_expr", "exec_step",
    "finish_body", "fire_event", "label_key", "label_str", "observable", "rule_of", "tick",
]
