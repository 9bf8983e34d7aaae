"""Bounded legal bisimulation and the algebraic properties built on it."""

from stipula.equiv.bisim import (
    BisimVerdict, TimeShift, bisimilar, bisimilar_configs, check_time_shift, gc_events,
    replay_witness,
)
from stipula.equiv.laws import (
    LAWS, LawContext, LawInstance, check_law, compare_orders, law_universe, random_context,
    random_instance, violating_instance,
)
from stipula.equiv.lts import LTS, Explorer, Node, explore, to_dot
from stipula.equiv.rename import Renaming, random_renaming, rename
from stipula.equiv.universe import Universe, load_universe

__all__ = [
    "LAWS", "LTS", "BisimVerdict", "Explorer", "LawContext", "LawInstance", "Node",
    "Renaming", "TimeShift", "Universe", "bisimilar", "bisimilar_configs", "check_law",
    "check_time_shift", "compare_orders", "explore", "gc_events", "law_universe",
    "load_universe", "random_context", "random_instance", "random_renaming", "rename",
    "replay_witness", "to_dot", "violating_instance",
]
