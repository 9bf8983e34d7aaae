"""Configurations: runtime contracts, memories, pending events, labels."""

from __future__ import annotations

import hashlib
import json
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union

from stipula.runtime.values import AssetValue, Value
from stipula.syntax.ast import ContractDecl


class Memory(Mapping):
    """Immutable name -> value/asset map; updates return a new memory."""

    __slots__ = ("_d", "_h")

    def __init__(self, items=()):
        self._d = dict(items)
        self._h = None

    def __getitem__(self, key):
        return self._d[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash(frozenset(self._d.items()))
        return self._h

    def __eq__(self, other) -> bool:
        if isinstance(other, Memory):
            return self._d == other._d
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v!r}" for k, v in sorted(self._d.items()))
        return f"Memory({{{inner}}})"

    def set(self, **updates) -> "Memory":
        return self.update(updates)

    def update(self, updates: Mapping) -> "Memory":
        d = dict(self._d)
        d.update(updates)
        return Memory(d)

    def without(self, names) -> "Memory":
        return Memory({k: v for k, v in self._d.items() if k not in names})


@dataclass(frozen=True)
class PendingEvent:
    """A scheduled handler whose time guard has already been evaluated."""
    trigger: int
    state: str
    handler: tuple
    next_state: str
    origin: str = ""
    # scheduling instant, bound to `now` inside the handler (None if unused)
    now: Optional[int] = None

    def sort_key(self):
        return (self.trigger, self.state, self.next_state, self.origin,
                -1 if self.now is None else self.now, repr(self.handler))


@dataclass(frozen=True)
class Residual:
    """In-flight remainder of a function body or event handler."""
    stmts: tuple
    events: tuple
    target: str
    scoped: tuple = ()  # parameter names dropped at the state change
    origin: str = ""
    now: Optional[int] = None


@dataclass(frozen=True)
class RuntimeContract:
    decl: ContractDecl = field(compare=False, repr=False)
    phase: Optional[str] = None
    memory: Memory = field(default_factory=Memory)
    residual: Optional[Residual] = None
    pending: tuple = ()  # PendingEvents in scheduling order
    stuck: Optional[str] = None
    codes: int = 0  # usage codes issued so far

    @property
    def name(self) -> str:
        return self.decl.name

    @property
    def idle(self) -> bool:
        return self.residual is None

    def key(self):
        return (self.name, self.phase, self.memory, self.residual,
                tuple(sorted(self.pending, key=PendingEvent.sort_key)),
                self.stuck, self.codes)


@dataclass(frozen=True)
class Configuration:
    contracts: tuple
    clock: int = 0

    @classmethod
    def initial(cls, *decls: ContractDecl, clock: int = 0) -> "Configuration":
        names = [d.name for d in decls]
        if len(set(names)) != len(names):
            raise ValueError("contract names in a configuration must be distinct")
        return cls(tuple(RuntimeContract(d) for d in decls), clock)

    def contract(self, name: Optional[str] = None) -> RuntimeContract:
        if name is None:
            if len(self.contracts) != 1:
                raise KeyError("contract name required in a multi-contract configuration")
            return self.contracts[0]
        for rc in self.contracts:
            if rc.name == name:
                return rc
        raise KeyError(name)

    def with_contract(self, rc: RuntimeContract) -> "Configuration":
        return replace(self, contracts=tuple(rc if c.name == rc.name else c
                                             for c in self.contracts))

    def key(self):
        return (tuple(rc.key() for rc in self.contracts), self.clock)


# -- labels ------------------------------------------------------------------

@dataclass(frozen=True)
class Silent:
    rule: str


@dataclass(frozen=True)
class AgreeL:
    parties: tuple  # actual party ids, in agreement order
    groups: tuple  # of (party id tuple, value tuple)

    def canonical(self):
        """Representative of the ``~`` class: parties and whole rows reordered."""
        return (tuple(sorted(self.parties)),
                tuple(sorted(((tuple(sorted(p)), v) for p, v in self.groups), key=repr)))


@dataclass(frozen=True)
class CallL:
    party: str
    fn: str
    args: tuple = ()
    assets: tuple = ()


@dataclass(frozen=True)
class ValueOutL:
    value: Value
    party: str


@dataclass(frozen=True)
class AssetOutL:
    asset: AssetValue
    party: str


@dataclass(frozen=True)
class TickL:
    pass


Label = Union[Silent, AgreeL, CallL, ValueOutL, AssetOutL, TickL]


def observable(label) -> bool:
    return isinstance(label, (AgreeL, CallL, ValueOutL, AssetOutL))


def label_str(label) -> str:
    """Compact human-readable rendering in the ASCII surface notation."""
    if isinstance(label, AgreeL):
        groups = "; ".join(f"{','.join(p)}: {', '.join(str(v) for v in vs)}"
                           for p, vs in label.groups)
        return f"agree({','.join(label.parties)}" + (f"; {groups})" if groups else ")")
    if isinstance(label, CallL):
        args = f"({', '.join(str(v) for v in label.args)})" if label.args else ""
        assets = f"[{', '.join(str(a) for a in label.assets)}]" if label.assets else ""
        return f"{label.party}:{label.fn}{args}{assets}"
    if isinstance(label, ValueOutL):
        return f"{label.value} -> {label.party}"
    if isinstance(label, AssetOutL):
        return f"{label.asset} -o {label.party}"
    if isinstance(label, TickL):
        return "tick"
    return f"silent({label.rule})"


def label_key(label):
    """Hashable, orderable identity of an observable label (agreements up to ~)."""
    if isinstance(label, AgreeL):
        return ("agree", repr(label.canonical()))
    return (type(label).__name__, repr(label))


def config_digest(config: Configuration) -> str:
    """Stable SHA-256 digest of a configuration's full state (memory, residual, pending events, clock)."""
    payload = json.dumps(repr(config.key()), ensure_ascii=True)
    return hashlib.sha256(payload.encode()).hexdigest()
