"""Bounded labelled transition systems over idle configurations.

A node is an idle configuration paired with the number of agreements and
calls already made in the current tick.  Edges are whole transactions: an
agreement, a call with its body run to completion, a due event fired with its
handler, a stale event discarded, or a tick.  Silent steps inside a
transaction are compressed away, so every edge carries only observable labels.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from stipula.driver.choices import (
    Choice, DoAgree, DoCall, DoDiscardStale, DoExecStep, DoFireEvent, DoTick, enabled,
    step,
)
from stipula.driver.traceio import dumps, label_to_json
from stipula.equiv.universe import Universe
from stipula.errors import ExplosionError, StuckError
from stipula.runtime.rules import rule_of
from stipula.runtime.state import Configuration, label_key, observable
from stipula.syntax.ast import ContractDecl

DEFAULT_CAP = 200_000


def node_cap() -> int:
    try:
        return int(os.environ.get("STIPULA_NODE_CAP", DEFAULT_CAP))
    except ValueError:
        return DEFAULT_CAP


@dataclass(frozen=True)
class Node:
    config: Configuration
    spent: int = 0  # agreements and calls already in this tick-block

    @property
    def clock(self) -> int:
        return self.config.clock

    def key(self):
        return (self.config.key(), self.spent)


@dataclass(frozen=True)
class Move:
    """One transaction out of a node; ``target`` is None when it got stuck."""
    choice: Choice
    labels: tuple
    target: Optional[Node]
    stuck: Optional[str] = None


def mset(labels) -> tuple:
    """Order-free identity of a label sequence (agreements up to reordering)."""
    return tuple(sorted(label_key(l) for l in labels))


def run_to_idle(config: Configuration, choice: Choice):
    """Apply ``choice`` and execute the resulting body; returns (labels, config)."""
    label, config = step(config, choice)
    labels = [label] if observable(label) else []
    while True:
        busy = next((rc for rc in config.contracts if not rc.idle and not rc.stuck), None)
        if busy is None:
            return tuple(labels), config
        try:
            label, config = step(config, DoExecStep(busy.name))
        except StuckError as exc:
            raise StuckError(exc.reason, exc.config, labels) from None
        if observable(label):
            labels.append(label)


class Explorer:
    """Memoised successor generation for one contract under a universe."""

    def __init__(self, u: Universe, cap: Optional[int] = None):
        self.u = u
        self.cap = node_cap() if cap is None else cap
        self._moves: dict = {}
        self._blocks: dict = {}

    @property
    def size(self) -> int:
        return len(self._moves)

    def moves(self, node: Node) -> list[Move]:
        k = node.key()
        hit = self._moves.get(k)
        if hit is not None:
            return hit
        if len(self._moves) >= self.cap:
            raise ExplosionError(len(self._moves) + 1, self.cap)
        room = node.spent < self.u.block_size
        out = []
        for choice in enabled(node.config, self.u.agrees if room else (),
                              self.u.calls if room else ()):
            if isinstance(choice, DoTick):
                continue
            spent = node.spent + isinstance(choice, (DoAgree, DoCall))
            try:
                labels, succ = run_to_idle(node.config, choice)
            except StuckError as exc:
                out.append(Move(choice, tuple(exc.labels), None, exc.reason))
                continue
            out.append(Move(choice, labels, Node(succ, spent)))
        self._moves[k] = out
        return out

    def tick(self, node: Node) -> Optional[Node]:
        if any(isinstance(c, DoTick) for c in enabled(node.config)):
            return Node(step(node.config, DoTick())[1], 0)
        return None

    def blocks(self, node: Node) -> dict:
        """Every way to finish the current tick from ``node``.

        Maps ``(label multiset, successor key)`` to ``(successor, path)`` where
        the successor is the node right after the tick and ``path`` is one
        sequence of moves realising it.  Transactions that get stuck never
        reach a tick and therefore contribute no block.
        """
        k = node.key()
        hit = self._blocks.get(k)
        if hit is not None:
            return hit
        out: dict = {}
        after = self.tick(node)
        if after is not None:
            out[((), after.key())] = (after, ())
        for mv in self.moves(node):
            if mv.target is None:
                continue
            head = mset(mv.labels)
            for (m, sk), (succ, path) in self.blocks(mv.target).items():
                merged = tuple(sorted(head + m))
                out.setdefault((merged, sk), (succ, (mv,) + path))
        self._blocks[k] = out
        return out


# -- whole-system exploration ------------------------------------------------

@dataclass
class LTS:
    nodes: dict = field(default_factory=dict)  # id -> Node
    edges: list = field(default_factory=list)  # (src id, kind, labels, dst id or None)
    initial: int = 0

    def successors(self, nid: int) -> list:
        return [e for e in self.edges if e[0] == nid]

    def edge_counts(self) -> Counter:
        return Counter(kind for _, kind, _, _ in self.edges)


_KINDS = {DoAgree: "agree", DoCall: "call", DoFireEvent: "fire_event",
          DoDiscardStale: "discard_stale", DoTick: "tick"}


def _kind(choice: Choice) -> str:
    return _KINDS[type(choice)]


def explore(decl: ContractDecl, u: Universe, clock: int = 0,
            cap: Optional[int] = None) -> LTS:
    """All nodes reachable from the initial configuration at clocks below the horizon."""
    ex = Explorer(u, cap)
    root = Node(Configuration.initial(decl, clock=clock))
    lts = LTS()
    ids: dict = {}

    def intern(n: Node) -> int:
        k = n.key()
        if k not in ids:
            if len(ids) >= ex.cap:
                raise ExplosionError(len(ids) + 1, ex.cap)
            ids[k] = len(ids)
            lts.nodes[ids[k]] = n
            todo.append(n)
        return ids[k]

    todo: list = []
    intern(root)
    while todo:
        n = todo.pop()
        src = ids[n.key()]
        for mv in ex.moves(n):
            dst = intern(mv.target) if mv.target is not None else None
            lts.edges.append((src, _kind(mv.choice), mv.labels, dst))
        after = ex.tick(n)
        if after is not None:
            # ticks reaching the horizon end at the unexplored frontier
            dst = intern(after) if after.clock < u.horizon else None
            lts.edges.append((src, "tick", (), dst))
    return lts


def _label_text(lab) -> str:
    obj = label_to_json(0, lab, rule_of(lab))
    obj.pop("at")
    obj.pop("rule")
    return dumps(obj)


def to_dot(lts: LTS) -> str:
    lines = ["digraph lts {", "  rankdir=LR;", '  node [shape=box, fontname="monospace"];']
    for nid, n in sorted(lts.nodes.items()):
        phase = ",".join(str(rc.phase) for rc in n.config.contracts)
        shape = ", peripheries=2" if nid == lts.initial else ""
        lines.append(f'  n{nid} [label="t={n.clock} @{phase} k={n.spent}"{shape}];')
    ends = 0
    for src, kind, labels, dst in lts.edges:
        text = kind + "".join("\\n" + _label_text(l).replace('"', '\\"') for l in labels)
        if dst is None:
            ends += 1
            target = f"x{ends}"
            lines.append(f'  {target} [shape=point, label=""];')
        else:
            target = f"n{dst}"
        style = ", style=dashed" if kind == "tick" else ""
        lines.append(f'  n{src} -> {target} [label="{text}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
