"""Agent identifiers and the flat object configuration.

A configuration is a multiset of agent objects (one store and child set
per space), process objects and a single simulation state.  The space
tree is implicit in the agent identifiers: ``3.1.root`` is child 3 of
child 1 of the root.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Iterable

from .constraints import TRUE, Formula, conjoin


@dataclass(frozen=True, order=False)
class AgentId:
    """Qualified space name; ``path[0]`` is the innermost index."""

    path: tuple = ()

    def __post_init__(self):
        if any(not isinstance(n, int) or isinstance(n, bool) or n < 0 for n in self.path):
            raise ValueError(f"agent path must hold naturals, got {self.path!r}")

    @classmethod
    def parse(cls, text: str) -> "AgentId":
        parts = [p.strip() for p in text.strip().split(".")]
        if not parts or parts[-1] != "root":
            raise ValueError(f"agent id must end in 'root': {text!r}")
        try:
            return cls(tuple(int(p) for p in parts[:-1]))
        except ValueError:
            raise ValueError(f"bad agent id {text!r}") from None

    def child(self, n: int) -> "AgentId":
        return AgentId((n,) + self.path)

    @property
    def is_root(self) -> bool:
        return not self.path

    @property
    def parent(self) -> "AgentId":
        if not self.path:
            raise ValueError("root has no parent")
        return AgentId(self.path[1:])

    @property
    def index(self) -> int:
        """Innermost index (``n`` in ``n.L``)."""
        if not self.path:
            raise ValueError("root has no index")
        return self.path[0]

    def sort_key(self):
        return (len(self.path), self.path[::-1])

    def __str__(self):
        return ".".join([*map(str, self.path), "root"])

    def __repr__(self):
        return f"AgentId({str(self)!r})"


ROOT = AgentId()


def aid(text) -> AgentId:
    return text if isinstance(text, AgentId) else AgentId.parse(text)


def is_prefix(a: AgentId, b: AgentId) -> bool:
    """``a`` is ``b`` or one of its ancestors."""
    n = len(a.path)
    return n <= len(b.path) and b.path[len(b.path) - n:] == a.path


def is_son(a: AgentId, b: AgentId) -> bool:
    return bool(a.path) and a.path[1:] == b.path


def size_aid(a: AgentId) -> int:
    return len(a.path) + 1


@dataclass(frozen=True)
class AgentObject:
    id: AgentId
    store: Formula = TRUE
    children: frozenset = frozenset()


@dataclass(frozen=True)
class ProcessObject:
    location: AgentId
    uid: int
    command: Any


@dataclass(frozen=True)
class Configuration:
    agents: tuple = ()
    processes: tuple = ()
    sim: Any = None

    def agent_map(self) -> dict:
        return {a.id: a for a in self.agents}

    def agent(self, a) -> AgentObject:
        a = aid(a)
        for obj in self.agents:
            if obj.id == a:
                return obj
        raise KeyError(str(a))

    def has_agent(self, a) -> bool:
        a = aid(a)
        return any(obj.id == a for obj in self.agents)

    def store(self, a) -> Formula:
        return self.agent(a).store

    def process(self, uid: int) -> ProcessObject:
        for p in self.processes:
            if p.uid == uid:
                return p
        raise KeyError(uid)


def normalize(c: Configuration) -> Configuration:
    """Drop nil processes and merge same-id agents (stores conjoined, children united)."""
    from .processes import Nil

    merged: dict = {}
    for obj in c.agents:
        prev = merged.get(obj.id)
        if prev is None:
            merged[obj.id] = obj
        else:
            merged[obj.id] = AgentObject(obj.id, conjoin(prev.store, obj.store),
                                         prev.children | obj.children)
    agents = tuple(sorted(merged.values(), key=lambda o: o.id.sort_key()))
    procs = tuple(sorted((p for p in c.processes if not isinstance(p.command, Nil)),
                         key=lambda p: p.uid))
    if agents == c.agents and procs == c.processes:
        return c
    return replace(c, agents=agents, processes=procs)


def tree_lines(c: Configuration) -> Iterable[str]:
    """Human-readable dump, one agent per line."""
    from .constraints import to_text

    for a in c.agents:
        kids = " ".join(str(k) for k in sorted(a.children))
        yield f"{a.id}: {to_text(a.store)}" + (f"  children {kids}" if kids else "")
