"""Process terms, recursion unfolding and the list builders used by choice."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable

from .constraints import Formula
from .space import AgentId
from .stochastic import SampleCounter, sample_prob

PROB_TOLERANCE = 1e-9


class Command:
    __slots__ = ()

    def __or__(self, other: "Command") -> "Command":
        return Par(self, other)


@dataclass(frozen=True)
class Nil(Command):
    pass


@dataclass(frozen=True)
class Tell(Command):
    formula: Formula


@dataclass(frozen=True)
class TellChild(Command):
    """Registers child index ``n`` in the local child set."""
    n: int


@dataclass(frozen=True)
class Ask(Command):
    guard: Formula
    body: Command


@dataclass(frozen=True)
class Par(Command):
    left: Command
    right: Command


@dataclass(frozen=True)
class In(Command):
    body: Command
    child: int


@dataclass(frozen=True)
class Out(Command):
    body: Command
    child: int


@dataclass(frozen=True)
class Var(Command):
    n: int


@dataclass(frozen=True)
class Mu(Command):
    binder: int
    body: Command


def _check_choice(kind, cmds, probs, exclusive):
    if len(cmds) != len(probs) or not cmds:
        raise ValueError(f"{kind} needs equally many commands and probabilities (at least one)")
    for q in probs:
        if not (0.0 <= q <= 1.0) or math.isnan(q):
            raise ValueError(f"{kind} probability {q!r} outside [0, 1]")
    if exclusive and abs(math.fsum(probs) - 1.0) > PROB_TOLERANCE:
        raise ValueError(f"{kind} probabilities sum to {math.fsum(probs)!r}, not 1")


@dataclass(frozen=True)
class Exc(Command):
    """Exclusive probabilistic choice: exactly one command runs."""
    cmds: tuple
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "cmds", tuple(self.cmds))
        object.__setattr__(self, "probs", tuple(float(q) for q in self.probs))
        _check_choice("exc", self.cmds, self.probs, True)


@dataclass(frozen=True)
class Ind(Command):
    """Independent probabilistic choice: each command runs with its own probability."""
    cmds: tuple
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "cmds", tuple(self.cmds))
        object.__setattr__(self, "probs", tuple(float(q) for q in self.probs))
        _check_choice("ind", self.cmds, self.probs, False)


@dataclass(frozen=True)
class Watch(Command):
    """Random walk over spaces until the local store entails ``target``."""
    action: Command
    target: Formula


NIL = Nil()


def par(*cmds: Command) -> Command:
    """Right-associated parallel composition."""
    if not cmds:
        return NIL
    out = cmds[-1]
    for c in reversed(cmds[:-1]):
        out = Par(c, out)
    return out


def children(c: Command) -> tuple:
    if isinstance(c, (Ask, In, Out, Mu)):
        return (c.body,)
    if isinstance(c, Par):
        return (c.left, c.right)
    if isinstance(c, (Exc, Ind)):
        return c.cmds
    if isinstance(c, Watch):
        return (c.action,)
    return ()


def free_vars(c: Command) -> set:
    if isinstance(c, Var):
        return {c.n}
    if isinstance(c, Mu):
        return free_vars(c.body) - {c.binder}
    out: set = set()
    for sub in children(c):
        out |= free_vars(sub)
    return out


def is_closed(c: Command) -> bool:
    return not free_vars(c)


def unguarded_vars(c: Command, _guarded: bool = False) -> set:
    """Recursion variables with an occurrence not under any ask."""
    if isinstance(c, Var):
        return set() if _guarded else {c.n}
    if isinstance(c, Ask):
        return unguarded_vars(c.body, True)
    out: set = set()
    for sub in children(c):
        out |= unguarded_vars(sub, _guarded)
    return out


def lint(c: Command) -> list:
    """Warnings for recursion that is not ask-guarded (executed as written)."""
    msgs = []
    stack = [c]
    while stack:
        node = stack.pop()
        if isinstance(node, Mu) and node.binder in unguarded_vars(node.body):
            msgs.append(f"recursion variable {node.binder} occurs unguarded")
        stack.extend(children(node))
    for m in msgs:
        warnings.warn(m, stacklevel=2)
    return msgs


def replace(n: int, body: Command, sub: Command) -> Command:
    """Substitute ``sub`` for ``Var(n)`` in ``body``; never enters a Mu."""
    if isinstance(body, Var):
        return sub if body.n == n else body
    if isinstance(body, (Nil, Tell, TellChild, Mu)):
        return body
    if isinstance(body, Ask):
        return Ask(body.guard, replace(n, body.body, sub))
    if isinstance(body, Par):
        return Par(replace(n, body.left, sub), replace(n, body.right, sub))
    if isinstance(body, In):
        return In(replace(n, body.body, sub), body.child)
    if isinstance(body, Out):
        return Out(replace(n, body.body, sub), body.child)
    if isinstance(body, (Exc, Ind)):
        return type(body)(tuple(replace(n, x, sub) for x in body.cmds), body.probs)
    if isinstance(body, Watch):
        return Watch(replace(n, body.action, sub), body.target)
    raise TypeError(f"unknown command {body!r}")


def unfold(m: Mu) -> Command:
    """One recursion step: the body with the whole term substituted for its variable."""
    return replace(m.binder, m.body, m)


def command_list(loc: AgentId, kids: Iterable[int], c: Command) -> list:
    """Moves available from ``loc``: out to the parent first, then into each child."""
    out = [] if loc.is_root else [Out(c, loc.index)]
    out.extend(In(c, k) for k in sorted(kids))
    return out


def prob_list(n: int, counter: SampleCounter) -> tuple[list, SampleCounter]:
    """``n`` uniform draws normalized by their sum.

    Each new draw is prepended, so the returned list holds the draws in
    reverse order.
    """
    if n < 1:
        raise ValueError("prob_list needs n >= 1")
    draws = []
    total = 0.0
    for _ in range(n):
        q, counter = sample_prob(counter)
        draws.insert(0, q)
        total += q
    return [q / total for q in draws], counter
