"""Operational semantics: rule dispatch on the scheduled process, tick, run.

Only the process whose uid sits at the root of ``pqueue`` may fire.  A
firing rule leaves its own entry at the root, schedules whatever it
spawns into ``pend`` and raises ``flag``; ``tick`` then removes the
root, advances the clock by its time, shifts the remaining entries and
merges ``pend`` back.  A blocked ask instead moves its own entry to
``pend`` and leaves ``flag`` down.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, NamedTuple, Optional

from . import scheduler as hp
from .constraints import conjoin, entails, size, to_text
from .processes import (Ask, Command, Exc, In, Ind, Mu, Nil, Out, Par, Tell, TellChild,
                        Watch, command_list, prob_list, unfold)
from .space import AgentId, AgentObject, Configuration, ProcessObject, normalize
from .stochastic import (DEFAULT_TIME, SampleCounter, StochasticExpression, sample_prob,
                         sample_time, to_time)

KINDS = ("tell", "ask", "space", "extrusion")


class EngineError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimulationState:
    gtime: Fraction = Fraction(0)
    pqueue: Any = None
    pend: Any = None
    next_id: int = 1
    counter: SampleCounter = SampleCounter(0)
    flag: bool = False
    tTM: dict = field(default_factory=dict)
    aTM: dict = field(default_factory=dict)
    sTM: dict = field(default_factory=dict)
    eTM: dict = field(default_factory=dict)
    factor: Fraction = Fraction(1)
    max_time: Fraction = Fraction(1000)
    uniform_watch: bool = False


@dataclass(frozen=True)
class TraceEvent:
    rule: str
    uid: int
    gtime: Fraction
    payload: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {"event": self.rule, "uid": self.uid, "gtime": str(self.gtime), **self.payload}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


class RunResult(NamedTuple):
    final: Configuration
    trace: list
    reason: str   # "quiescent", "max_time" or "max_steps"


# --------------------------------------------------------------------------
# time functions

def get_ancestor(tm: dict, loc: AgentId) -> StochasticExpression:
    """Expression of the nearest mapped ancestor-or-self of ``loc``."""
    path = loc.path
    for i in range(len(path) + 1):
        e = tm.get(AgentId(path[i:]))
        if e is not None:
            return e
    return DEFAULT_TIME


def f_time(tm: dict, loc: AgentId, counter: SampleCounter):
    return sample_time(tm.get(loc, DEFAULT_TIME), counter)


def get_time_cmd(c: Command, loc: AgentId, s: SimulationState, counter: Optional[SampleCounter] = None):
    """Duration of ``c`` at ``loc``: tell from tTM, in from sTM, out from eTM, else 0."""
    counter = s.counter if counter is None else counter
    if isinstance(c, (Tell, TellChild)):
        return f_time(s.tTM, loc, counter)
    if isinstance(c, In):
        return f_time(s.sTM, loc, counter)
    if isinstance(c, Out):
        return f_time(s.eTM, loc, counter)
    return Fraction(0), counter


def _pick_exclusive(cmds, probs, loc, s, counter):
    """Walk the list with cumulative probabilities; one time draw per visited candidate."""
    cmds, probs = list(cmds), list(probs)
    visited = 0
    while True:
        c = cmds[0]
        if len(cmds) == 1:
            t, counter = get_time_cmd(c, loc, s, counter)
            return visited, c, t, counter
        q, counter = sample_prob(counter)
        t, counter = get_time_cmd(c, loc, s, counter)
        if q <= probs[0]:
            return visited, c, t, counter
        cmds = cmds[1:]
        probs = [probs[0] + probs[1]] + probs[2:]
        visited += 1


def select_exclusive(cmds, probs, loc: AgentId, s: SimulationState):
    """Choose one command; returns ``(index, command, time, counter)``."""
    return _pick_exclusive(cmds, probs, loc, s, s.counter)


def select_independent(cmds, probs, loc: AgentId, s: SimulationState):
    """Include each command iff its draw is <= its probability.

    Returns ``(chosen, counter)`` where ``chosen`` lists ``(index, command, time)``
    in input order.
    """
    counter = s.counter
    chosen = []
    for i, (c, p) in enumerate(zip(cmds, probs)):
        q, counter = sample_prob(counter)
        t, counter = get_time_cmd(c, loc, s, counter)
        if q <= p:
            chosen.append((i, c, t))
    return chosen, counter


# --------------------------------------------------------------------------
# step

_KEEP = object()


class _Firing:
    """Mutable scratch state for a single rule application."""

    def __init__(self, c: Configuration):
        self.s = c.sim
        self.agents = c.agent_map()
        self.procs = {p.uid: p for p in c.processes}
        self.extra_agents: list = []
        self.counter = self.s.counter
        self.next_id = self.s.next_id
        self.pend = self.s.pend
        self.spawned: list = []
        self.maps = None

    def agent(self, loc: AgentId) -> AgentObject:
        a = self.agents.get(loc)
        if a is None:
            a = self.agents[loc] = AgentObject(loc)
        return a

    def spawn(self, loc: AgentId, cmd: Command, t: Fraction) -> int:
        uid = self.next_id
        self.next_id += 1
        if isinstance(cmd, Nil):
            # the uid is spent but nothing is scheduled: a nil object would be
            # normalized away and leave an entry no rule can fire
            return uid
        self.procs[uid] = ProcessObject(loc, uid, cmd)
        self.spawned.append((uid, t))
        return uid

    def schedule(self, nested: bool = False):
        # nested mirrors insert(a, insert(b, P)): the last spawn goes in first
        order = reversed(self.spawned) if nested else self.spawned
        for uid, t in order:
            self.pend = hp.insert(hp.ScheduleEntry(t, uid), self.pend)

    def time_of(self, cmd: Command, loc: AgentId) -> Fraction:
        s = self.s if self.maps is None else replace(self.s, **self.maps)
        t, self.counter = get_time_cmd(cmd, loc, s, self.counter)
        return t

    def finish(self, c: Configuration, flag: bool, pqueue=_KEEP) -> Configuration:
        pqueue = self.s.pqueue if pqueue is _KEEP else pqueue
        sim = replace(self.s, counter=self.counter, next_id=self.next_id, pend=self.pend, flag=flag,
                      pqueue=pqueue, **(self.maps or {}))
        agents = tuple(self.agents.values()) + tuple(self.extra_agents)
        return normalize(Configuration(agents, tuple(self.procs.values()), sim))


def _times(spawned):
    return [[uid, str(t)] for uid, t in spawned]


def step(c: Configuration, solver=None) -> tuple[Configuration, TraceEvent]:
    """Fire the rule for the process scheduled at the root of ``pqueue``."""
    s: SimulationState = c.sim
    if s.flag:
        raise EngineError("step with flag raised: tick first")
    if s.pqueue is None:
        raise EngineError("step on an empty pqueue")
    t0, uid = hp.find_min(s.pqueue)
    f = _Firing(c)
    proc = f.procs.get(uid)
    if proc is None:
        raise EngineError(f"scheduled uid {uid} has no process object")
    loc, cmd = proc.location, proc.command
    payload: dict = {"loc": str(loc), "at": str(t0)}

    def done(rule, nested=False):
        f.schedule(nested)
        if f.spawned:
            payload["spawned"] = _times(f.spawned)
        return f.finish(c, True), TraceEvent(rule, uid, s.gtime, payload)

    if isinstance(cmd, Tell):
        a = f.agent(loc)
        f.agents[loc] = replace(a, store=conjoin(a.store, cmd.formula))
        del f.procs[uid]
        payload["formula"] = to_text(cmd.formula)
        return done("tell")

    if isinstance(cmd, TellChild):
        a = f.agent(loc)
        f.agents[loc] = replace(a, children=a.children | {cmd.n})
        del f.procs[uid]
        payload["child"] = cmd.n
        return done("tell-set")

    if isinstance(cmd, Ask):
        store = f.agent(loc).store
        if not entails(store, cmd.guard, solver):
            pqueue = hp.delete_min(s.pqueue)
            f.pend = hp.insert(hp.ScheduleEntry(t0, uid), f.pend)
            return f.finish(c, False, pqueue), TraceEvent("delay", uid, s.gtime, payload)
        del f.procs[uid]
        t_body = f.time_of(cmd.body, loc)
        t_ask, f.counter = f_time(s.aTM, loc, f.counter)
        t = t_body + t_ask + size(store) * s.factor
        f.spawn(loc, cmd.body, t)
        return done("ask")

    if isinstance(cmd, Par):
        del f.procs[uid]
        t_left = f.time_of(cmd.left, loc)
        t_right = f.time_of(cmd.right, loc)
        f.spawn(loc, cmd.left, t_left)
        f.spawn(loc, cmd.right, t_right)
        return done("parallel", nested=True)

    if isinstance(cmd, Mu):
        del f.procs[uid]
        t = f.time_of(cmd.body, loc)
        f.spawn(loc, unfold(cmd), t)
        return done("recursion")

    if isinstance(cmd, In):
        del f.procs[uid]
        n = cmd.child
        new = loc.child(n)
        f.extra_agents.append(AgentObject(new))
        maps = {}
        for name in ("tTM", "aTM", "sTM", "eTM"):
            tm = getattr(s, name)
            maps[name] = tm if new in tm else {**tm, new: get_ancestor(tm, new)}
        f.maps = maps
        t_body = f.time_of(cmd.body, new)
        t_reg = f.time_of(TellChild(n), loc)
        f.spawn(new, cmd.body, t_body)
        f.spawn(loc, TellChild(n), t_reg)
        return done("space")

    if isinstance(cmd, Out):
        if loc.is_root or loc.index != cmd.child:
            raise EngineError(f"cannot extrude 'out {cmd.child}' from {loc}")
        del f.procs[uid]
        parent = loc.parent
        t = f.time_of(cmd.body, parent)
        f.spawn(parent, cmd.body, t)
        return done("extrusion")

    if isinstance(cmd, Exc):
        del f.procs[uid]
        i, chosen, t, f.counter = _pick_exclusive(cmd.cmds, cmd.probs, loc, s, f.counter)
        f.spawn(loc, chosen, t)
        payload["choice"] = i
        return done("exclusive")

    if isinstance(cmd, Ind):
        del f.procs[uid]
        chosen, f.counter = select_independent(cmd.cmds, cmd.probs, loc, replace(s, counter=f.counter))
        for _, sub, t in chosen:
            f.spawn(loc, sub, t)
        payload["choice"] = [i for i, _, _ in chosen]
        return done("independent")

    if isinstance(cmd, Watch):
        a = f.agent(loc)
        if entails(a.store, cmd.target, solver):
            del f.procs[uid]
            t = f.time_of(cmd.action, loc)
            f.spawn(loc, cmd.action, t)
            return done("found")
        moves = command_list(loc, a.children, cmd)
        if not moves:
            # nowhere to go: wait like a blocked ask
            pqueue = hp.delete_min(s.pqueue)
            f.pend = hp.insert(hp.ScheduleEntry(t0, uid), f.pend)
            return f.finish(c, False, pqueue), TraceEvent("watch-wait", uid, s.gtime, payload)
        del f.procs[uid]
        if s.uniform_watch:
            probs = [1.0 / len(moves)] * len(moves)
        else:
            probs, f.counter = prob_list(len(moves), f.counter)
        exc = Exc(tuple(moves), tuple(probs))
        t = f.time_of(exc, loc)
        f.spawn(loc, exc, t)
        payload["moves"] = len(moves)
        return done("search")

    if isinstance(cmd, Nil):
        raise EngineError(f"nil process {uid} scheduled; configuration not normalized")
    raise EngineError(f"no rule for command {cmd!r}")


def tick(c: Configuration) -> Configuration:
    s: SimulationState = c.sim
    if not s.flag:
        raise EngineError("tick with flag down")
    if s.pqueue is None:
        raise EngineError("tick on an empty pqueue")
    t0 = hp.find_min(s.pqueue).time
    pqueue = hp.merge(hp.delta(hp.delete_min(s.pqueue), t0), s.pend)
    sim = replace(s, pqueue=pqueue, pend=None, gtime=s.gtime + t0, flag=False)
    return replace(c, sim=sim)


def run(c: Configuration, solver=None, max_steps: int = 1_000_000,
        record: bool = True, observer=None) -> RunResult:
    """Alternate step and tick until quiescence or the time bound.

    ``observer(config, event, index)`` is called after every step.
    """
    trace: list = []
    n = 0
    while True:
        s = c.sim
        if s.pqueue is None:
            return RunResult(c, trace, "quiescent")
        if s.gtime + hp.find_min(s.pqueue).time > s.max_time:
            return RunResult(c, trace, "max_time")
        if n >= max_steps:
            return RunResult(c, trace, "max_steps")
        c, ev = step(c, solver)
        n += 1
        if record:
            trace.append(ev)
        if observer is not None:
            observer(c, ev, n)
        if c.sim.flag:
            c = tick(c)


# --------------------------------------------------------------------------
# construction and checks

def initial_configuration(agents, processes, *, seed: int = 0, factor=1, max_time=1000,
                          time_maps: Optional[dict] = None, uniform_watch: bool = False) -> Configuration:
    """Build a start state; processes are scheduled at time 0 with uids 1, 2, ...

    ``agents`` holds ``(AgentId, store, children)`` triples; ``processes``
    holds ``(AgentId, Command)`` pairs; ``time_maps`` maps a kind from
    :data:`KINDS` to a ``{AgentId: expression}`` dict.
    """
    objs = [AgentObject(AgentId()), *(AgentObject(a, store, frozenset(kids)) for a, store, kids in agents)]
    # declared spaces are registered in their parent's child set
    for a, _, _ in agents:
        if not a.is_root:
            objs.append(AgentObject(a.parent, children=frozenset({a.index})))
    procs = []
    pq = None
    for uid, (loc, cmd) in enumerate(processes, start=1):
        if isinstance(cmd, Nil):
            continue
        procs.append(ProcessObject(loc, uid, cmd))
        pq = hp.insert(hp.ScheduleEntry(Fraction(0), uid), pq)
    maps = {"tTM": {}, "aTM": {}, "sTM": {}, "eTM": {}}
    for kind, table in (time_maps or {}).items():
        maps[_MAP_NAME[kind]] = dict(table)
    sim = SimulationState(pqueue=pq, next_id=len(procs) + 1, counter=SampleCounter(seed),
                          factor=Fraction(factor), max_time=to_time(max_time),
                          uniform_watch=uniform_watch, **maps)
    return normalize(Configuration(tuple(objs), tuple(procs), sim))


_MAP_NAME = {"tell": "tTM", "ask": "aTM", "space": "sTM", "extrusion": "eTM"}


def live_uids(c: Configuration) -> tuple[list, list]:
    return ([e.uid for e in hp.entries(c.sim.pqueue)], [e.uid for e in hp.entries(c.sim.pend)])


def check_invariants(c: Configuration) -> None:
    """Raise AssertionError if uid bookkeeping or heap structure is broken."""
    q, p = live_uids(c)
    if c.sim.flag:
        # the fired entry stays at the root until the next tick
        q = q[1:]
    scheduled = q + p
    if len(scheduled) != len(set(scheduled)):
        raise AssertionError("uid scheduled twice")
    procs = {pr.uid for pr in c.processes}
    if set(scheduled) != procs:
        raise AssertionError(f"scheduled {sorted(scheduled)} but live {sorted(procs)}")
    hp.audit(c.sim.pqueue)
    hp.audit(c.sim.pend)
    ids = [a.id for a in c.agents]
    if len(ids) != len(set(ids)):
        raise AssertionError("duplicate agent ids")


def quiescence_violations(c: Configuration) -> list:
    """Processes alive at the end that are not asks waiting in ``pend``."""
    pending = {e.uid for e in hp.entries(c.sim.pend)}
    bad = []
    if c.sim.pqueue is not None:
        bad.append("pqueue not empty")
    for p in c.processes:
        if not isinstance(p.command, Ask) or p.uid not in pending:
            bad.append(f"process {p.uid} at {p.location}: {type(p.command).__name__}")
    return bad
