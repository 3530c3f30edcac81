from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sscc import scheduler as hp
from sscc.casestudies import fixture_knowledge, fixture_tasks
from sscc.constraints import TRUE, BoolVar, entails
from sscc.engine import (EngineError, SimulationState, check_invariants, get_ancestor, get_time_cmd,
                         initial_configuration, quiescence_violations, run, select_exclusive,
                         select_independent, step, tick)
from sscc.processes import Ask, Tell
from sscc.space import ROOT, Configuration, aid
from sscc.stochastic import Constant, Norm, SampleCounter, Unif, sample_time
from sscc.syntax import parse_command, parse_formula

F = parse_formula
T = Tell(TRUE)


def sim(**kw):
    return SimulationState(counter=SampleCounter(kw.pop("seed", 0)), **kw)


# time functions

def test_ask_time_is_zero():
    s = sim(seed=4)
    assert get_time_cmd(Ask(TRUE, T), ROOT, s) == (0, s.counter)


def test_tell_time_mapped_and_default():
    u = Unif(2.0, 3.0)
    s = sim(seed=4, tTM={ROOT: u})
    assert get_time_cmd(T, ROOT, s) == sample_time(u, s.counter)
    assert get_time_cmd(T, aid("1.root"), s) == sample_time(Norm(1.0, 0.2), s.counter)


def test_get_ancestor():
    u = Unif(2.0, 3.0)
    assert get_ancestor({}, ROOT) == Norm(1.0, 0.2)
    assert get_ancestor({aid("1.root"): u}, aid("1.root")) is u
    assert get_ancestor({aid("1.root"): u}, aid("2.1.root")) is u


# choice

def test_exclusive_singleton():
    s = sim(seed=1, tTM={ROOT: Unif(1.0, 2.0)})
    i, c, t, counter = select_exclusive([T], [1.0], ROOT, s)
    assert (i, c) == (0, T) and counter.counter == 1


def test_exclusive_frequency():
    hits = [select_exclusive([T, T], [0.6, 0.4], ROOT, sim(seed=k, tTM={ROOT: Constant(1)}))[0] == 0
            for k in range(1000)]
    assert abs(np.mean(hits) - 0.6) <= 0.05


def test_exclusive_degenerate():
    assert all(select_exclusive([T, T], [1.0, 0.0], ROOT, sim(seed=k))[0] == 0 for k in range(200))


def test_independent_degenerate():
    assert select_independent([T, T], [0.0, 0.0], ROOT, sim(seed=3))[0] == []
    chosen, _ = select_independent([T, T, T], [1.0] * 3, ROOT, sim(seed=3))
    assert [i for i, _, _ in chosen] == [0, 1, 2]


def test_independent_frequency():
    counts = np.zeros(4)
    for k in range(1000):
        for i, _, _ in select_independent([T] * 4, [0.5] * 4, ROOT, sim(seed=k))[0]:
            counts[i] += 1
    assert np.all(np.abs(counts / 1000 - 0.5) <= 0.05)


# step and tick

def config(text, store="true", **kw):
    return initial_configuration([(ROOT, F(store), frozenset())], [(ROOT, parse_command(text))], **kw)


def test_tell_step():
    c, ev = step(config("tell(X > 1)", "Y == 2"))
    assert c.store(ROOT) == F("Y == 2 and X > 1")
    assert c.sim.flag and ev.rule == "tell"


def test_blocked_ask_delays():
    c0 = config("ask (X > 1) -> tell(Y == 1)")
    c, ev = step(c0)
    assert ev.rule == "delay" and not c.sim.flag
    assert c.sim.pqueue is None
    assert [e.uid for e in hp.entries(c.sim.pend)] == [1]


def test_step_on_empty_queue():
    c = config("tell(X > 1)")
    with pytest.raises(EngineError):
        step(replace(c, sim=replace(c.sim, pqueue=None)))


def q(*items):
    return hp.from_entries((Fraction(t), u) for t, u in items)


def test_tick_zero():
    s = sim(pqueue=q((0, 1), (2, 2)), pend=q((0, 3)), flag=True, gtime=Fraction(5))
    c = tick(Configuration((), (), s))
    assert c.sim.gtime == 5 and c.sim.pend is None
    assert sorted(hp.entries(c.sim.pqueue)) == [(0, 3), (2, 2)]


def test_tick_shifts():
    s = sim(pqueue=q((1, 1), (3, 2)), flag=True)
    c = tick(Configuration((), (), s))
    assert c.sim.gtime == 1 and list(hp.entries(c.sim.pqueue)) == [(2, 2)]


def test_run_single_tell():
    res = run(config("tell(X == 1)"))
    assert res.reason == "quiescent" and len(res.trace) == 1
    assert res.final.store(ROOT) == F("X == 1")


def test_run_knowledge_completes():
    res = run(fixture_knowledge().configuration())
    assert res.reason == "quiescent"
    assert entails(res.final.store(ROOT), BoolVar("DONE"))


def test_unsatisfied_ask_remains():
    res = run(config("ask (X > 1) -> tell(Y == 1) || tell(Z == 0)"))
    assert res.reason == "quiescent"
    assert [type(p.command) for p in res.final.processes] == [Ask]
    assert quiescence_violations(res.final) == []


def test_max_time_stop():
    c = config("tell(X == 1) || tell(Y == 1)", time_maps={"tell": {ROOT: Constant(5)}}, max_time=3)
    assert run(c).reason == "max_time"


def test_space_and_extrusion():
    res = run(config("(tell(X == 1) || tell(Y == 2) out 0) in 0"))
    assert res.final.store(aid("0.root")) == F("X == 1")
    assert res.final.store(ROOT) == F("Y == 2")
    assert res.final.agent(ROOT).children == frozenset({0})


def test_bad_extrusion():
    with pytest.raises(EngineError):
        run(config("(tell(X == 1) out 3) in 0"))


def test_recursion_unfolds_once_per_firing():
    text = "tell(N == 0) || mu 1 . ask (N == 0) -> (tell(M == 1) || ask (K == 1) -> V(1))"
    res = run(config(text))
    assert res.final.store(ROOT) == F("N == 0 and M == 1")
    assert quiescence_violations(res.final) == []


# properties over whole runs

def audit_run(c0):
    prev = c0
    def observe(c, ev, n):
        nonlocal prev
        check_invariants(c)
        assert c.sim.gtime >= prev.sim.gtime
        assert c.sim.next_id >= prev.sim.next_id
        assert c.sim.counter.counter >= prev.sim.counter.counter
        before = prev.agent_map()
        for a in c.agents:
            if a.id in before:
                assert entails(a.store, before[a.id].store)
        prev = c
    return run(c0, observer=observe)


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_invariants_on_tasks(seed):
    res = audit_run(fixture_tasks(seed).configuration())
    assert res.reason == "quiescent"
    assert quiescence_violations(res.final) == []


def test_tick_advances_by_minimum():
    c = fixture_tasks(2).configuration()
    while c.sim.pqueue is not None:
        c, _ = step(c)
        if c.sim.flag:
            m = hp.find_min(c.sim.pqueue).time
            c2 = tick(c)
            assert c2.sim.gtime == c.sim.gtime + m
            c = c2


@given(st.integers(0, 10_000))
@settings(max_examples=20)
def test_deterministic_traces(seed):
    c = fixture_tasks(seed).configuration()
    a = [e.to_json() for e in run(c).trace]
    b = [e.to_json() for e in run(c).trace]
    assert a == b


def test_exclusive_spawns_one():
    for seed in range(40):
        for ev in run(fixture_tasks(seed).configuration()).trace:
            if ev.rule == "exclusive":
                assert len(ev.payload["spawned"]) == 1
            if ev.rule == "independent":
                ch = ev.payload["choice"]
                assert ch == sorted(ch)
