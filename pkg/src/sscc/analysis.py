"""Monte-Carlo expectation estimates and seeded trace scans.

A *model* is an initial :class:`Configuration` (or anything with a
``configuration()`` method, such as a parsed system spec).  Run ``i`` of
an estimate uses seed ``seed0 + i``; everything else about the model is
left untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional

import numpy as np
from scipy import stats

from .constraints import TRUE, Formula, check_sat, Verdict, entails, to_text
from .engine import run
from .space import AgentId, Configuration
from .stochastic import SampleCounter, to_time


def as_configuration(model) -> Configuration:
    if isinstance(model, Configuration):
        return model
    if hasattr(model, "configuration"):
        return model.configuration()
    raise TypeError(f"not a model: {model!r}")


def reseed(c: Configuration, seed: int, max_time=None) -> Configuration:
    sim = replace(c.sim, counter=SampleCounter(seed))
    if max_time is not None:
        sim = replace(sim, max_time=to_time(max_time))
    return replace(c, sim=sim)


# --------------------------------------------------------------------------
# observables

class Observable:
    name = "observable"

    def __call__(self, final: Configuration) -> float:
        raise NotImplementedError


class ExecutionTime(Observable):
    """Global clock of the final configuration."""
    name = "time"

    def __call__(self, final):
        return float(final.sim.gtime)


@dataclass(frozen=True)
class StorePredicateHolds(Observable):
    """1.0 if the agent's store entails ``formula``; ``agent=None`` means any agent."""
    formula: Formula
    agent: Optional[AgentId] = None
    solver: object = None
    name = "store"

    def __call__(self, final):
        if self.agent is None:
            found = any(entails(a.store, self.formula, self.solver) for a in final.agents)
        else:
            found = final.has_agent(self.agent) and entails(final.store(self.agent), self.formula, self.solver)
        return 1.0 if found else 0.0


class AgentCount(Observable):
    name = "agents"

    def __call__(self, final):
        return float(len(final.agents))


@dataclass(frozen=True)
class UserTagged(Observable):
    tag: str
    extract: Callable[[Configuration], float]

    @property
    def name(self):
        return self.tag

    def __call__(self, final):
        return float(self.extract(final))


# --------------------------------------------------------------------------
# sequential estimation

@dataclass(frozen=True)
class EstimationResult:
    mean: float
    half_width: float
    samples: int
    alpha: float
    delta: float
    converged: bool = True
    seed0: int = 0

    def to_record(self) -> dict:
        return {"mean": self.mean, "half_width": self.half_width, "samples": self.samples,
                "alpha": self.alpha, "delta": self.delta, "converged": self.converged, "seed0": self.seed0}


def confidence_half_width(values, alpha: float) -> float:
    """Half width of the two-sided Student-t interval for the mean."""
    x = np.asarray(values, dtype=float)
    n = x.size
    if n < 2:
        return math.inf
    s = x.std(ddof=1)
    if s == 0.0:
        return 0.0
    return float(stats.t.ppf(1.0 - alpha / 2.0, n - 1) * s / math.sqrt(n))


def sequential_estimate(sample: Callable[[int], float], *, alpha: float = 0.05, delta: float = 0.1,
                        batch: int = 30, max_samples: int = 10_000, seed0: int = 0) -> EstimationResult:
    """Draw batches of ``sample(seed)`` until the interval width is at most ``delta``.

    Does not raise on non-convergence; check ``converged``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if batch < 2:
        raise ValueError("batch must be at least 2")
    values: list = []
    hw = math.inf
    while len(values) < max_samples:
        start = len(values)
        take = min(batch, max_samples - start)
        values.extend(sample(seed0 + start + i) for i in range(take))
        hw = confidence_half_width(values, alpha)
        if 2.0 * hw <= delta:
            return EstimationResult(float(np.mean(values)), hw, len(values), alpha, delta, True, seed0)
    return EstimationResult(float(np.mean(values)), hw, len(values), alpha, delta, False, seed0)


def estimate(model, observable: Observable, *, alpha: float = 0.05, delta: float = 0.1, batch: int = 30,
             max_samples: int = 10_000, seed0: Optional[int] = None, max_time=None,
             solver=None) -> EstimationResult:
    """Estimate E[observable] over independent seeded runs of ``model``."""
    c0 = as_configuration(model)
    if seed0 is None:
        seed0 = c0.sim.counter.seed

    def sample(seed):
        return observable(run(reseed(c0, seed, max_time), solver, record=False).final)

    return sequential_estimate(sample, alpha=alpha, delta=delta, batch=batch,
                               max_samples=max_samples, seed0=seed0)


# --------------------------------------------------------------------------
# state predicates and scanning

class StatePredicate:
    def witnesses(self, c: Configuration, solver=None) -> list:
        """Witness tuples of ``(AgentObject, ...)``; empty when the predicate fails."""
        raise NotImplementedError


class InconsistentStore(StatePredicate):
    def witnesses(self, c, solver=None):
        return [(a,) for a in c.agents if check_sat(a.store, solver) is Verdict.UNSAT]


@dataclass(frozen=True)
class StoreEntails(StatePredicate):
    formula: Formula

    def witnesses(self, c, solver=None):
        return [(a,) for a in c.agents if entails(a.store, self.formula, solver)]


class EquivalentStores(StatePredicate):
    """Two distinct agents whose stores entail each other, neither being ``true``."""

    def witnesses(self, c, solver=None):
        agents = [a for a in c.agents if a.store != TRUE]
        out = []
        for i, a in enumerate(agents):
            for b in agents[i + 1:]:
                if entails(a.store, b.store, solver) and entails(b.store, a.store, solver):
                    out.append((a, b))
        return out


@dataclass(frozen=True)
class Custom(StatePredicate):
    """``test(store_a)`` over single agents, or ``test(store_a, store_b)`` over ordered pairs."""
    test: Callable
    arity: int = 1

    def witnesses(self, c, solver=None):
        if self.arity == 1:
            return [(a,) for a in c.agents if self.test(a.store)]
        return [(a, b) for a in c.agents for b in c.agents
                if a.id != b.id and self.test(a.store, b.store)]


@dataclass(frozen=True)
class Match:
    seed: int
    index: int          # 1-based step index within the run
    gtime: object
    witness: tuple      # AgentObjects

    def to_record(self) -> dict:
        return {"seed": self.seed, "step": self.index, "gtime": str(self.gtime),
                "agents": [str(a.id) for a in self.witness],
                "stores": [to_text(a.store) for a in self.witness]}


def scan(model, seeds: Iterable[int], predicate: StatePredicate, max_time=None,
         solver=None) -> list:
    """Evaluate ``predicate`` after every step of each seeded run."""
    c0 = as_configuration(model)
    matches = []
    for seed in seeds:
        def observe(c, ev, n, seed=seed):
            for w in predicate.witnesses(c, solver):
                matches.append(Match(seed, n, c.sim.gtime, w))
        run(reseed(c0, seed, max_time), solver, record=False, observer=observe)
    return matches
