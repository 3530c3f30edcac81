"""The three worked systems as ready-made specs.

* ``fixture_container`` -- nested containers with constant time maps.
* ``fixture_tasks``     -- task assignment with exclusive and independent choice.
* ``fixture_robot``     -- a watch process walking a random hierarchy.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .constraints import TRUE, BoolVar
from .engine import KINDS, run
from .processes import Tell, Watch
from .space import ROOT, AgentId, aid
from .stochastic import Constant, Norm, StochasticExpression, Unif, uniform01
from .syntax import SystemSpec, parse_command, parse_formula

# --------------------------------------------------------------------------
# containers

CONTAINER_PROCESS = ("(ask (X > 2) -> (((tell(Y < 10) in 0) in 1) out 0)) in 0"
                     " || tell(Z != 10) in 2")

# the four constant maps of the example, in the order they are listed
CONTAINER_MAPS = {
    "alpha": {"root": "1/10", "0.root": "3/20", "1.root": "3/20", "2.root": "3/20", "0.1.root": "1/5"},
    "mu": {"root": "1/20", "0.root": "1/10", "1.root": "1/10", "2.root": "1/10", "0.1.root": "3/20"},
    "phi": {"root": "1/2", "0.root": "7/10", "1.root": "13/20", "2.root": "3/5", "0.1.root": "4/5"},
    "rho": {"root": "1/2", "0.root": "13/20", "1.root": "1/2", "2.root": "3/5", "0.1.root": "1"},
}

# alpha..rho read as tell, ask, space, extrusion (the order the costs are introduced)
CONTAINER_ASSIGNMENT = {"tell": "alpha", "ask": "mu", "space": "phi", "extrusion": "rho"}


def _const_map(table: dict) -> dict:
    return {aid(k): Constant(Fraction(v)) for k, v in table.items()}


def fixture_container(assignment: Optional[dict] = None, factor=0) -> SystemSpec:
    """Containers example; ``assignment`` maps each kind to one of alpha/mu/phi/rho."""
    assignment = assignment or CONTAINER_ASSIGNMENT
    agents = (
        (ROOT, parse_formula("W == 9"), frozenset({0, 1, 2})),
        (aid("0.root"), parse_formula("X >= 11"), frozenset()),
        (aid("1.root"), TRUE, frozenset({0})),
        (aid("0.1.root"), parse_formula("Y > 5"), frozenset()),
        (aid("2.root"), TRUE, frozenset()),
    )
    maps = {kind: _const_map(CONTAINER_MAPS[assignment[kind]]) for kind in KINDS}
    return SystemSpec(seed=0, factor=Fraction(factor), max_time=Fraction(100), time_maps=maps,
                      agents=agents, processes=((ROOT, parse_command(CONTAINER_PROCESS)),))


@dataclass(frozen=True)
class AssignmentOutcome:
    assignment: dict
    factor: Fraction
    elapsed: Fraction


def container_assignments(factors=(0, 1)) -> list:
    """Elapsed time under each of the 24 ways to read alpha/mu/phi/rho as the four maps."""
    out = []
    for perm in itertools.permutations(CONTAINER_MAPS):
        assignment = dict(zip(KINDS, perm))
        for factor in factors:
            res = run(fixture_container(assignment, factor).configuration())
            out.append(AssignmentOutcome(assignment, Fraction(factor), res.final.sim.gtime))
    return out


# --------------------------------------------------------------------------
# task assignment

P11 = ("ind{ tell(A == 1) in 1 : 0.5, tell(B == 1) in 2 : 0.5,"
       " tell(C == 1) in 3 : 0.5, tell(D == 1) in 4 : 0.5 }")
P1 = (f"exc{{ (({P11}) in 4 || tell(Y == 5) || ask (Y > 2) -> (tell(Y > 2) out 1)) in 1 : 0.60,"
      " (tell(Y == 25) || ask (Y > 2) -> (tell(Y > 2) out 2)) in 2 : 0.40 }")
P2 = "ask (Y > 2) -> (tell(X == 15) || ask (X >= 10) -> (tell(X >= 10) out 1))"
Q = ("((tell(Z == 9) || ask (Z < 15) -> (tell(Z < 15) out 3)) in 3"
     " || (tell(W == 25) || ask (W > 0) -> (tell(W > 0) out 4)) in 4"
     " || ask (Z < 15 and W > 0) -> (tell(V == 67) || ask (V < 100) -> (tell(V < 100) out 2))) in 2")
TASKS_PROCESS = (f"({P1} || {P2}) in 1 || {Q}"
                 " || ask (X >= 10 and V < 100) -> (tell(U == 50) || ask (U < 55) -> tell(DONE))")

NORM_MAPS = {"tell": Norm(1.0, 0.2), "ask": Norm(1.2, 0.2), "space": Norm(0.5, 0.2),
              "extrusion": Norm(0.5, 0.2)}


def _root_maps() -> dict:
    return {kind: {ROOT: e} for kind, e in NORM_MAPS.items()}


def fixture_tasks(seed: int = 13) -> SystemSpec:
    return SystemSpec(seed=seed, factor=Fraction(1, 2), max_time=Fraction(1000), time_maps=_root_maps(),
                      agents=((ROOT, TRUE, frozenset()),),
                      processes=((ROOT, parse_command(TASKS_PROCESS)),))


# the simplified system used by the reachability queries
KNOWLEDGE_PROCESS = (
    "((tell(W == 5) || ask (W > 1) -> (tell(Y == 32) || ask (Y > 9) -> (tell(Y > 9) out 2))) in 2"
    " || ask (Y > 2) -> (tell(X == 15) || ask (X >= 10) -> (tell(X >= 10) out 1))) in 1"
    " || ask (X >= 10) -> (tell(U == 50) || ask (U < 55) -> tell(DONE))")


def fixture_knowledge(root_store: str = "true", seed: int = 13) -> SystemSpec:
    return SystemSpec(seed=seed, factor=Fraction(1, 2), max_time=Fraction(1000), time_maps=_root_maps(),
                      agents=((ROOT, parse_formula(root_store), frozenset()),),
                      processes=((ROOT, parse_command(KNOWLEDGE_PROCESS)),))


# --------------------------------------------------------------------------
# robot

UNWANTED = BoolVar("UNWANTED")
WARNING = BoolVar("WARNING")


@dataclass(frozen=True)
class HierarchyGenSpec:
    """Seeded random tree: each node above ``depth`` gets ``floor(branching draw)`` children."""
    depth: int = 3
    branching: StochasticExpression = Unif(1.0, 4.0)
    target: str = "deepest"     # or "random": uniform over non-root spaces
    seed: int = 0
    max_spaces: int = 15

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("hierarchy depth must be at least 1")
        if self.target not in ("deepest", "random"):
            raise ValueError(f"unknown target rule {self.target!r}")


def generate_hierarchy(gen: HierarchyGenSpec) -> tuple:
    """Spaces in breadth-first order (root first) and the target space.

    ``depth`` counts levels including the root, so depth 1 is the root alone.
    At least one node per level is kept so the requested depth is reached.
    """
    index = 0

    def draw():
        nonlocal index
        index += 1
        return gen.branching.draw(gen.seed, index)

    spaces = [ROOT]
    level = [ROOT]
    if gen.max_spaces < gen.depth:
        raise ValueError("max_spaces too small for the requested depth")
    for lvl in range(1, gen.depth):
        nxt = []
        deeper = gen.depth - 1 - lvl   # one space per remaining level is reserved
        for node in level:
            k = max(0, int(math.floor(draw())))
            if node is level[-1] and not nxt:
                k = max(k, 1)
            k = min(k, gen.max_spaces - len(spaces) - len(nxt) - deeper)
            nxt.extend(node.child(i) for i in range(1, k + 1))
        spaces.extend(nxt)
        level = nxt
    if gen.target == "deepest":
        target = level[0]
    else:
        index += 1
        pick = int(uniform01(gen.seed, index, 1) * (len(spaces) - 1))
        target = spaces[1 + pick]
    return tuple(spaces), target


def chain(n: int) -> tuple:
    """Spaces root, 1.root, 1.1.root, ... (``n`` in total)."""
    spaces = [ROOT]
    for _ in range(n - 1):
        spaces.append(spaces[-1].child(1))
    return tuple(spaces)


def robot_system(spaces, target: AgentId, *, time_maps: Optional[dict] = None, seed: int = 0,
                 max_time=10_000, uniform_watch: bool = False) -> SystemSpec:
    spaces = tuple(spaces)
    kids = {s: set() for s in spaces}
    for s in spaces:
        if not s.is_root:
            kids[s.parent].add(s.index)
    agents = tuple((s, UNWANTED if s == target else TRUE, frozenset(kids[s])) for s in spaces)
    maps = time_maps if time_maps is not None else _root_maps()
    return SystemSpec(seed=seed, factor=Fraction(1), max_time=Fraction(max_time), time_maps=maps,
                      agents=agents, processes=((ROOT, Watch(Tell(WARNING), UNWANTED)),),
                      uniform_watch=uniform_watch)


def unit_maps() -> dict:
    return {kind: {ROOT: Constant(1)} for kind in KINDS}


def fixture_robot(gen: HierarchyGenSpec, *, time_maps: Optional[dict] = None, max_time=10_000,
                  uniform_watch: bool = False) -> SystemSpec:
    spaces, target = generate_hierarchy(gen)
    return robot_system(spaces, target, time_maps=time_maps, seed=gen.seed, max_time=max_time,
                        uniform_watch=uniform_watch)
