"""Stochastic spatial concurrent constraint programs: simulate and analyze."""

from .constraints import (FALSE, TRUE, BoolVar, ExternalSolver, Formula, IntAtom, Verdict, atom,
                          check_sat, check_unsat, conj, conjoin, entails, size)
from .engine import SimulationState, TraceEvent, initial_configuration, run, step, tick
from .processes import NIL, Ask, Exc, In, Ind, Mu, Out, Par, Tell, Var, Watch, par
from .space import ROOT, AgentId, Configuration, aid, normalize
from .stochastic import Chi, Constant, Exp, Gam, Log, Norm, Unif, Weib

__version__ = "0.1.0"
