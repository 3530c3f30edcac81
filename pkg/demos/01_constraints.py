"""Constraint stores: satisfiability, entailment and the optional SMT bridge.

Run: python3 demos/01_constraints.py [path-to-z3]
"""
import sys

from sscc.constraints import ExternalSolver, check_sat, conjoin, entails, size, to_text
from sscc.syntax import parse_formula as F

store = conjoin(F("W == 5"), F("Y == 32"))
print("store:", to_text(store), "| size", size(store))
print("entails Y > 9:", entails(store, F("Y > 9")))
print("entails Y > 40:", entails(store, F("Y > 40")))

# integers are discrete: nothing lies strictly between 0 and 1
print("X > 0 and X < 1:", check_sat(F("X > 0 and X < 1")).value)
print("X < 5 and X >= 10:", check_sat(F("X < 5 and X >= 10")).value)

# difference constraints between variables
print("X < Y and Y < Z and Z < X:", check_sat(F("X < Y and Y < Z and Z < X")).value)

if len(sys.argv) > 1:
    solver = ExternalSolver(sys.argv[1])
    f = F("(p xor q) and X != 3 and X >= 3 and X <= 4")
    print(f"{solver}: {check_sat(f, solver).value}, internal: {check_sat(f).value}")
