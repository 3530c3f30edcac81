"""Nested containers with constant time maps.

A process asks a container for information, moves a constraint into a
nested container and extrudes it back out.  With constant maps the run is
deterministic, so we also try every reading of the four map letters.
"""
from fractions import Fraction

from sscc.casestudies import container_assignments, fixture_container
from sscc.engine import run
from sscc.space import tree_lines

spec = fixture_container()
res = run(spec.configuration())
for ev in res.trace:
    print(f"t={str(ev.gtime):>6}  {ev.rule:<10} uid {ev.uid} at {ev.payload['loc']}")
print("\nfinal state after", res.final.sim.gtime, "time units:")
print("\n".join(tree_lines(res.final)))

print("\nassignments of the four maps that give 13/5:")
for o in container_assignments():
    if o.elapsed == Fraction(13, 5):
        print(" ", o.assignment, "factor", o.factor)
