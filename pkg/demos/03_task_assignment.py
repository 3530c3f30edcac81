"""Task assignment with exclusive and independent probabilistic choice.

Runs the system once, then counts branch outcomes over many seeds.
"""
from collections import Counter

from sscc.casestudies import fixture_tasks
from sscc.engine import run
from sscc.space import tree_lines

res = run(fixture_tasks(seed=13).configuration())
print("seed 13 finished at", float(res.final.sim.gtime), "with reason", res.reason)
print("\n".join(tree_lines(res.final)))

branch, included = Counter(), Counter()
n = 500
for seed in range(n):
    for ev in run(fixture_tasks(seed).configuration()).trace:
        if ev.rule == "exclusive":
            branch[ev.payload["choice"]] += 1
        elif ev.rule == "independent":
            included.update(ev.payload["choice"])
print(f"\nexclusive branch frequencies over {n} seeds:",
      {k: v / n for k, v in sorted(branch.items())})
print("independent inclusion given the first branch:",
      {k: round(v / branch[0], 3) for k, v in sorted(included.items())})
