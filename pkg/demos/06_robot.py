"""A watch process walking a random space hierarchy until it finds a target.

The walk picks among the parent and child spaces with normalized random
weights; ``uniform_watch=True`` uses equal weights instead.
"""
from sscc.analysis import ExecutionTime, estimate
from sscc.casestudies import HierarchyGenSpec, fixture_robot, generate_hierarchy

for depth in (3, 4, 5):
    gen = HierarchyGenSpec(depth=depth, seed=1)
    spaces, target = generate_hierarchy(gen)
    print(f"depth {depth}: {len(spaces)} spaces, target {target}")
    for uniform in (False, True):
        res = estimate(fixture_robot(gen, uniform_watch=uniform), ExecutionTime(),
                       alpha=0.05, delta=4.0, max_samples=2000)
        label = "equal weights" if uniform else "random weights"
        print(f"  {label:<14} E[time] = {res.mean:7.2f} +- {res.half_width:.2f} ({res.samples} runs)")
