"""Monte-Carlo estimation of expected run observables with a CI width target."""
from pathlib import Path

from sscc.analysis import ExecutionTime, StorePredicateHolds, estimate
from sscc.casestudies import fixture_tasks
from sscc.syntax import load_spec, parse_formula

specs = Path(__file__).resolve().parent / "specs"

res = estimate(load_spec(specs / "uniform_tell.sscc"), ExecutionTime(), alpha=0.05, delta=0.2)
print(f"one tell with Unif(1, 3) time: {res.mean:.3f} +- {res.half_width:.3f} ({res.samples} runs)")

res = estimate(load_spec(specs / "zero_variance.sscc"), ExecutionTime())
print(f"constant times: {res.mean} +- {res.half_width} ({res.samples} runs)")

res = estimate(fixture_tasks(), ExecutionTime(), alpha=0.05, delta=0.5)
print(f"task assignment finish time: {res.mean:.3f} +- {res.half_width:.3f} ({res.samples} runs)")

done = StorePredicateHolds(parse_formula("DONE"))
res = estimate(fixture_tasks(), done, alpha=0.05, delta=0.1)
print(f"P(some store entails DONE): {res.mean:.3f} +- {res.half_width:.3f} ({res.samples} runs)")
