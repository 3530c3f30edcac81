"""Seeded state scans: inconsistency, knowledge inference, shared knowledge.

Each predicate is evaluated after every step of every seeded run.  This is
a testing tool: a seed that never reaches a state proves nothing.
"""
from sscc.analysis import EquivalentStores, InconsistentStore, StoreEntails, scan
from sscc.casestudies import fixture_knowledge
from sscc.constraints import to_text
from sscc.syntax import parse_formula

seeds = range(32)


def show(title, matches, limit=3):
    print(f"{title}: {len(matches)} matching states")
    seen = set()
    for m in matches:
        key = tuple((str(a.id), to_text(a.store)) for a in m.witness)
        if key not in seen and len(seen) < limit:
            seen.add(key)
            print(f"  seed {m.seed} step {m.index}:", "; ".join(f"{i} |- {s}" for i, s in key))


show("inconsistent store (root starts with X < 5)",
     scan(fixture_knowledge("X < 5"), seeds, InconsistentStore()))
show("store entails Y > 9", scan(fixture_knowledge(), seeds, StoreEntails(parse_formula("Y > 9"))))
show("two agents with equivalent stores", scan(fixture_knowledge(), seeds, EquivalentStores()))
