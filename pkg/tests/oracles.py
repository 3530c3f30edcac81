"""Reference implementations the tests compare against.

Nothing here calls into the package's decision procedure or evaluator.
"""

from __future__ import annotations

import itertools
import operator
import random

from sscc import constraints as cs

_REL = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge,
        "==": operator.eq, "!=": operator.ne}


def truth(f, env) -> bool:
    if f == cs.TRUE:
        return True
    if f == cs.FALSE:
        return False
    if isinstance(f, cs.BoolVar):
        return env[f.name]
    if isinstance(f, cs.IntAtom):
        val = lambda t: t.value if isinstance(t, cs.IntConst) else env[t.name]
        return _REL[f.op](val(f.lhs), val(f.rhs))
    if isinstance(f, cs.Not):
        return not truth(f.arg, env)
    a, b = truth(f.left, env), truth(f.right, env)
    return {cs.And: a and b, cs.Or: a or b, cs.Xor: a != b,
            cs.Implies: (not a) or b, cs.Iff: a == b}[type(f)]


def _collect(f, bools, ints, consts, atoms):
    if isinstance(f, cs.BoolVar):
        bools.add(f.name)
    elif isinstance(f, cs.IntAtom):
        atoms.append(f)
        for t in (f.lhs, f.rhs):
            (ints.add(t.name) if isinstance(t, cs.IntVar) else consts.add(t.value))
    elif isinstance(f, cs.Not):
        _collect(f.arg, bools, ints, consts, atoms)
    elif isinstance(f, cs.BINARY):
        _collect(f.left, bools, ints, consts, atoms)
        _collect(f.right, bools, ints, consts, atoms)


def brute_sat(f) -> bool:
    """Enumerate all assignments over a domain wide enough for the fragment.

    Integers range over [min const - 2, max const + 2]; when two variables
    are compared, the range is widened by the number of atoms so chains of
    strict inequalities still fit.
    """
    bools, ints, consts, atoms = set(), set(), set(), []
    _collect(f, bools, ints, consts, atoms)
    lo, hi = (min(consts), max(consts)) if consts else (0, 0)
    lo, hi = lo - 2, hi + 2
    if any(isinstance(a.lhs, cs.IntVar) and isinstance(a.rhs, cs.IntVar) for a in atoms):
        lo, hi = lo - len(atoms), hi + len(atoms)
    names = sorted(ints)
    bnames = sorted(bools)
    for ivals in itertools.product(range(lo, hi + 1), repeat=len(names)):
        for bvals in itertools.product((False, True), repeat=len(bnames)):
            env = dict(zip(names, ivals))
            env.update(zip(bnames, bvals))
            if truth(f, env):
                return True
    return False


INT_NAMES = ("X", "Y", "Z")
BOOL_NAMES = ("p", "q")


def random_formula(rng: random.Random, max_atoms: int = 4, lo: int = -8, hi: int = 8):
    """Random fragment formula with at most ``max_atoms`` leaves."""
    n = rng.randint(1, max_atoms)

    def leaf():
        r = rng.random()
        if r < 0.15:
            return cs.BoolVar(rng.choice(BOOL_NAMES))
        if r < 0.2:
            return rng.choice((cs.TRUE, cs.FALSE))
        op = rng.choice(cs.REL_OPS)
        lhs = cs.IntVar(rng.choice(INT_NAMES))
        rhs = cs.IntVar(rng.choice(INT_NAMES)) if rng.random() < 0.25 else cs.IntConst(rng.randint(lo, hi))
        return cs.IntAtom(lhs, op, rhs)

    def build(k):
        if k == 1:
            f = leaf()
        else:
            split = rng.randint(1, k - 1)
            node = rng.choice((cs.And, cs.And, cs.Or, cs.Or, cs.Xor, cs.Implies, cs.Iff))
            f = node(build(split), build(k - split))
        return cs.Not(f) if rng.random() < 0.2 else f

    return build(n)


def heap_ops_oracle(ops):
    """Replay (kind, arg) operations on a plain sorted list of times."""
    items = []
    out = []
    for kind, arg in ops:
        if kind == "insert":
            items.append(arg)
        elif kind == "pop" and items:
            items.sort()
            out.append(items.pop(0))
        elif kind == "delta":
            items = [max(t - arg, 0) for t in items]
        elif kind == "merge":
            items.extend(arg)
    return out, sorted(items)


def chain_walk_mean(n: int) -> float:
    """Expected robot time on a chain of ``n`` spaces, target at the leaf, unit costs.

    Each interior space offers parent and child; the exclusive choice there
    goes down with probability 1/2 on average (normalized uniform weights are
    exchangeable).  Let h(k) be the expected moves to reach the leaf from
    depth k: h(n-1) = 0, h(0) = 1 + h(1), h(k) = 1 + (h(k+1) + h(k-1)) / 2.
    The warning tell adds one more unit.
    """
    # solve the tridiagonal system by shooting: h(k) = a_k + b_k * h(0)
    if n == 1:
        return 1.0
    a = [0.0, -1.0]          # h(1) = h(0) - 1
    b = [1.0, 1.0]
    for k in range(1, n - 1):
        # h(k+1) = 2 h(k) - h(k-1) - 2
        a.append(2 * a[k] - a[k - 1] - 2)
        b.append(2 * b[k] - b[k - 1])
    h0 = -a[n - 1] / b[n - 1]
    return h0 + 1.0
