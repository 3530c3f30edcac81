from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from conftest import formulas
from sscc import scheduler as hp
from sscc.casestudies import fixture_container, fixture_tasks
from sscc.constraints import TRUE, And, BoolVar, Implies, Not, Or, to_text
from sscc.processes import NIL, Ask, Exc, In, Ind, Mu, Out, Par, Tell, Var, Watch
from sscc.space import ROOT, aid
from sscc.stochastic import Constant, Norm, Unif
from sscc.syntax import (SpecError, SystemSpec, parse_command, parse_formula, parse_spec,
                         render_command, render_spec)

SPECS = Path(__file__).resolve().parent.parent / "demos" / "specs"


def test_minimal_spec():
    spec = parse_spec("system { maxtime 10 process @ root : tell(X === 1) }")
    c = spec.configuration()
    assert [p.uid for p in c.processes] == [1]
    assert list(hp.entries(c.sim.pqueue)) == [(0, 1)]
    assert spec.seed == 0 and spec.factor == 1


def test_exc_sum_checked():
    with pytest.raises(SpecError):
        parse_spec("system { maxtime 1 process @ root : exc{ tell(a) : 0.6, tell(b) : 0.5 } }")


def test_maxtime_required():
    with pytest.raises(SpecError):
        parse_spec("system { }")


def test_var_outside_mu():
    with pytest.raises(SpecError):
        parse_spec("system { maxtime 1 process @ root : V(1) }")


def test_unknown_kind():
    with pytest.raises(SpecError):
        parse_spec("system { maxtime 1 timemap walk root -> Const(1) }")


def test_error_position():
    with pytest.raises(SpecError) as info:
        parse_spec("system {\n  maxtime 1\n  process @ root : tell(X ==) }")
    assert info.value.line == 3


def test_rationals_exact():
    spec = parse_spec("system { factor 0.1 maxtime 3/4 timemap tell root -> Const(1/3) }")
    assert spec.factor == Fraction(1, 10)
    assert spec.max_time == Fraction(3, 4)
    assert spec.time_maps["tell"][ROOT] == Constant(Fraction(1, 3))


def test_formula_precedence():
    p, q, r, s = (BoolVar(n) for n in "pqrs")
    f = parse_formula("not p and q or r implies s")
    assert f == Implies(Or(And(Not(p), q), r), s)
    assert parse_formula("X =/== 3") == parse_formula("X != 3")


def test_command_forms():
    c = parse_command("tell(a) || tell(b) || 0")
    assert c == Par(Tell(BoolVar("a")), Par(Tell(BoolVar("b")), NIL))
    assert parse_command("tell(a) in 1 out 1") == Out(In(Tell(BoolVar("a")), 1), 1)
    assert parse_command("ask a -> tell(b)") == Ask(BoolVar("a"), Tell(BoolVar("b")))
    assert parse_command("mu 2 . ask a -> V(2)") == Mu(2, Ask(BoolVar("a"), Var(2)))
    assert parse_command("watch(tell(w), u)") == Watch(Tell(BoolVar("w")), BoolVar("u"))
    assert parse_command("ind{ tell(a) : 0.5, 0 : 1 }") == Ind((Tell(BoolVar("a")), NIL), (0.5, 1.0))


@given(formulas())
def test_formula_round_trip(f):
    assert parse_formula(to_text(f)) == f


leaves = st.one_of(st.just(NIL), st.builds(Tell, formulas(2)))
cmds = st.recursive(leaves, lambda sub: st.one_of(
    st.builds(Par, sub, sub),
    st.builds(Ask, formulas(2), sub),
    st.builds(In, sub, st.integers(0, 3)),
    st.builds(Out, sub, st.integers(0, 3)),
    st.builds(lambda a, b: Exc((a, b), (0.25, 0.75)), sub, sub),
    st.builds(lambda a, b: Ind((a, b), (0.5, 1.0)), sub, sub),
    st.builds(Watch, sub, formulas(1)),
), max_leaves=6)


@given(cmds)
def test_command_round_trip(c):
    assert parse_command(render_command(c)) == c


dists = st.sampled_from([Norm(1.0, 0.2), Unif(1.0, 3.0), Constant(Fraction(3, 7))])


@given(st.integers(0, 99), st.fractions(0, 5, max_denominator=9), st.fractions(1, 100, max_denominator=9),
       dists, cmds)
def test_spec_round_trip(seed, factor, max_time, d, c):
    spec = SystemSpec(seed=seed, factor=factor, max_time=max_time,
                      time_maps={"tell": {ROOT: d}, "space": {aid("1.root"): d}},
                      agents=((ROOT, TRUE, frozenset({1})), (aid("1.root"), parse_formula("X > 2"), frozenset())),
                      processes=((ROOT, c), (aid("1.root"), Tell(TRUE))))
    assert parse_spec(render_spec(spec)) == spec


@pytest.mark.parametrize("fixture", [fixture_container(), fixture_tasks()])
def test_fixture_round_trip(fixture):
    assert parse_spec(render_spec(fixture)) == fixture


def test_demo_specs_parse():
    files = sorted(SPECS.glob("*.sscc"))
    assert files
    for path in files:
        parse_spec(path.read_text()).check()
