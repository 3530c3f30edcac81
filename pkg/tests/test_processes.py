import warnings

import pytest
from hypothesis import given, strategies as st

from sscc.constraints import TRUE
from sscc.processes import (NIL, Ask, Exc, In, Ind, Mu, Out, Par, Tell, Var, children, command_list,
                            free_vars, is_closed, lint, par, prob_list, replace, unfold)
from sscc.space import ROOT, aid
from sscc.stochastic import SampleCounter
from sscc.syntax import parse_command

Q = Tell(TRUE)


def test_replace_examples():
    assert replace(1, Var(1), Q) == Q
    assert replace(1, Mu(1, Var(1)), Q) == Mu(1, Var(1))
    assert replace(1, Tell(TRUE), Var(9)) == Tell(TRUE)


def test_unfold():
    m = parse_command("mu 1 . ask (X > 0) -> (tell(Y == 1) || V(1))")
    assert unfold(m) == Ask(m.body.guard, Par(m.body.body.left, m))
    assert is_closed(unfold(m))


def test_command_list_examples():
    assert command_list(aid("4.root"), [], Q) == [Out(Q, 4)]
    assert command_list(ROOT, [], Q) == []
    assert command_list(ROOT, {2, 1}, Q) == [In(Q, 1), In(Q, 2)]


def test_prob_list_single():
    probs, c = prob_list(1, SampleCounter(5))
    assert probs == [1.0] and c.counter == 1


def test_par_right_associates():
    a, b, c = Tell(TRUE), NIL, Q
    assert par(a, b, c) == Par(a, Par(b, c))
    assert par() == NIL
    assert (a | b) == Par(a, b)


def test_choice_validation():
    with pytest.raises(ValueError):
        Exc((Q, Q), (0.5, 0.4))
    with pytest.raises(ValueError):
        Ind((Q,), (1.5,))
    with pytest.raises(ValueError):
        Ind((Q, Q), (0.5,))
    Ind((Q, Q), (0.5, 0.5))


def test_lint_flags_unguarded():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert lint(Mu(1, Par(Q, Var(1))))
        assert not lint(Mu(1, Ask(TRUE, Var(1))))


@given(st.integers(1, 8), st.integers(0, 10_000))
def test_prob_list_sums_to_one(n, seed):
    probs, c = prob_list(n, SampleCounter(seed, 3))
    assert abs(sum(probs) - 1.0) < 1e-9
    assert c.counter - 3 == n
    assert all(0 <= q <= 1 for q in probs)


terms = st.recursive(
    st.one_of(st.just(Q), st.just(NIL), st.builds(Var, st.integers(1, 2))),
    lambda sub: st.one_of(st.builds(Par, sub, sub), st.builds(In, sub, st.integers(0, 2)),
                          st.builds(Ask, st.just(TRUE), sub), st.builds(Mu, st.integers(1, 2), sub)),
    max_leaves=8)


def inner_mus(c):
    if isinstance(c, Mu):
        yield c
    for sub in children(c):
        yield from inner_mus(sub)


@given(terms, st.integers(1, 2))
def test_replace_preserves_closedness(body, n):
    # replace does not enter nested mu terms, so they must be closed themselves
    closed = Mu(n, body)
    if is_closed(closed) and all(is_closed(m) for m in inner_mus(body)):
        assert is_closed(unfold(closed))
    assert free_vars(replace(n, body, Q)) <= free_vars(body)


@given(st.frozensets(st.integers(0, 6), max_size=5), st.sampled_from([ROOT, aid("1.root"), aid("2.3.root")]))
def test_command_list_length(kids, loc):
    assert len(command_list(loc, kids, Q)) == len(kids) + (0 if loc == ROOT else 1)


def test_nested_mu_left_open():
    # the outer variable is not substituted inside an inner mu
    assert unfold(Mu(1, Mu(2, Var(1)))) == Mu(2, Var(1))
