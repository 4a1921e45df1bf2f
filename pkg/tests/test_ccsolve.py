import random

import pytest
from hypothesis import given, settings, strategies as st

from crossbench.ccsolve import (
    Solution, Stuck, brute_excluded, brute_solution, check_solution, detect_excluded, extend_step, solve,
)
from crossbench.crosstree import CrossTree, full_tree
from crossbench.errors import InputError
from crossbench.generate import iter_leftfull, random_leftfull
from crossbench.sufficiency import CondPair, extends
from crossbench.words import completely_incompatible

# full right words under each left word; component 0 of 00 and 11 splits after
# their first digit
SPLIT = CrossTree.closed([
    ("00", ("00",)), ("01", ("01",)), ("02", ("00",)),
    ("10", ("10",)), ("11", ("01",)), ("12", ("10",)),
    ("20", ("00",)), ("21", ("10",)), ("22", ("00",)),
], 2, 1)


def test_full_tree_height_one():
    sol = solve(full_tree(1, 1))
    assert sol.pair == (("0", ("0",)), ("1", ("0",)))
    assert sol.agreement == [[0]] and sol.excluded == [] and sol.restarts == []


def test_first_step_on_full_height_two():
    t = full_tree(2, 1)
    step = extend_step(t, CondPair.root(1))
    assert step == CondPair((("0", ("0",)), ("1", ("0",))))
    nxt = extend_step(t, step)
    assert nxt == CondPair((("00", ("00",)), ("11", ("00",))))


def test_sparse_tree_uses_the_agreeing_pair():
    t = CrossTree.closed([("0", ("0",)), ("1", ("0",)), ("2", ("1",))], 1, 1)
    sol = solve(t)
    assert sol.pair == (("0", ("0",)), ("1", ("0",)))
    assert sol.agreement == [[0]]


def test_height_zero_is_rejected():
    with pytest.raises(InputError):
        solve(full_tree(0, 1))


def test_not_leftfull_is_rejected():
    t = CrossTree.closed([("0", ("0",)), ("1", ("0",))], 1, 1)
    with pytest.raises(InputError):
        solve(t)


def test_stuck_step_is_certified():
    cp = CondPair((("00", ("0",)), ("11", ("0",))))
    res = extend_step(SPLIT, cp)
    assert res == Stuck(0, cp)
    assert detect_excluded(SPLIT, cp, 0) and brute_excluded(SPLIT, cp, 0)


def test_solver_restarts_on_split_tree():
    sol = solve(SPLIT)
    assert sol.excluded == [0]
    assert [st.at for st in sol.restarts] == [CondPair((("00", ("0",)), ("11", ("0",))))]
    assert check_solution(SPLIT, sol) == []
    # the oracle still finds an agreeing pair: agreement before the restart
    # point does not count for the construction
    assert brute_solution(SPLIT).agreement == [[0]]


def test_detect_excluded_input_errors():
    t = full_tree(1, 1)
    with pytest.raises(InputError):
        detect_excluded(t, CondPair.root(1), 1)
    with pytest.raises(InputError):
        detect_excluded(t, CondPair((("0", ("0",)), ("12", ("0",)))), 0)


def test_full_tree_two_components_agree_everywhere():
    t = full_tree(2, 2)
    sol = solve(t)
    assert sol.excluded == [] and all(sol.agreement)
    assert all(brute_solution(t).agreement)


def test_check_solution_reports_problems():
    t = full_tree(1, 1)
    bad = Solution((("0", ("0",)), ("0", ("1",))), [[]], [])
    problems = check_solution(t, bad)
    assert any("incompatible" in p for p in problems)
    assert any("no agreement" in p for p in problems)


def test_solution_json():
    sol = solve(SPLIT)
    d = sol.to_dict()
    assert set(d) == {"pair", "agreement", "excluded", "trace", "restarts"}
    assert d["excluded"] == [0] and len(d["trace"]) == len(sol.trace)


def test_height_one_single_component_never_excludes():
    count = 0
    for t in iter_leftfull(1, 1):
        sol = solve(t)
        assert sol.excluded == [] and sol.agreement[0]
        assert brute_solution(t).agreement[0]
        count += 1
    assert count == 27


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 2))
def test_random_runs_are_certified(seed, n, r):
    rng = random.Random(seed)
    t = random_leftfull(rng, n, r, spread=rng.randrange(3), junk=rng.random() * 0.3,
                        structured=rng.random())
    sol = solve(t)
    assert check_solution(t, sol) == []
    assert len(sol.restarts) <= r
    for stuck in sol.restarts:
        assert detect_excluded(t, stuck.at, stuck.component)
        assert brute_excluded(t, stuck.at, stuck.component)
    for prev, nxt in zip(sol.trace, sol.trace[1:]):
        if nxt.stems[0] != nxt.stems[1]:
            assert extends(nxt, prev)
            base = prev.left_length
            assert completely_incompatible(nxt.stems[0][0][base:], nxt.stems[1][0][base:])
    oracle = brute_solution(t)
    assert oracle is not None
    assert len(oracle.excluded) <= len(sol.excluded)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_detect_excluded_matches_brute_force(seed):
    rng = random.Random(seed)
    t = random_leftfull(rng, rng.randint(1, 3), 1, spread=rng.randrange(3), structured=0.9)
    sol = solve(t)
    for cp in sol.trace:
        if cp.stems[0] != cp.stems[1]:
            assert detect_excluded(t, cp, 0) == brute_excluded(t, cp, 0)
