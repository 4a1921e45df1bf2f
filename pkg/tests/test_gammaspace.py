import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from crossbench.errors import FragmentTooLarge, InputError
from crossbench.gammaspace import (
    ZETA0, Coloring, Path, Step, brute_longest_chain, compatible, elem_from_dict, elem_to_dict,
    enumerate_fragment, interpret, is_one_step_variation, is_valid, labeled_longest_chain, leaves, leq,
    longest_chain, lt, over, validate_path, variation, zeta,
)
from crossbench.generate import random_path

E = ()
G0 = Coloring.of({1: 0})
G1 = Coloring.of({2: 1})
START = Step.make({E: ZETA0})
GROWN = Step.make({E: ZETA0, (0,): G0, (1,): G1})
CUT = Step.make({E: ZETA0, (0,): G0})


def test_variation_examples():
    assert variation({E}, {E, (0,), (1,)}) == ("grow", E, (0, 1))
    assert variation({E, (0,), (1,)}, {E, (0,)}) == ("cut", E, (0,))
    assert not is_one_step_variation({E, (0,), (1,)}, {E, (0,), (1,)})


def test_cut_drops_strict_descendants_and_keeps_node():
    t0 = {E, (0,), (1,), (0, 0), (0, 1)}
    assert is_one_step_variation(t0, {E, (0,)})
    assert not is_one_step_variation(t0, {E, (0,), (0, 0)})
    assert is_one_step_variation(t0, {E, (0,), (1,), (0, 1)})
    assert is_one_step_variation(t0, {E, (1,)})
    # growing needs a leaf and a nonempty F
    assert not is_one_step_variation(t0, t0 | {(0, 2)})
    assert is_one_step_variation(t0, t0 | {(1, 0), (1, 3)})


def test_singleton_root_is_a_leaf():
    assert leaves({E}) == [E]


def test_roots_are_valid():
    for m in range(4):
        assert validate_path(zeta(m)) == []


def test_validation_messages():
    bad = Path(1, (START, GROWN, Step.make({E: ZETA0, (0,): G1})))
    assert any("incompatible labelings" in p for p in validate_path(bad))
    same = Path(1, (START, GROWN, GROWN))
    assert any("F not proper" in p for p in validate_path(same))
    flat = Path(1, (START, Step.make({E: ZETA0, (0,): ZETA0})))
    assert any("order-preserving" in p for p in validate_path(flat))
    assert validate_path(Path(1, (GROWN,)))
    assert validate_path(Path(1, ()))
    assert is_valid(Path(1, (START, GROWN, CUT)))


def test_leq_examples():
    a = Path(1, (START, GROWN))
    b = Path(1, (START, Step.make({E: ZETA0, (0,): G1})))
    assert leq(zeta(1), a) and leq(a, a)
    assert not leq(a, b) and not leq(b, a)
    assert leq(ZETA0, G0) and not leq(G0, G1) and not leq(G0, ZETA0)
    with pytest.raises(InputError):
        leq(ZETA0, zeta(1))


def test_interpret_examples():
    for m in range(4):
        assert interpret(zeta(m)) == {ZETA0}
    assert interpret(Path(1, (START, GROWN))) == {G0, G1}
    assert interpret(Path(1, (START, GROWN, CUT))) == {G0}


def test_over_examples():
    g = Coloring.of({1: 2})
    assert over(zeta(2), 7)
    assert over(g, 0) and not over(g, 1)


def test_compatible_examples():
    assert compatible("", {ZETA0}) and compatible("11", {ZETA0})
    assert compatible("02", {Coloring.of({1: 2})})
    assert not compatible("00", {Coloring.of({1: 2})})
    assert not compatible("0", {Coloring.of({1: 2})})


def test_json_roundtrip():
    g = Path(2, (zeta(2).last, Step.make({E: zeta(1), (0,): Path(1, (START, GROWN))})))
    assert is_valid(g)
    assert elem_from_dict(elem_to_dict(g)) == g
    with pytest.raises(InputError):
        elem_from_dict({"level": 0, "support": [1], "values": []})
    with pytest.raises(InputError):
        elem_from_dict({"steps": []})


def test_trivial_chain_lengths():
    assert longest_chain(0, 2, 1)[0] == 2
    assert longest_chain(1, 0, 3)[0] == 1
    assert brute_longest_chain(1, 0, 3) == 1


@pytest.mark.parametrize("m,bound,sup", [(1, 1, 0), (1, 1, 1), (1, 2, 0), (1, 2, 1), (2, 1, 0), (2, 1, 1)])
def test_chain_length_matches_enumeration(m, bound, sup):
    n, chain = longest_chain(m, bound, sup)
    assert n == brute_longest_chain(m, bound, sup) == labeled_longest_chain(m, bound, sup)
    assert len(chain) == n
    assert all(is_valid(g) for g in chain)
    assert all(lt(a, b) for a, b in zip(chain, chain[1:]))


def test_chain_lengths_of_small_fragments():
    assert [longest_chain(1, 1, 0)[0], longest_chain(1, 2, 0)[0], longest_chain(2, 1, 0)[0]] == [2, 3, 2]
    assert len(enumerate_fragment(1, 2, 0)) == 34


def test_two_levels_two_children():
    n, chain = longest_chain(2, 2, 0)
    assert n == labeled_longest_chain(2, 2, 0, cap=2_000_000) == 9
    assert all(is_valid(g) for g in chain)


def test_fragment_cap():
    with pytest.raises(FragmentTooLarge):
        enumerate_fragment(1, 2, 1, cap=50)
    with pytest.raises(InputError):
        enumerate_fragment(1, -1, 0)


def test_leq_is_a_partial_order_on_a_fragment():
    frag = enumerate_fragment(1, 2, 0)
    assert all(g == zeta(1) or lt(zeta(1), g) for g in frag)
    for a, b in itertools.product(frag, repeat=2):
        if leq(a, b) and leq(b, a):
            assert a == b
    for a, b, c in itertools.product(frag[:12], repeat=3):
        if leq(a, b) and leq(b, c):
            assert leq(a, c)


def test_chains_in_a_fragment_are_bounded():
    frag = enumerate_fragment(1, 2, 1)
    n, _ = longest_chain(1, 2, 1)
    rng = random.Random(3)
    for _ in range(200):
        g = rng.choice(frag)
        below = [h for h in frag if leq(h, g)]
        assert len(below) <= n


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(0, 4))
def test_random_paths_replay_as_variations(seed, m, n):
    g = random_path(random.Random(seed), m, n, 6)
    assert is_valid(g)
    assert over(g, n) and all(over(g, k) for k in range(n + 1))
    for a, b in zip(g.steps, g.steps[1:]):
        assert is_one_step_variation(a.tree, b.tree)
    for k in range(1, len(g.steps) + 1):
        assert leq(g.prefix(k), g) and interpret(g.prefix(k))
