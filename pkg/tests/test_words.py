import pytest
from hypothesis import given, strategies as st

from crossbench.errors import InputError
from crossbench.words import (
    agreement_positions, completely_incompatible, enumerate_extensions, is_prefix,
    tuple_extensions, tuples, words, words_upto,
)

ternary = st.text(alphabet="012", max_size=6)


def test_prefix_on_words_and_tuples():
    assert is_prefix("", "01")
    assert is_prefix("01", "01")
    assert is_prefix(("0", "1"), ("01", "10"))
    assert not is_prefix(("0", "0"), ("01", "10"))


@pytest.mark.parametrize("a,b", [("0", ("0",)), (("0",), ("0", "1"))])
def test_prefix_rejects_mixed_shapes(a, b):
    with pytest.raises(InputError):
        is_prefix(a, b)


@pytest.mark.parametrize("mu0,mu1,rho0,rho1,expected", [
    ("01", "12", "", "", True),
    ("01", "02", "", "", False),
    ("02", "10", "0", "1", True),
])
def test_complete_incompatibility(mu0, mu1, rho0, rho1, expected):
    assert completely_incompatible(mu0, mu1, rho0, rho1) is expected


def test_incompatibility_input_errors():
    with pytest.raises(InputError):
        completely_incompatible("01", "0")
    with pytest.raises(InputError):
        completely_incompatible("01", "12", "1", "1")


@pytest.mark.parametrize("w0,w1,expected", [
    ("00", "00", {0, 1}), ("01", "10", set()), ("010", "011", {0, 1}),
])
def test_agreement_positions(w0, w1, expected):
    assert agreement_positions(w0, w1) == expected


def test_extensions():
    assert enumerate_extensions("0", 2, 3) == ["00", "01", "02"]
    assert enumerate_extensions("", 1, 2) == ["0", "1"]
    assert enumerate_extensions("1", 1, 3) == ["1"]
    with pytest.raises(InputError):
        enumerate_extensions("11", 1)


def test_counts():
    assert len(words(3)) == 27
    assert len(words_upto(2)) == 13
    assert len(tuples(2, 2)) == 16
    assert tuple_extensions(("0", "1"), 2) == [("00", "10"), ("00", "11"), ("01", "10"), ("01", "11")]


@given(st.integers(0, 5).flatmap(lambda n: st.tuples(st.text("012", min_size=n, max_size=n),
                                                     st.text("012", min_size=n, max_size=n))))
def test_incompatibility_is_symmetric_and_disjoint_from_agreement(pair):
    a, b = pair
    assert completely_incompatible(a, b) == completely_incompatible(b, a)
    assert completely_incompatible(a, b) == (not agreement_positions(a, b))


@given(ternary, st.integers(0, 3))
def test_extensions_extend_the_stem(stem, extra):
    exts = enumerate_extensions(stem, len(stem) + extra)
    assert len(exts) == 3 ** extra
    assert exts == sorted(exts)
    assert all(is_prefix(stem, e) for e in exts)
