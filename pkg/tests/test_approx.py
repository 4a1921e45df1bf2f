import random

import pytest
from hypothesis import given, settings, strategies as st

from crossbench.approx import (
    ApproxTable, Certificate, DisjointArray, StepStream, diagonalize, from_array, hyperimmune_witness, limit,
    normalize, validate_table, verify_certificate,
)
from crossbench.errors import InputError, TableExhausted
from crossbench.gammaspace import ZETA0, Coloring, Path, Step, compatible, interpret, zeta
from crossbench.generate import random_array, random_stream, random_suite, random_table, stream_is_valid

G = Coloring.of({1: 2})
H = Coloring.of({3: 1})


def level0(rows):
    return ApproxTable(0, [list(r) for r in rows])


def test_constant_root_table_is_valid():
    for m in range(3):
        t = ApproxTable(m, [[zeta(m)] * 3 for _ in range(4)])
        assert validate_table(t) == []
        assert limit(t, 2) == zeta(m)


def test_cells_not_over_their_row_are_named():
    t = level0([[ZETA0, G], [ZETA0, G]])
    assert validate_table(t) == ["cell (1,1) is not over 1"]


def test_decreasing_row_is_named():
    t = level0([[ZETA0, G, ZETA0]])
    assert "row 0 decreases at (0,2)" in validate_table(t)
    with pytest.raises(InputError):
        limit(t, 0)


def test_root_column_and_ragged_rows():
    assert "cell (0,0) is not the root" in validate_table(level0([[G, G]]))
    assert validate_table(level0([[ZETA0, G], [ZETA0]]))


def test_limit_reads_last_column():
    t = level0([[ZETA0, G, G]])
    assert limit(t, 0) == G
    with pytest.raises(InputError):
        limit(t, 1)


def test_normalize_all_roots():
    xi = StepStream.from_table(ApproxTable(1, [[zeta(1)] * 3] * 2))
    out = normalize(xi)
    assert all(c == zeta(1) for row in out.rows for c in row)


def test_normalize_follows_an_ascent():
    xi = StepStream(0, [[(ZETA0, 0), (G, 1)]])
    out = normalize(xi)
    assert validate_table(out) == [] and limit(out, 0) == G


def test_normalize_stalls_on_a_decrease():
    xi = StepStream(0, [[(ZETA0, 0), (G, 1), (ZETA0, 2)]])
    out = normalize(xi)
    # stage t only sees columns below t, so G arrives at stage 2 and then stays
    assert out.rows[0] == [ZETA0, ZETA0, G, G]


def test_normalize_waits_for_late_cells():
    xi = StepStream(0, [[(ZETA0, 0), (G, 3)]])
    assert normalize(xi).rows[0] == [ZETA0, ZETA0, ZETA0, G]


def test_normalize_skips_cells_not_over_the_row():
    xi = StepStream(0, [[(ZETA0, 0), (G, 0)], [(ZETA0, 0), (G, 0)]])
    out = normalize(xi)
    assert limit(out, 0) == G and limit(out, 1) == ZETA0


def test_from_array_examples():
    t = from_array(DisjointArray.of([({1}, {2}, set())]))
    assert t.rows[0] == [ZETA0, Coloring.of({1: 0, 2: 1})]
    empty = from_array(DisjointArray.of([(set(), set(), set())] * 3))
    assert all(row == [ZETA0, ZETA0] for row in empty.rows)
    with pytest.raises(InputError):
        from_array(DisjointArray.of([({0}, set(), set())]))
    with pytest.raises(InputError):
        from_array(DisjointArray.of([({1}, {1}, set())]))


def test_hyperimmune_witness_examples():
    assert hyperimmune_witness("002", DisjointArray.of([({1}, set(), {2})])) == 0
    assert hyperimmune_witness("", DisjointArray.of([(set(), set(), set())])) == 0
    assert hyperimmune_witness("000", DisjointArray.of([(set(), {1}, set())])) is None


def test_diagonalize_single_table():
    word, cert = diagonalize([level0([[ZETA0, G], [ZETA0, ZETA0]])])
    assert word == "02"
    assert cert.entries == [(0, 0, G)]


def test_diagonalize_trivial_limits():
    word, cert = diagonalize([ApproxTable(1, [[zeta(1)]]), level0([[ZETA0]])])
    assert word == "" and [n for _, n, _ in cert.entries] == [0, 0]


def test_diagonalize_second_table_reads_a_later_row():
    first = level0([[ZETA0, G]])
    second = level0([[ZETA0, ZETA0]] * 2 + [[ZETA0, H]])
    word, cert = diagonalize([first, second])
    assert word == "0201"
    assert [n for _, n, _ in cert.entries] == [0, 2]
    assert all(compatible(word, interpret(limit(t, n))) for t, (_, n, _) in zip([first, second], cert.entries))


def test_diagonalize_errors():
    with pytest.raises(TableExhausted) as info:
        diagonalize([level0([[ZETA0, G]]), level0([[ZETA0]])])
    assert info.value.index == 1 and info.value.needed_row == 2
    with pytest.raises(InputError):
        diagonalize([level0([[ZETA0, G, ZETA0]])])


def test_certificate_check_rejects_tampering():
    tables = [level0([[ZETA0, G]])]
    word, cert = diagonalize(tables)
    assert verify_certificate(word, tables, cert)
    assert not verify_certificate("00", tables, cert)
    assert not verify_certificate(word, tables, Certificate([]))


def test_json_roundtrips():
    t = random_table(random.Random(1), 1, 4, 3)
    assert ApproxTable.from_dict(t.to_dict()).rows == t.rows
    xi = random_stream(random.Random(2), 1, 3, 3)
    assert StepStream.from_dict(xi.to_dict()).rows == xi.rows
    arr = random_array(random.Random(3), 4)
    assert DisjointArray.from_dict(arr.to_dict()) == arr
    with pytest.raises(InputError):
        ApproxTable.from_dict({"rows": []})


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2))
def test_normalize_is_total_and_keeps_valid_limits(seed, m):
    rng = random.Random(seed)
    xi = random_stream(rng, m, rng.randint(1, 5), rng.randint(1, 4))
    out = normalize(xi)
    assert validate_table(out) == []
    if stream_is_valid(xi):
        assert [limit(out, n) for n in range(out.n_rows)] == xi.finals()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_diagonalize_is_sound(seed):
    rng = random.Random(seed)
    tables = random_suite(rng, max_tables=5, rows=32)
    word, cert = diagonalize(tables)
    assert verify_certificate(word, tables, cert)
    rows = [n for _, n, _ in cert.entries]
    assert rows == sorted(rows)
    for (_, n, tau), nxt in zip(cert.entries, rows[1:]):
        if tau.support:
            assert nxt > n


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_array_pipeline_finds_hyperimmune_witness(seed, rows):
    arr = random_array(random.Random(seed), rows)
    word, cert = diagonalize([from_array(arr)])
    (_, n, _), = cert.entries
    assert n == 0
    assert hyperimmune_witness(word, arr) == 0
