import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microsets.budgets import EpsilonSpec, budget_length, micro, nano, shift_family
from microsets.constructions import GdeltaRationalScheme
from microsets.intervals import Interval, normalize_union
from microsets.numerals import Numeral
from microsets.procedures import (
    InsufficientCoverData,
    LabeledCover,
    NanoSchemeSource,
    NestedCoverData,
    NullCoverInput,
    PointSource,
    compact_shift,
    decompose_m,
    null_to_family,
    sigma_union_cover,
    smz_merge,
    validate_cover_bundle,
)

NANO2 = shift_family(nano(), 2)
HALF = EpsilonSpec(2, 1)


def valid(cov):
    """Independent check: lengths within budget, union contains the target."""
    for i, iv in cov.entries.items():
        assert i >= 0
        assert iv.length <= budget_length(cov.fam, i, cov.eps)
    union = normalize_union(cov.entries.values())
    for comp in cov.target:
        assert any(u.lo <= comp.lo and comp.hi <= u.hi for u in union)
    assert validate_cover_bundle(cov)[0]
    return True


# --- compact_shift ------------------------------------------------------------------
def test_compact_shift_single_point():
    for fam in (micro(), nano()):
        cov = compact_shift(PointSource.of([0]), fam, 3, HALF)
        assert cov.indices() == [4] and cov.entries[4].contains_point(Numeral.zero(2))
        assert valid(cov)


def test_compact_shift_two_points():
    cov = compact_shift(PointSource.of([0, 1]), nano(), 3, HALF)
    assert cov.indices() == [4, 5] and valid(cov)


def test_compact_shift_nano_set():
    cov = compact_shift(NanoSchemeSource(), NANO2, 1, HALF)
    assert min(cov.indices()) >= 2 and valid(cov)


def test_positive_measure_target_rejected_under_plain_family():
    with pytest.raises(InsufficientCoverData):
        compact_shift(NanoSchemeSource(), nano(), 1, HALF)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-40, 40), min_size=1, max_size=6, unique=True), st.integers(-1, 5), st.integers(1, 3))
def test_compact_shift_points_property(pts, k, t):
    cov = compact_shift(PointSource.of([Q(p, 4) for p in pts]), nano(), k, EpsilonSpec(2, t))
    assert all(i > k for i in cov.indices()) and valid(cov)


# --- sigma_union_cover ---------------------------------------------------------------
def test_sigma_union_examples():
    cov = sigma_union_cover([PointSource.of([0]), PointSource.of([5])], nano(), HALF)
    assert len(cov.entries) == 2 and cov.indices() == sorted(set(cov.indices())) and valid(cov)
    assert sigma_union_cover([], nano(), HALF).entries == {}
    joint = sigma_union_cover([NanoSchemeSource(), PointSource.of([3]), PointSource.of([4])], NANO2, HALF)
    assert valid(joint)
    for x in (3, 4):
        assert joint.target.contains_interval(Interval.of(x, x))


# --- smz_merge -------------------------------------------------------------------
def test_merge_case2_point():
    A = NestedCoverData(2, gdelta=GdeltaRationalScheme(nano(), "dyadic"), count=64)
    plan = smz_merge(A, [Numeral.from_int(-5, 2)], HALF)
    slot = plan.bookkeeping["eps_i"][0]["slot"]
    assert plan.cover.entries[slot] == Interval.of(-5, -5)
    assert valid(plan.cover)


def test_merge_case2_no_points():
    A = NestedCoverData(2, gdelta=GdeltaRationalScheme(nano(), "dyadic"), count=64)
    plan = smz_merge(A, [], HALF)
    assert valid(plan.cover)
    assert all(iv.lo < iv.hi for iv in plan.cover.entries.values())  # only A's own intervals


def test_merge_case1_three_points():
    A = NestedCoverData(1, pieces=(PointSource.of([10, 11]), PointSource.of([20])))
    B = [Numeral.from_int(v, 2) for v in (-1, -2, -3)]
    plan = smz_merge(A, B, HALF)
    res = plan.bookkeeping["reserved"]
    assert len(res) == 3 and len(set(res)) == 3
    assert sorted(plan.cover.entries[s].lo.to_fraction() for s in res) == [-3, -2, -1]
    assert valid(plan.cover)


def test_merge_bad_flag():
    with pytest.raises(ValueError):
        smz_merge(NestedCoverData(3), [], HALF)


# --- decompose_m -----------------------------------------------------------------
def test_decompose_identity():
    src = PointSource.of([0, 1, 2])
    dec = decompose_m(src, nano(), 1, 1)
    assert len(dec.part_stages) == 1 and dec.part_stages[0] == dec.stage
    for eps, cov in dec.part_covers[0]:
        assert valid(cov)


def test_decompose_nano_stage1():
    dec = decompose_m(NanoSchemeSource(), nano(), 2, 1)
    assert len(dec.part_stages) == 2
    assert normalize_union(list(dec.part_stages[0]) + list(dec.part_stages[1])).covers(dec.stage)
    for part in dec.part_covers:
        assert [str(e) for e, _ in part] == ["2^-1", "2^-2"]
        for eps, cov in part:
            assert valid(cov)
    # block n starts at index m * l_n
    for n, block in enumerate(dec.blocks):
        assert min(block.entries) >= 2 * dec.cuts[n]


# --- null_to_family ----------------------------------------------------------------
def test_null_parametric_exact():
    tab = null_to_family(NullCoverInput.parametric(12, 4))
    assert tab.ok
    for (m, n), v in tab.a.items():
        assert v.to_fraction() == Q(1, 2 ** (m + 3 + n))


def random_null_input(seed, rows=20, cols=4):
    rng = random.Random(seed)
    lengths = []
    for m in range(rows):
        d, row = 0, []
        for n in range(cols):
            d += rng.randint(0, 1)
            row.append(Numeral.from_power(2, m + 3 + n + d))
        lengths.append(tuple(row))
    return NullCoverInput(tuple(lengths), tuple(Numeral.from_power(2, m + 2) for m in range(rows)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_null_random_inputs(seed):
    inp = random_null_input(seed)
    tab = null_to_family(inp)
    assert tab.ok
    rows = {m for m, _ in tab.a}
    for (m, n), v in tab.a.items():  # independent re-check with Fractions
        assert v.to_fraction() >= inp.lengths[m][n].to_fraction()
        assert v.to_fraction() < Q(1, 2 ** (m + 1))
        if m + 1 in rows:
            assert tab.a[(m + 1, n)].to_fraction() <= v.to_fraction()
        if (m, n + 1) in tab.a:
            assert tab.a[(m, n + 1)].to_fraction() <= v.to_fraction()


def test_null_input_rejects_bad_sums():
    with pytest.raises(ValueError):
        NullCoverInput(((Numeral.from_power(2, 1),),), (Numeral.from_power(2, 1),))
