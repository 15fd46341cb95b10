import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from microsets.budgets import (
    BudgetList,
    EpsilonSpec,
    budget_length,
    custom,
    family_from_json,
    family_to_json,
    hybrid,
    micro,
    nano,
    parse_family,
    partial_sum_check,
    pico,
    shift_family,
)

FAMILIES = [micro(), nano(), pico(), hybrid(2), custom([1, 2, 6, 24])]


def test_budget_examples():
    assert budget_length(nano(), 3, EpsilonSpec(2, 2)).to_fraction() == Fraction(1, 2**16)
    assert budget_length(pico(), 2, EpsilonSpec(13, 1)).to_fraction() == Fraction(1, 13**6)
    for t in (1, 3, 9):
        eps = EpsilonSpec(2, t)
        assert budget_length(micro(), 0, eps) == eps.value


def test_shift_examples():
    eps = EpsilonSpec(2, 1)
    sh = shift_family(nano(), 2)
    assert budget_length(sh, 5, eps) == budget_length(nano(), 2, eps) == eps.value.shift(3)
    assert shift_family(pico(), 1) is pico() or shift_family(pico(), 1).name == "pico"
    p2 = shift_family(pico(), 2)
    assert budget_length(p2, 0, eps) == budget_length(p2, 1, eps) == eps.value


def test_partial_sum_examples():
    total, ok = partial_sum_check(nano(), EpsilonSpec(2, 1), 4)
    assert total.to_fraction() == Fraction(1, 2) + Fraction(1, 4) + Fraction(1, 16) + Fraction(1, 256) and ok
    total, ok = partial_sum_check(micro(), EpsilonSpec(2, 1), 10)
    assert total.to_fraction() == 1 - Fraction(1, 2**10) and ok
    total, ok = partial_sum_check(pico(), EpsilonSpec(13, 1), 1)
    assert ok and total == budget_length(pico(), 0, EpsilonSpec(13, 1))


def test_invalid_families_and_eps():
    with pytest.raises(ValueError):
        EpsilonSpec(2, 0)
    with pytest.raises(ValueError):
        custom([2, 1])
    with pytest.raises(ValueError):
        custom([0, 1])
    with pytest.raises(ValueError):
        parse_family("femto")


def test_parse_and_json():
    fam = parse_family("custom", json.dumps({"exps": ["1", "2", "6"]}))
    assert [fam.exponent(k) for k in range(3)] == [1, 2, 6]
    for f in FAMILIES + [shift_family(nano(), 3)]:
        g = family_from_json(family_to_json(f))
        assert [g.exponent(k) for k in range(4)] == [f.exponent(k) for k in range(4)]
    assert parse_family("hybrid:1").exponent(1) == 6


@given(st.sampled_from(FAMILIES), st.integers(0, 2), st.integers(1, 6))
def test_budgets_nonincreasing_in_k(fam, k, t):
    eps = EpsilonSpec(2, t)
    assert budget_length(fam, k + 1, eps) <= budget_length(fam, k, eps)


@given(st.sampled_from(FAMILIES), st.integers(0, 3), st.integers(1, 6))
def test_budgets_nonincreasing_in_t(fam, k, t):
    assert budget_length(fam, k, EpsilonSpec(13, t + 1)) <= budget_length(fam, k, EpsilonSpec(13, t))


@given(st.sampled_from(FAMILIES[:4]), st.integers(1, 4), st.integers(0, 5))
def test_shift_identity(fam, m, k):
    assert shift_family(fam, m).exponent(m * k) == fam.exponent(k)


@given(st.sampled_from(FAMILIES), st.integers(0, 3), st.integers(1, 5))
def test_lengths_are_pure_powers(fam, k, t):
    assert budget_length(fam, k, EpsilonSpec(2, t)).is_power


def test_budget_list_bans():
    bl = BudgetList.from_family(pico(), EpsilonSpec(13, 1), 5, banned=[2])
    assert bl.usable() == [0, 1, 3, 4]
    assert BudgetList.from_json(bl.to_json()) == bl
    with pytest.raises(ValueError):
        BudgetList.from_family(pico(), EpsilonSpec(13, 1), 3, banned=[5])
