import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microsets.budgets import BudgetList
from microsets.constructions import NanoScheme, PicoScheme, nano_stage, nano_T, spacing_place
from microsets.constructions.pico import h_of
from microsets.cover import CoverProblem, greedy_cover
from microsets.intervals import Interval
from microsets.numerals import Numeral
from microsets.witnesses import (
    MUTATIONS,
    ChainWitness,
    HypothesisViolation,
    mutate_spacing,
    nano_budget,
    nano_budget_list,
    nano_candidates,
    nano_witness_chain,
    non_ideal_demo,
    pico_budget,
    pico_candidates,
    pico_witness_chain,
    point_control,
    spacing_condition_check,
    verify_chain,
)

SCH = NanoScheme()


# --- nano -------------------------------------------------------------------------
@pytest.mark.parametrize("depth", [0, 1, 2, 3, 4])
def test_nano_empty_budgets_leftmost(depth):
    w = nano_witness_chain(SCH, {}, depth)
    assert len(w.nodes) == depth + 1 and w.conclusive and verify_chain(w)[0]
    labels = [n.label for n in w.nodes]
    assert labels[0] == 0
    for a, b in zip(labels, labels[1:]):
        assert b == nano_T(a).start


def test_nano_stage0_greedy_attempt():
    s, _ = nano_stage(SCH, 0)
    placed = greedy_cover(CoverProblem(s, nano_budget_list(2))).placement_dict()
    w = nano_witness_chain(SCH, placed, 0)
    K0 = w.nodes[0]
    assert K0.label in (0, 1) and not K0.interval.intersects(placed[0])


def test_nano_depth3_against_greedy_sixteen():
    s, _ = nano_stage(SCH, 1)
    placed = greedy_cover(CoverProblem(s, nano_budget_list(16))).placement_dict()
    w = nano_witness_chain(SCH, placed, 3)
    assert w.found and w.conclusive and verify_chain(w)[0]


def test_nano_precondition_errors():
    long = Interval.at(Numeral.zero(2), nano_budget(0) + nano_budget(0))
    with pytest.raises(HypothesisViolation):
        nano_witness_chain(SCH, {0: long}, 1)
    with pytest.raises(ValueError):
        nano_witness_chain(SCH, {}, 5)


def test_nano_survivor_log():
    cands = nano_candidates(SCH, 3, 6)
    for c in cands:
        w = nano_witness_chain(SCH, c["placement"], 3)
        for row in w.log:
            assert int(row["survivors"]) >= int(row["guarantee"])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_nano_candidates_always_defeated(seed):
    for c in nano_candidates(SCH, seed, 3):
        w = nano_witness_chain(SCH, c["placement"], 3)
        assert w.found and w.conclusive and verify_chain(w)[0]


# --- chain mutation ----------------------------------------------------------------
def test_verify_chain_catches_mutations():
    s, _ = nano_stage(SCH, 1)
    placed = greedy_cover(CoverProblem(s, nano_budget_list(16))).placement_dict()
    w = nano_witness_chain(SCH, placed, 2)
    nodes = list(w.nodes)
    # swap two levels: nesting breaks
    bad = dataclasses.replace(w, nodes=(nodes[1], nodes[0], nodes[2]))
    assert not verify_chain(bad)[0]
    # flat bounds: schedule breaks
    flat = tuple(dataclasses.replace(n, bound=1) for n in nodes)
    assert not verify_chain(dataclasses.replace(w, nodes=flat))[0]
    # a budget dropped onto the last node: disjointness breaks
    last = nodes[-1]
    extra = w.budgets + ((0, Interval(last.interval.lo, last.interval.lo)),)
    assert not verify_chain(dataclasses.replace(w, budgets=extra))[0]


# --- pico -------------------------------------------------------------------------
PICO = PicoScheme()


def test_pico_empty_budgets():
    w = pico_witness_chain(PICO, {}, 2, 1)
    assert w.found and w.conclusive and verify_chain(w)[0]
    assert w.nodes[0].label == (2, 0)


def test_pico_eight_budgets_n2():
    for c in pico_candidates(PICO, 2, 11, 5, count=8):
        w = pico_witness_chain(PICO, c["placement"], 2, 1)
        assert w.found and verify_chain(w)[0]
        n, j = w.nodes[0].label
        assert n == 2 and j < h_of(2)


def test_pico_preconditions():
    with pytest.raises(HypothesisViolation):
        pico_witness_chain(PICO, {2: Interval.at(Numeral.zero(13), pico_budget(2))}, 2)
    too_long = Interval.at(Numeral.zero(13), pico_budget(0) + pico_budget(0))
    with pytest.raises(HypothesisViolation):
        pico_witness_chain(PICO, {0: too_long}, 2)


def test_point_control():
    for N in range(5):
        assert not point_control(N)["x_covered"]
        assert point_control(N, unbanned=True)["x_covered"]


def test_pico_json():
    w = pico_witness_chain(PICO, {}, 1, 1)
    doc = w.to_json()
    assert doc["status"] == "found" and doc["conclusive"]


# --- spacing condition checker ----------------------------------------------------------
def test_spacing_vacuous():
    assert spacing_condition_check(spacing_place(0, Interval.of(0, 1, 13), set()))["ok"]


def test_spacing_one_third_counts():
    r = spacing_condition_check(spacing_place(0, Interval.of(0, 1, 13), {1}))
    d = r["iii_detail"][0]
    assert r["i"] and r["ii"]
    assert d["F_size"] == 12 and d["hits_by_index"] == [2, 1, 1]
    assert d["hit_total"] == 4 and not d["strict_one_third"]
    assert d["distinct_hits_greedy_cover"] == 4 and d["not_more_than_one_third"]


@pytest.mark.parametrize("kind", MUTATIONS)
def test_spacing_mutations_fail(kind):
    sch = spacing_place(0, Interval.of(0, 1, 13), {1})
    r = spacing_condition_check(sch, mutate_spacing(sch, kind))
    assert not r["ok"]
    expect = {"grow": "i", "squeeze": "ii", "cluster": "iii"}[kind]
    assert not r[expect]


# --- demo -------------------------------------------------------------------------
def test_demo_nano():
    rep = non_ideal_demo("nano", seed=1, depth=1, eps_list=(1, 2), trials=3)
    assert {c["part"] for c in rep["certificates"]} == {0, 1}
    assert all(c["valid"] for c in rep["certificates"])
    assert any(d["status"] == "found" and d["verified"] for d in rep["defeats"])


def test_demo_pico():
    rep = non_ideal_demo("pico", seed=1, eps_list=(1, 2), trials=2)
    assert all(c["valid"] for c in rep["certificates"])
    assert all(d["verified"] for d in rep["defeats"])
    assert [c["x_covered"] for c in rep["x_controls"]] == [False, True]


def test_demo_empty_eps_list():
    rep = non_ideal_demo("nano", seed=1, eps_list=(), trials=2)
    assert rep["certificates"] == [] and rep["defeats"]
