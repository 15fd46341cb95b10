"""Compact invariant suite behind ``microsets verify``: one row per check."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .budgets import BudgetList
from .cover import CoverProblem, counting_certificate, solve_feasible, validate_cover
from .intervals import Interval, normalize_union
from .numerals import Numeral


def brute_force_feasible(target, lengths) -> bool:
    """Try every order of the budgets, each placed at the leftmost uncovered point.

    ``target`` is a list of (lo, hi) Fractions, ``lengths`` a list of Fractions.
    """
    comps = sorted(target)
    for r in range(len(lengths) + 1):
        for order in itertools.permutations(range(len(lengths)), r):
            covered_to = None
            i = 0
            for b in order:
                while i < len(comps) and covered_to is not None and comps[i][1] <= covered_to:
                    i += 1
                if i == len(comps):
                    break
                lo = comps[i][0] if covered_to is None or covered_to < comps[i][0] else covered_to
                covered_to = lo + lengths[b]
            while i < len(comps) and covered_to is not None and comps[i][1] <= covered_to:
                i += 1
            if i == len(comps):
                return True
    return False


def random_instance(rng: random.Random, max_budgets: int = 8, max_comps: int = 6):
    """A small dyadic cover instance as (target Fractions, length Fractions)."""
    n = rng.randint(1, max_comps)
    pts = sorted(rng.sample(range(64), 2 * n))
    target = [(Fraction(pts[2 * i], 16), Fraction(pts[2 * i + 1], 16)) for i in range(n)]
    if rng.random() < 0.3:  # allow degenerate components
        j = rng.randrange(n)
        target[j] = (target[j][0], target[j][0])
    lengths = [Fraction(rng.randint(1, 16), 1 << rng.randint(2, 5)) for _ in range(rng.randint(1, max_budgets))]
    return target, lengths


def to_problem(target, lengths) -> CoverProblem:
    s = normalize_union(Interval.of(a, b, 2) for a, b in target)
    return CoverProblem(s, BudgetList(tuple(Numeral.from_fraction(x, 2) for x in lengths)))


def _numerals(rng, n):
    bad = 0
    for _ in range(n):
        a = Fraction(rng.randint(-10**6, 10**6), 1 << rng.randint(0, 40))
        b = Fraction(rng.randint(-10**6, 10**6), 1 << rng.randint(0, 40))
        x, y = Numeral.from_fraction(a, 2), Numeral.from_fraction(b, 2)
        if (x + y).to_fraction() != a + b or (x - y).to_fraction() != a - b or (x < y) != (a < b):
            bad += 1
    return bad == 0, f"{n} cases, {bad} mismatches"


def _solver(rng, n):
    bad = sound = 0
    for _ in range(n):
        t, ls = random_instance(rng, 6, 4)
        p = to_problem(t, ls)
        v = solve_feasible(p)
        if v.feasible != brute_force_feasible(t, ls):
            bad += 1
        if v.feasible and (not validate_cover(p.target, p.budgets, v.placement)[0] or counting_certificate(p)):
            sound += 1
    return bad == 0 and sound == 0, f"{n} instances, {bad} oracle mismatches, {sound} unsound"


def _nano():
    from .constructions import NanoScheme, nano_S, nano_f, nano_stage
    from .witnesses import random_lazy_chain

    sch = NanoScheme()
    s, labels = nano_stage(sch, 2)
    ok = len(s) == len(nano_S(2)) == 504
    rng = random.Random(0)
    bad = 0
    for _ in range(20):
        for j in random_lazy_chain(rng, 4)[0]:
            # the largest threatening budget has index f(j)
            if not sch.gap_inequality_symbolic(j, nano_f(j)):
                bad += 1
    return ok and bad == 0, f"stage-2 size {len(s)}, {bad} gap failures"


def _spacing():
    from .constructions import spacing_place
    from .witnesses import spacing_condition_check

    rows = []
    for m in (0, 1):
        for B in ({1}, {2}):
            r = spacing_condition_check(spacing_place(m, Interval.of(0, 1, 13), B))
            d = r["iii_detail"][0]
            rows.append((f"spacing m={m} B={sorted(B)}", r["ok"],
                         f"(i)={r['i']} (ii)={r['ii']} (iii) hits {d['hit_total']} vs |F|/3={d['F_size'] // 3}"))
    return rows


def _witness():
    from .constructions import NanoScheme, PicoScheme
    from .witnesses import nano_witness_chain, pico_witness_chain, verify_chain

    w1 = nano_witness_chain(NanoScheme(), {}, 3)
    w2 = pico_witness_chain(PicoScheme(), {}, 2, 1)
    ok = w1.conclusive and w2.conclusive and verify_chain(w1)[0] and verify_chain(w2)[0]
    return ok, "empty-budget chains (nano depth 3, pico depth 1)"


def _procedures():
    from .budgets import EpsilonSpec, nano, shift_family
    from .procedures import NanoSchemeSource, compact_shift, decompose_m, null_to_family, NullCoverInput

    src = NanoSchemeSource()
    fam = shift_family(nano(), 2)
    c = compact_shift(src, fam, 1, EpsilonSpec(2, 1))
    dec = decompose_m(src, nano(), 2, 1)
    parts_ok = all(not cov.problems() for covers in dec.part_covers for _, cov in covers)
    tab = null_to_family(NullCoverInput.parametric(12, 4))
    return not c.problems() and parts_ok and tab.ok, "compact_shift, decompose_m(2), null table"


def run_suite(seed: int = 0) -> list[tuple[str, bool, str]]:
    from .constructions import PicoScheme

    rng = random.Random(seed)
    rows = [("numeral oracle", *_numerals(rng, 1000)), ("solver oracle", *_solver(rng, 100)),
            ("nano partition and gaps", *_nano())]
    rows += _spacing()
    rows.append(("pico partition", bool(PicoScheme().partition_report()["ok"]), "owners admissible"))
    rows.append(("witness chains", *_witness()))
    rows.append(("procedures", *_procedures()))
    return rows
