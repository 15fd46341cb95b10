from fractions import Fraction as Q

from hypothesis import given
from hypothesis import strategies as st

from conftest import num
from microsets.intervals import Interval, IntervalSet, max_hit_count, measure, min_gap, normalize_union

iv = Interval.of


def S(*pairs):
    return normalize_union(iv(a, b) for a, b in pairs)


def frac_set(s):
    return [(p.lo.to_fraction(), p.hi.to_fraction()) for p in s]


def test_normalize_examples():
    assert frac_set(S((0, 1), (Q(1, 2), 2))) == [(0, 2)]
    assert S().is_empty()
    assert frac_set(S((0, Q(1, 4)), (Q(3, 4), 1), (Q(1, 4), Q(1, 2)))) == [(0, Q(1, 2)), (Q(3, 4), 1)]
    assert frac_set(S((0, 1), (1, 2))) == [(0, 2)]  # touching closed intervals merge


def test_min_gap_examples():
    assert min_gap(S((0, 1), (2, 3), (7, 8))).to_fraction() == 1
    assert min_gap(S((0, Q(1, 4)), (Q(1, 2), Q(3, 4)))).to_fraction() == Q(1, 4)
    assert min_gap(S((0, 1))) is None


def test_max_hit_examples():
    assert max_hit_count(S((0, 1), (2, 3), (4, 5)), num(2)) == 2
    assert max_hit_count(S((0, 1), (2, 3)), num(0)) == 1


def test_max_hit_stage_one_children():
    from microsets.constructions import NanoScheme

    sch = NanoScheme()
    kids = normalize_union(sch.interval(k) for k in sch.children(1))
    gap = min_gap(kids)
    assert max_hit_count(kids, gap - num(Q(1, 2**40))) == 1


def test_measure_examples():
    assert measure(S((0, Q(1, 4)), (Q(3, 4), 1))).to_fraction() == Q(1, 2)
    assert measure(S()).sign == 0
    from microsets.constructions import NanoScheme, nano_stage

    s, _ = nano_stage(NanoScheme(), 1)
    assert measure(s).to_fraction() == 2 * (Q(1, 2**4) + Q(1, 2**8) + Q(1, 2**16))


# --- properties -------------------------------------------------------------------
pair = st.tuples(st.integers(0, 64), st.integers(0, 16)).map(lambda t: (Q(t[0], 8), Q(t[0] + t[1], 8)))
raw = st.lists(pair, max_size=8)


def oracle_union(pairs):
    out = []
    for a, b in sorted(pairs):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


@given(raw)
def test_normalize_matches_oracle(pairs):
    assert frac_set(S(*pairs)) == oracle_union(pairs)


@given(raw, st.randoms())
def test_normalize_idempotent_and_order_free(pairs, rnd):
    s = S(*pairs)
    assert normalize_union(s.parts) == s
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    assert S(*shuffled) == s


@given(raw, raw)
def test_measure_subadditive(a, b):
    A, B = S(*a), S(*b)
    assert measure(A.union(B)) <= measure(A) + measure(B)


@given(raw)
def test_measure_additive_on_disjoint_split(pairs):
    s = S(*pairs)
    left, right = IntervalSet(s.parts[::2]), IntervalSet(s.parts[1::2])
    assert measure(s) == measure(left) + measure(right)


def brute_hits(parts, length):
    best = 0
    for p in parts:  # an optimal window can start at some component's hi
        w = Interval.at(p.hi, length)
        best = max(best, sum(1 for q in parts if q.intersects(w)))
    return best


@given(raw, st.integers(0, 40), st.integers(0, 40))
def test_max_hit_monotone_and_oracle(pairs, x, y):
    s = S(*pairs)
    a, b = sorted((num(Q(x, 8)), num(Q(y, 8))))
    assert max_hit_count(s, a) <= max_hit_count(s, b)
    if len(s):
        assert max_hit_count(s, a) == brute_hits(s.parts, a)
        g = min_gap(s)
        if g is not None and a < g:
            assert max_hit_count(s, a) == 1


@given(raw)
def test_json_round_trip(pairs):
    s = S(*pairs)
    assert IntervalSet.from_json(s.to_json()) == s


@given(raw, raw)
def test_intersect_oracle(a, b):
    A, B = S(*a), S(*b)
    got = A.intersect(B)
    for x in [Q(n, 16) for n in range(0, 160)]:
        p = num(x)
        inA = any(q.contains_point(p) for q in A)
        inB = any(q.contains_point(p) for q in B)
        assert (inA and inB) == any(q.contains_point(p) for q in got)
