"""Exact cover feasibility: can a finite closed target be covered by intervals
of prescribed lengths?

The exact decision is a dynamic program over subsets of budget indices.  The
state of a subset is the furthest frontier ``f`` such that the target left of
``f`` is covered.  Every feasible cover can be shifted right into
left-normalized form (each interval starts at the leftmost target point not yet
covered) without losing coverage, and a larger frontier dominates a smaller
one, so the maximal frontier per subset is an exact summary.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Any

from .budgets import BudgetList
from .intervals import Interval, IntervalSet, max_hit_count, measure, normalize_union
from .numerals import Numeral

DEFAULT_BUDGET_LIMIT = 22
# scaled-integer fast path is used while the exponent span stays below this
_SCALED_SPAN_LIMIT = 1 << 20


class CoverLimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class CoverProblem:
    target: IntervalSet
    budgets: BudgetList

    def __post_init__(self):
        tb = self.target.base
        if tb is not None and self.budgets.lengths and self.budgets.lengths[0].base != tb:
            raise ValueError("target and budgets use different bases")

    def to_json(self) -> dict:
        return {"target": self.target.to_json(), "budgets": self.budgets.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "CoverProblem":
        return cls(IntervalSet.from_json(data["target"]), BudgetList.from_json(data["budgets"]))


@dataclass(frozen=True)
class CoverVerdict:
    """Result of a cover query.

    ``placement`` maps budget index to placed interval.  For a feasible verdict
    it is a valid cover; a heuristic that fails may still report the partial
    placement it reached.
    """

    feasible: bool
    placement: tuple[tuple[int, Interval], ...] = ()
    certificate: dict[str, Any] | None = None
    method: str = "dp"

    def placement_dict(self) -> dict[int, Interval]:
        return dict(self.placement)

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "method": self.method,
            "placement": [{"index": i, "interval": iv.to_json()} for i, iv in self.placement],
            "certificate": _cert_to_json(self.certificate),
        }

    @classmethod
    def from_json(cls, data: dict) -> "CoverVerdict":
        placement = tuple((int(e["index"]), Interval.from_json(e["interval"])) for e in data["placement"])
        return cls(bool(data["feasible"]), placement, _cert_from_json(data["certificate"]), data["method"])


def _cert_to_json(cert):
    if cert is None:
        return None
    out = {}
    for k, v in cert.items():
        out[k] = v.to_json() if isinstance(v, Numeral) else v
    return out


def _cert_from_json(data):
    if data is None:
        return None
    out = {}
    for k, v in data.items():
        out[k] = Numeral.from_json(v) if isinstance(v, dict) and "runs" in v else v
    return out


class _Arith:
    """Maps Numerals to plain ints when the exponent span is small."""

    def __init__(self, values: list[Numeral]):
        nz = [v for v in values if v.sign != 0]
        self.base = values[0].base if values else 2
        self.scale = None
        if nz:
            tail = max(v.tail_exponent for v in nz)
            lead = min(v.lead_exponent for v in nz)
            if tail - lead < _SCALED_SPAN_LIMIT and tail >= 0:
                self.scale = tail
            elif tail - lead < _SCALED_SPAN_LIMIT:
                self.scale = 0

    def enc(self, x: Numeral):
        return x if self.scale is None else x.scaled_int(self.scale)

    def dec(self, x) -> Numeral:
        return x if self.scale is None else Numeral.from_scaled_int(x, self.base, self.scale)


def solve_feasible(p: CoverProblem, limit: int = DEFAULT_BUDGET_LIMIT) -> CoverVerdict:
    """Exact decision by subset dynamic programming (see module docstring)."""
    usable = p.budgets.usable()
    if len(usable) > limit:
        raise CoverLimitExceeded(f"{len(usable)} usable budgets exceed the limit {limit}")
    if p.target.is_empty():
        return CoverVerdict(True, (), None, "dp")

    values = [x for iv in p.target for x in (iv.lo, iv.hi)] + [p.budgets.lengths[i] for i in usable]
    ar = _Arith(values)
    los = [ar.enc(iv.lo) for iv in p.target]
    his = [ar.enc(iv.hi) for iv in p.target]
    end = his[-1]
    lens = [ar.enc(p.budgets.lengths[i]) for i in usable]
    n = len(usable)

    unset = object()
    best: list[Any] = [unset] * (1 << n)
    parent: list[Any] = [None] * (1 << n)
    best[0] = None
    explored = 0
    for mask in range(1 << n):
        f = best[mask]
        if f is unset:
            continue
        explored += 1
        if f is not None and f >= end:
            return CoverVerdict(True, _rebuild(mask, parent, usable, lens, ar), None, "dp")
        start = _start(los, his, f)
        for b in range(n):
            bit = 1 << b
            if mask & bit:
                continue
            nf = start + lens[b]
            cur = best[mask | bit]
            if cur is unset or cur is None or cur < nf:
                best[mask | bit] = nf
                parent[mask | bit] = (mask, b, start)
    frontier = max((v for v in best if v is not unset and v is not None), default=None)
    cert = {
        "kind": "subset-DP-exhaustion",
        "states": explored,
        "best_frontier": ar.dec(frontier) if frontier is not None else None,
    }
    return CoverVerdict(False, (), cert, "dp")


def _start(los, his, f):
    if f is None:
        return los[0]
    i = bisect.bisect_right(his, f)
    return f if los[i] <= f else los[i]


def _rebuild(mask, parent, usable, lens, ar):
    out = []
    while mask:
        prev, b, start = parent[mask]
        out.append((usable[b], Interval(ar.dec(start), ar.dec(start + lens[b]))))
        mask = prev
    return tuple(sorted(out, key=lambda e: e[0]))


def greedy_cover(p: CoverProblem) -> CoverVerdict:
    """Longest remaining budget at the leftmost uncovered point.

    Sound but incomplete: it may fail on feasible instances.
    """
    if p.target.is_empty():
        return CoverVerdict(True, (), None, "greedy")
    order = sorted(p.budgets.usable(), key=lambda i: (p.budgets.lengths[i], -i), reverse=True)
    los = [iv.lo for iv in p.target]
    his = [iv.hi for iv in p.target]
    f = None
    placed = []
    for i in order:
        if f is not None and f >= his[-1]:
            break
        start = _start(los, his, f)
        iv = Interval.at(start, p.budgets.lengths[i])
        placed.append((i, iv))
        f = iv.hi
    ok = f is not None and f >= his[-1]
    return CoverVerdict(ok, tuple(sorted(placed, key=lambda e: e[0])), None, "greedy")


def counting_certificate(p: CoverProblem) -> dict | None:
    """Pigeonhole or measure argument for infeasibility, if one applies."""
    comps = len(p.target)
    if comps == 0:
        return None
    usable = p.budgets.usable()
    lens = [p.budgets.lengths[i] for i in usable]
    hits = [max_hit_count(p.target, x) for x in lens]
    if sum(hits) < comps:
        return {"kind": "counting", "hits": hits, "components": comps}
    total = Numeral.zero(p.target.base)
    for x in lens:
        total = total + x
    m = measure(p.target)
    if total < m:
        return {"kind": "measure", "budget_total": total, "target_measure": m}
    return None


def validate_cover(target: IntervalSet, budgets: BudgetList, placement) -> tuple[bool, list[str]]:
    """Independent check of a placement against lengths, bans and coverage."""
    problems = []
    placement = dict(placement)
    for i, iv in placement.items():
        if not 0 <= i < len(budgets.lengths):
            problems.append(f"index {i} has no budget")
            continue
        if i in budgets.banned:
            problems.append(f"banned index {i} used")
        if budgets.lengths[i] < iv.length:
            problems.append(f"index {i}: length exceeds budget")
    union = normalize_union(placement.values())
    for comp in target:
        if not union.contains_interval(comp):
            problems.append(f"component {comp!r} not covered")
    return not problems, problems
