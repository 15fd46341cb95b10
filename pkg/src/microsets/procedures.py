"""Cover transformations: re-indexing compact covers, unions, merges and splits.

Every operation returns a :class:`LabeledCover` and validates it before
returning: each index carries an interval no longer than its budget and the
union contains the recorded target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .budgets import EpsilonSpec, PowerFamily, budget_length, nano, shift_family
from .constructions.gdelta import GdeltaRationalScheme, rational_cover_stage
from .constructions.nano import NanoScheme, nano_S
from .intervals import Interval, IntervalSet, min_gap, normalize_union
from .numerals import Numeral


class InsufficientCoverData(ValueError):
    pass


class InvalidCover(AssertionError):
    pass


@dataclass(frozen=True)
class LabeledCover:
    """Index -> interval map together with the finite target it must cover."""

    entries: dict
    target: IntervalSet
    fam: PowerFamily
    eps: EpsilonSpec
    notes: dict = field(default_factory=dict)

    def indices(self) -> list[int]:
        return sorted(self.entries)

    def problems(self) -> list[str]:
        out = []
        for i, iv in self.entries.items():
            if i < 0:
                out.append(f"negative index {i}")
            elif budget_length(self.fam, i, self.eps) < iv.length:
                out.append(f"index {i}: length exceeds budget")
        union = normalize_union(self.entries.values())
        for comp in self.target:
            if not union.contains_interval(comp):
                out.append(f"target component {comp!r} not covered")
        return out

    def validate(self) -> "LabeledCover":
        bad = self.problems()
        if bad:
            raise InvalidCover("; ".join(bad[:5]))
        return self

    def to_json(self) -> dict:
        return {
            "eps": self.eps.to_json(),
            "family": self.fam.name,
            "target": self.target.to_json(),
            "entries": [{"index": str(i), "interval": self.entries[i].to_json()} for i in self.indices()],
            "notes": self.notes,
        }


def validate_cover_bundle(cover: LabeledCover) -> tuple[bool, list[str]]:
    bad = cover.problems()
    return not bad, bad


# --- sources ----------------------------------------------------------------
class CoverSource(Protocol):
    """A compact set known through finite stages and per-epsilon covers.

    ``family_cover`` returns pairwise disjoint intervals, all indices
    ``>= start``, together with a materialized superset of the compact set
    that those intervals cover.
    """

    def stage_set(self, depth: int) -> IntervalSet: ...

    def family_cover(self, fam: PowerFamily, eps: EpsilonSpec, start: int = 0) -> LabeledCover: ...


@dataclass(frozen=True)
class PointSource:
    """A finite set of points; covered by degenerate intervals at any epsilon."""

    points: tuple

    def __post_init__(self):
        pts = tuple(sorted(set(self.points)))
        object.__setattr__(self, "points", pts)
        if len({p.base for p in pts}) > 1:
            raise ValueError("points must share one base")

    @classmethod
    def of(cls, values, base: int = 2) -> "PointSource":
        return cls(tuple(Numeral.from_fraction(v, base) if not isinstance(v, Numeral) else v for v in values))

    def stage_set(self, depth: int = 0) -> IntervalSet:
        return normalize_union(Interval(p, p) for p in self.points)

    def family_cover(self, fam: PowerFamily, eps: EpsilonSpec, start: int = 0) -> LabeledCover:
        entries = {start + n: Interval(p, p) for n, p in enumerate(self.points)}
        return LabeledCover(entries, self.stage_set(), fam, eps).validate()


@dataclass(frozen=True)
class NanoSchemeSource:
    """The compact set ``X`` of the nano scheme, optionally translated.

    At ``eps = 2^-t`` under the 2-shifted nano family the nodes of a stage
    ``S_d`` cover ``X``; node ``k`` goes to slot ``k - 2c`` with
    ``c = max(0, ceil(log2 t) - 1)``, which makes
    ``|I_k| = 2^-(2^(k//2+1)) <= eps^(2^((k-2c)//2))``.  Only stages up to 2
    are materializable.
    """

    scheme: NanoScheme = field(default_factory=NanoScheme)
    offset: Numeral = field(default_factory=lambda: Numeral.zero(2))

    def stage_set(self, depth: int) -> IntervalSet:
        ivs = [self._iv(k) for k in nano_S(depth)]
        return normalize_union(ivs)

    def _iv(self, k: int) -> Interval:
        return self.scheme.interval(k).translate(self.offset)

    def family_cover(self, fam: PowerFamily, eps: EpsilonSpec, start: int = 0) -> LabeledCover:
        if eps.base != 2:
            raise InsufficientCoverData("nano scheme covers use base 2")
        if fam.name != "shift:2:nano":
            raise InsufficientCoverData("the nano scheme is only covered under the 2-shifted nano family")
        c = max(0, math.ceil(math.log2(eps.t)) - 1) if eps.t > 1 else 0
        d = 0
        while nano_S(d).start < start + 2 * c:
            d += 1
        if d > 2:
            raise InsufficientCoverData(f"eps = {eps} from index {start} needs stage {d} > 2")
        entries = {k - 2 * c: self._iv(k) for k in nano_S(d)}
        cov = LabeledCover(entries, self.stage_set(d), fam, eps, {"stage": d, "shift": 2 * c})
        return cov.validate()


# --- epsilon selection ---------------------------------------------------------
def smallest_eps_below(fam: PowerFamily, bound: Numeral, base: int) -> EpsilonSpec:
    """Least ``t`` with ``f_0(base^-t) < bound`` (so the smallest admissible step)."""
    if bound.sign <= 0:
        raise InsufficientCoverData("no positive epsilon fits below a non-positive bound")
    E = bound.lead_exponent
    if bound == Numeral.from_power(base, E):
        E += 1
    e0 = fam.exponent(0)
    t = max(1, -(-E // e0))
    while not Numeral.from_power(base, t * e0) < bound:
        t += 1
    return EpsilonSpec(base, t)


# --- compact cover re-indexing ------------------------------------------------
def compact_shift(src: CoverSource, fam: PowerFamily, k: int, eps: EpsilonSpec) -> LabeledCover:
    """Cover ``src`` with intervals indexed ``> k`` under budgets ``f_n(eps)``.

    Bookkeeping (indices shifted by one relative to a k-bin version so that the
    counts close exactly):

    * ``eps'`` with ``f_0(eps') < f_(2k+1)(eps)``; its cover gives ``l'`` disjoint
      bins ``I'``.
    * ``eps''`` with ``f_0(eps'') < f_(k+l')(eps)`` and below every gap between
      bins; each ``I''`` meets at most one bin and is clipped to it.
    * The ``k+1`` fullest bins (by number of items among ``I''_0..I''_(k+l')``)
      take slots ``k+1..2k+1`` and absorb at least
      ``min(2k+2, #items - (l'-k-1))`` items (``2k+2`` when all
      ``k+l'+1`` head items exist); the remaining items take slots ``2k+2..k+l'``; every ``I''_n``
      with ``n > k+l'`` keeps slot ``n``.
    """
    if k < -1:
        raise ValueError("k must be >= -1")
    base = eps.base
    if k == -1:
        return src.family_cover(fam, eps, 0)
    eps1 = smallest_eps_below(fam, budget_length(fam, 2 * k + 1, eps), base)
    c1 = src.family_cover(fam, eps1, 0)
    bins = sorted(c1.entries.values(), key=lambda iv: iv.lo)
    if normalize_union(bins).parts != tuple(bins):
        raise InsufficientCoverData("source covers must be pairwise disjoint")
    lp = len(bins)
    gap = min_gap(IntervalSet(tuple(bins)))
    bound2 = budget_length(fam, k + lp, eps)
    if gap is not None and gap < bound2:
        bound2 = gap
    eps2 = smallest_eps_below(fam, bound2, base)
    c2 = src.family_cover(fam, eps2, 0)

    items: dict[int, tuple[int, Interval]] = {}
    for n, iv in sorted(c2.entries.items()):
        owners = [b for b, bv in enumerate(bins) if bv.intersects(iv)]
        if len(owners) > 1:
            raise AssertionError("an eps'' interval met two bins despite the gap bound")
        if owners:
            items[n] = (owners[0], iv.intersection(bins[owners[0]]))

    head = [n for n in items if n <= k + lp]
    occupancy = [0] * lp
    for n in head:
        occupancy[items[n][0]] += 1
    top = sorted(range(lp), key=lambda b: (-occupancy[b], b))[: k + 1]
    absorbed = sum(occupancy[b] for b in top)
    # the other bins hold at most one head item each unless the top bins are
    # all at least doubly occupied; with a full head this forces 2k+2 items
    need = min(2 * k + 2, max(0, len(head) - max(0, lp - k - 1)))
    if absorbed < need:
        raise AssertionError(f"fullest {k + 1} bins hold {absorbed} < {need} items")

    entries: dict[int, Interval] = {}
    for slot, b in zip(range(k + 1, 2 * k + 2), sorted(top)):
        entries[slot] = bins[b]
    top_set = set(top)
    rest = [items[n][1] for n in sorted(head) if items[n][0] not in top_set]
    free = list(range(2 * k + 2, k + lp + 1))
    if len(rest) > len(free):
        raise AssertionError("more leftover items than free slots")
    for slot, iv in zip(free, rest):
        entries[slot] = iv
    for n in sorted(items):
        if n > k + lp:
            entries[n] = items[n][1]

    target = c2.target.intersect(normalize_union(bins))
    notes = {
        "k": k,
        "eps1": str(eps1),
        "eps2": str(eps2),
        "bins": lp,
        "items_in_head": len(head),
        "absorbed_by_top_bins": absorbed,
        "required": need,
    }
    return LabeledCover(entries, target, fam, eps, notes).validate()


def sigma_union_cover(srcs: Sequence[CoverSource], fam: PowerFamily, eps: EpsilonSpec) -> LabeledCover:
    """Joint cover of finitely many compact sources in consecutive index blocks."""
    entries: dict[int, Interval] = {}
    parts = []
    k = -1
    blocks = []
    for src in srcs:
        cov = compact_shift(src, fam, k, eps)
        if cov.entries and min(cov.entries) <= k:
            raise AssertionError("block overlaps an earlier block")
        entries.update(cov.entries)
        parts.extend(cov.target.parts)
        lo = k + 1
        k = max(cov.entries) if cov.entries else k
        blocks.append([lo, k])
    target = normalize_union(parts)
    return LabeledCover(entries, target, fam, eps, {"blocks": blocks}).validate()


# --- union with a countable set -------------------------------------------
@dataclass(frozen=True)
class MergePlan:
    case: int
    bookkeeping: dict
    cover: LabeledCover

    def to_json(self) -> dict:
        return {"case": self.case, "bookkeeping": self.bookkeeping, "cover": self.cover.to_json()}


@dataclass(frozen=True)
class NestedCoverData:
    """Input for :func:`smz_merge`.

    ``case == 1``: ``pieces`` are compact sources ``A_k`` whose union contains
    ``A``.  ``case == 2``: ``gdelta`` is a dyadic scheme whose stage ``n``
    covers are its intervals at ``eps = 2^-(2^n)``, truncated to ``count``.
    """

    case: int
    pieces: tuple = ()
    gdelta: GdeltaRationalScheme | None = None
    count: int = 0


def _point(b: Numeral) -> Interval:
    return Interval(b, b)


def gdelta_stage(sch: GdeltaRationalScheme, n: int, count: int) -> list[Interval]:
    """Stage ``n`` of the nested presentation: ``eps = 2^-(2^n)``."""
    return rational_cover_stage(sch, (1 << (1 << n)) - 1, count)


def smz_merge(A: NestedCoverData, B: Sequence[Numeral], eps: EpsilonSpec, fam: PowerFamily | None = None) -> MergePlan:
    fam = nano() if fam is None else fam
    B = list(B)
    if A.case == 1:
        return _merge_case1(A, B, eps, fam)
    if A.case == 2:
        return _merge_case2(A, B, eps, fam)
    raise ValueError("structural flag must be 1 or 2")


def _merge_case1(A, B, eps, fam) -> MergePlan:
    if not A.pieces:
        raise InsufficientCoverData("case 1 needs at least one compact piece")
    entries: dict[int, Interval] = {}
    parts = [_point(b) for b in B]
    reserved = []
    k = -1
    for n, piece in enumerate(A.pieces):
        s = k + 1
        if n < len(B):
            entries[s] = _point(B[n])
            reserved.append(s)
        cov = compact_shift(piece, fam, s, eps)
        entries.update(cov.entries)
        parts.extend(cov.target.parts)
        k = max(cov.entries) if cov.entries else s
    for b in B[len(A.pieces):]:
        k += 1
        entries[k] = _point(b)
        reserved.append(k)
    cover = LabeledCover(entries, normalize_union(parts), fam, eps).validate()
    return MergePlan(1, {"reserved": reserved}, cover)


def _merge_case2(A, B, eps, fam) -> MergePlan:
    if fam.name != "nano" or eps.base != 2:
        raise InsufficientCoverData("case 2 is stated for the nano family in base 2")
    sch = A.gdelta
    if sch is None or sch.enumeration != "dyadic" or sch.family.name != "nano":
        raise InsufficientCoverData("case 2 needs a dyadic nano scheme")
    n = 0
    while (1 << n) <= eps.t:
        n += 1
    m = n + 1
    outer = gdelta_stage(sch, n, A.count)
    inner = gdelta_stage(sch, m, A.count)
    k = 0
    T = [j for j, iv in enumerate(inner) if outer[k].contains(iv)]
    if not T:
        raise InsufficientCoverData("no inner interval inside the chosen outer one at this horizon")
    if len(T) < len(B):
        raise InsufficientCoverData(f"only {len(T)} nested indices for {len(B)} points")
    entries = {0: outer[k]}
    Tset = set(T)
    for j, iv in enumerate(inner):
        if j not in Tset:
            entries[j + 1] = iv
    eps_i = []
    for i, b in enumerate(B):
        bound = Numeral.from_power(2, 1 << (m + T[i]))
        entries[T[i] + 1] = _point(b)
        eps_i.append({"i": i, "slot": T[i] + 1, "log2_log2_eps": m + T[i]})
        if bound.sign <= 0:
            raise AssertionError
    target = normalize_union(list(inner) + [_point(b) for b in B])
    cover = LabeledCover(entries, target, fam, eps).validate()
    book = {"n": n, "k": k, "m": m, "T": T, "eps_i": eps_i}
    return MergePlan(2, book, cover)


# --- splitting an m-shifted cover ---------------------------------------------
@dataclass(frozen=True)
class DecompositionResult:
    m: int
    cuts: tuple
    blocks: tuple
    part_stages: tuple
    part_covers: tuple  # per part: tuple of (eps, LabeledCover)
    stage: IntervalSet

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "cuts": list(self.cuts),
            "part_stages": [p.to_json() for p in self.part_stages],
            "part_covers": [[c.to_json() for _, c in covers] for covers in self.part_covers],
        }


def decompose_m(src: CoverSource, fam: PowerFamily, m: int, depth: int) -> DecompositionResult:
    """Split a compact m-shifted-family set into ``m`` parts with family covers.

    Block ``n`` covers the set at ``eps_n = 2^-(n+1)`` with indices from
    ``m * l_n`` on; part ``j`` at ``eps_n`` uses ``J_k = I_(m(k + l_n) + j)``.
    """
    if m < 1 or depth < 0:
        raise ValueError("need m >= 1 and depth >= 0")
    shifted = shift_family(fam, m)
    cuts = [0]
    blocks = []
    for n in range(depth + 1):
        cov = src.family_cover(shifted, EpsilonSpec(2, n + 1), m * cuts[-1])
        if min(cov.entries) < m * cuts[-1]:
            raise AssertionError("block starts below its cut")
        blocks.append(cov)
        cuts.append(max(cuts[-1] + 1, -(-(max(cov.entries) + 1) // m)))
    index: dict[int, Interval] = {}
    for cov in blocks:
        index.update(cov.entries)
    last = blocks[-1]
    stage = last.target
    parts = []
    covers = []
    for j in range(m):
        own = [iv for i, iv in last.entries.items() if i % m == j]
        part = stage.intersect(normalize_union(own)) if own else IntervalSet(())
        parts.append(part)
        per_eps = []
        for n in range(depth + 1):
            eps = EpsilonSpec(2, n + 1)
            entries = {}
            for i, iv in index.items():
                if i % m == j and i >= m * cuts[n]:
                    entries[(i - j) // m - cuts[n]] = iv
            per_eps.append((eps, LabeledCover(entries, part, fam, eps).validate()))
        covers.append(tuple(per_eps))
    union = normalize_union([iv for p in parts for iv in p])
    if not union.covers(stage):
        raise AssertionError("parts do not cover the stage set")
    return DecompositionResult(m, tuple(cuts), tuple(blocks), tuple(parts), tuple(covers), stage)


# --- null covers to a family --------------------------------------------------
@dataclass(frozen=True)
class NullCoverInput:
    """Rows ``m`` of a null cover table with certified full row sums.

    ``lengths[m][n] = |I^m_n|``; ``row_sums[m]`` bounds the whole (possibly
    infinite) row and must be ``< 2^-(m+1)``.  Rows beyond the table obey the
    same bound, so each of their entries is ``< 2^-(m+1)``.
    """

    lengths: tuple
    row_sums: tuple

    def __post_init__(self):
        if len(self.lengths) != len(self.row_sums):
            raise ValueError("one certified sum per row")
        for m, (row, s) in enumerate(zip(self.lengths, self.row_sums)):
            if any(x.sign <= 0 for x in row):
                raise ValueError(f"row {m}: lengths must be positive")
            if any(b > a for a, b in zip(row, row[1:])):
                raise ValueError(f"row {m}: lengths must be nonincreasing")
            total = Numeral.zero(s.base)
            for x in row:
                total = total + x
            if s < total:
                raise ValueError(f"row {m}: certified sum below the listed partial sum")
            if not s < Numeral.from_power(2, m + 1):
                raise ValueError(f"row {m}: certified sum not below 2^-{m + 1}")

    @classmethod
    def parametric(cls, rows: int, cols: int) -> "NullCoverInput":
        """``|I^m_n| = 2^-(m+3+n)``, row sums ``2^-(m+2)``."""
        lengths = tuple(tuple(Numeral.from_power(2, m + 3 + n) for n in range(cols)) for m in range(rows))
        return cls(lengths, tuple(Numeral.from_power(2, m + 2) for m in range(rows)))


@dataclass(frozen=True)
class FamilyTable:
    a: dict  # (m, n) -> Numeral
    checks: dict
    samples: tuple

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "a": [{"m": m, "n": n, "value": v.to_json()} for (m, n), v in sorted(self.a.items())],
            "checks": self.checks,
            "samples": [{"n": n, "eps": f"2^-{m + 2}", "value": v.to_json()} for n, m, v in self.samples],
        }


def a_entry(inp: NullCoverInput, m: int, n: int) -> Numeral:
    """``max_(j >= m) |I^j_n|`` with the tail stopping rule."""
    best = None
    j = m
    while True:
        if best is not None and Numeral.from_power(2, j + 1) <= best:
            return best
        if j >= len(inp.lengths):
            raise InsufficientCoverData(f"a[{m},{n}]: stopping rule not reached within {len(inp.lengths)} rows")
        row = inp.lengths[j]
        if n >= len(row):
            raise InsufficientCoverData(f"row {j} lists fewer than {n + 1} lengths")
        if best is None or best < row[n]:
            best = row[n]
        j += 1


def null_to_family(inp: NullCoverInput, rows: int | None = None, cols: int | None = None) -> FamilyTable:
    """Compute ``a_(m,n)`` on the largest certifiable window and check its properties."""
    R = len(inp.lengths)
    C = min(len(r) for r in inp.lengths) if R else 0
    cols = C if cols is None else cols
    a = {}
    rows_done = 0
    for m in range(R if rows is None else rows):
        try:
            row = {(m, n): a_entry(inp, m, n) for n in range(cols)}
        except InsufficientCoverData:
            if rows is not None:
                raise
            break
        a.update(row)
        rows_done = m + 1
    if rows_done < 2 and R >= 2:
        raise InsufficientCoverData("stopping rule certified fewer than two rows")
    checks = {"row_sum_below_2^-m": True, "entry_below_2^-(m+1)": True, "monotone_in_m": True,
              "dominates_lengths": True, "chain_in_n": True}
    for m in range(rows_done):
        total = Numeral.zero(2)
        for n in range(cols):
            v = a[(m, n)]
            total = total + v
            if not v < Numeral.from_power(2, m + 1):
                checks["entry_below_2^-(m+1)"] = False
            if inp.lengths[m][n] > v:
                checks["dominates_lengths"] = False
            if m + 1 < rows_done and a[(m + 1, n)] > v:
                checks["monotone_in_m"] = False
            if n + 1 < cols and a[(m, n + 1)] > v:
                checks["chain_in_n"] = False
        if not total < Numeral.from_power(2, m):
            checks["row_sum_below_2^-m"] = False
    samples = tuple((n, m, a[(m, n)]) for (m, n) in sorted(a))
    return FamilyTable(a, checks, samples)
