"""Closed intervals with exact endpoints and normalized finite unions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .numerals import BaseMismatch, Numeral


@dataclass(frozen=True)
class Interval:
    lo: Numeral
    hi: Numeral

    def __post_init__(self):
        if self.lo.base != self.hi.base:
            raise BaseMismatch("endpoint bases differ")
        if self.hi < self.lo:
            raise ValueError("interval with hi < lo")

    @classmethod
    def of(cls, lo, hi, base: int = 2) -> "Interval":
        """Build from ints/Fractions/Numerals."""
        return cls(_num(lo, base), _num(hi, base))

    @classmethod
    def at(cls, lo: Numeral, length: Numeral) -> "Interval":
        return cls(lo, lo + length)

    @property
    def base(self) -> int:
        return self.lo.base

    @property
    def length(self) -> Numeral:
        return self.hi - self.lo

    def intersects(self, other: "Interval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def contains_point(self, x: Numeral) -> bool:
        return self.lo <= x <= self.hi

    def distance(self, other: "Interval") -> Numeral:
        if self.intersects(other):
            return Numeral.zero(self.base)
        if self.hi < other.lo:
            return other.lo - self.hi
        return self.lo - other.hi

    def intersection(self, other: "Interval") -> "Interval | None":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if hi < lo:
            return None
        return Interval(lo, hi)

    def translate(self, d: Numeral) -> "Interval":
        return Interval(self.lo + d, self.hi + d)

    def to_json(self) -> dict:
        return {"lo": self.lo.to_json(), "hi": self.hi.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "Interval":
        return cls(Numeral.from_json(data["lo"]), Numeral.from_json(data["hi"]))

    def __repr__(self) -> str:
        return f"[{self.lo.approx()}, {self.hi.approx()}]"


def _num(x, base: int) -> Numeral:
    if isinstance(x, Numeral):
        return x
    return Numeral.from_fraction(x, base)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint, non-touching closed intervals."""

    parts: tuple[Interval, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.parts, self.parts[1:]):
            if not a.hi < b.lo:
                raise ValueError("IntervalSet parts must be sorted and separated; use normalize_union")

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    @property
    def base(self) -> int | None:
        return self.parts[0].base if self.parts else None

    def is_empty(self) -> bool:
        return not self.parts

    def contains_interval(self, iv: Interval) -> bool:
        # parts are sorted and disjoint: only the last part starting at or
        # before iv.lo can contain iv
        lo, hi = 0, len(self.parts)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.parts[mid].lo <= iv.lo:
                lo = mid + 1
            else:
                hi = mid
        return lo > 0 and self.parts[lo - 1].contains(iv)

    def covers(self, other: "IntervalSet") -> bool:
        """``other`` is a subset of this set."""
        return all(self.contains_interval(iv) for iv in other.parts)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return normalize_union(list(self.parts) + list(other.parts))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        a, b = self.parts, other.parts
        while i < len(a) and j < len(b):
            x = a[i].intersection(b[j])
            if x is not None:
                out.append(x)
            if a[i].hi < b[j].hi:
                i += 1
            else:
                j += 1
        return normalize_union(out)

    def to_json(self) -> dict:
        return {"intervals": [p.to_json() for p in self.parts]}

    @classmethod
    def from_json(cls, data: dict) -> "IntervalSet":
        return normalize_union([Interval.from_json(x) for x in data["intervals"]])

    def __repr__(self) -> str:
        return "IntervalSet(" + ", ".join(repr(p) for p in self.parts) + ")"


def normalize_union(raw: Iterable[Interval]) -> IntervalSet:
    items = sorted(raw, key=lambda iv: iv.lo)
    if not items:
        return IntervalSet(())
    base = items[0].base
    merged = [items[0]]
    for iv in items[1:]:
        if iv.base != base:
            raise BaseMismatch("mixed bases in union")
        last = merged[-1]
        if iv.lo <= last.hi:
            if last.hi < iv.hi:
                merged[-1] = Interval(last.lo, iv.hi)
        else:
            merged.append(iv)
    return IntervalSet(tuple(merged))


def min_gap(s: IntervalSet) -> Numeral | None:
    if len(s) < 2:
        return None
    return min(b.lo - a.hi for a, b in zip(s.parts, s.parts[1:]))


def max_hit_count(s: IntervalSet | Sequence[Interval], length: Numeral) -> int:
    """Most components one closed interval of the given length can meet.

    Components ``i..j`` are met together iff ``lo_j - hi_i <= length``; two
    pointers sweep the sorted endpoints.
    """
    parts = s.parts if isinstance(s, IntervalSet) else tuple(sorted(s, key=lambda iv: iv.lo))
    if length.sign < 0:
        raise ValueError("length must be >= 0")
    n = len(parts)
    if n == 0:
        return 0
    best = 1
    j = 0
    for i in range(n):
        if j < i:
            j = i
        while j + 1 < n and parts[j + 1].lo - parts[i].hi <= length:
            j += 1
        best = max(best, j - i + 1)
    return best


def measure(s: IntervalSet) -> Numeral:
    if not s.parts:
        return Numeral.zero(2)
    total = Numeral.zero(s.base)
    for p in s.parts:
        total = total + p.length
    return total
