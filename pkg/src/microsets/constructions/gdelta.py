"""Covers of the rationals in [0, 1] centred at an enumeration ``q_0, q_1, ...``.

Stage ``n`` uses ``eps = 1/(n+1)`` and puts an interval of radius
``f_i(eps)/2`` around ``q_i``.  The canonical enumeration is 0, 1, then reduced
fractions by ascending denominator and numerator.  A dyadic variant (0, 1,
then odd numerators over ``2^d``) keeps every endpoint an exact base-2
Numeral and is what the merge procedures consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import count, islice

from ..budgets import EpsilonSpec, PowerFamily, budget_length
from ..intervals import Interval
from ..numerals import Numeral

ENUMERATIONS = ("rational", "dyadic")


class InexpressibleEpsilon(ValueError):
    pass


def rational_enumeration():
    yield Fraction(0)
    yield Fraction(1)
    for q in count(2):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)


def dyadic_enumeration():
    yield Fraction(0)
    yield Fraction(1)
    for d in count(1):
        for p in range(1, 1 << d, 2):
            yield Fraction(p, 1 << d)


def rational_index(q: Fraction) -> int:
    """Position of ``q`` in the canonical enumeration."""
    q = Fraction(q)
    if not 0 <= q <= 1:
        raise ValueError("only rationals in [0, 1] are enumerated")
    if q == 0:
        return 0
    if q == 1:
        return 1
    d = q.denominator
    before = 2 + sum(_totient(e) for e in range(2, d))
    return before + sum(1 for p in range(1, q.numerator) if math.gcd(p, d) == 1)


def _totient(n: int) -> int:
    return sum(1 for p in range(1, n) if math.gcd(p, n) == 1)


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval centred at an exact rational with a Numeral radius."""

    center: Fraction
    radius: Numeral

    @property
    def lo(self) -> Fraction:
        return self.center - self.radius.to_fraction()

    @property
    def hi(self) -> Fraction:
        return self.center + self.radius.to_fraction()

    @property
    def length(self) -> Numeral:
        return self.radius + self.radius

    def contains_point(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {"center": str(self.center), "radius": self.radius.to_json()}


@dataclass(frozen=True)
class GdeltaRationalScheme:
    family: PowerFamily
    enumeration: str = "rational"
    base: int = 2

    def __post_init__(self):
        if self.enumeration not in ENUMERATIONS:
            raise ValueError(f"unknown enumeration {self.enumeration!r}")

    def points(self, count_: int) -> list[Fraction]:
        gen = rational_enumeration() if self.enumeration == "rational" else dyadic_enumeration()
        return list(islice(gen, count_))

    def eps(self, n: int) -> EpsilonSpec:
        if n < 1:
            raise InexpressibleEpsilon("stage n must be >= 1 so that 1/(n+1) < 1")
        t = 0
        v = n + 1
        while v % self.base == 0:
            v //= self.base
            t += 1
        if v != 1:
            raise InexpressibleEpsilon(f"1/{n + 1} is not a power of 1/{self.base}")
        return EpsilonSpec(self.base, t)


def rational_cover_stage(sch: GdeltaRationalScheme, n: int, count_: int):
    """First ``count_`` intervals of stage ``n``.

    The canonical enumeration yields :class:`RationalInterval` values; the
    dyadic one yields plain :class:`Interval` values with Numeral endpoints.
    """
    eps = sch.eps(n)
    out = []
    for i, q in enumerate(sch.points(count_)):
        half = _half(budget_length(sch.family, i, eps))
        if sch.enumeration == "rational":
            out.append(RationalInterval(q, half))
        else:
            c = Numeral.from_fraction(q, sch.base)
            out.append(Interval(c - half, c + half))
    return out


def _half(x: Numeral) -> Numeral:
    if x.base != 2:
        raise ValueError("radius halving needs base 2")
    return x.shift(1)
