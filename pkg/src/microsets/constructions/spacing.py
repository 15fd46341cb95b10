"""The base-13 spacing scaffold that places ``I_k`` for ``k`` in ``F(B)``.

Scaffold level ``i >= L`` has ``7 * 6^(i-L)`` members of length
``13^-((i+1)!)``.  Level ``L`` sits in the host at period ``2 * len``; member
``j`` of level ``k > L`` sits in member ``j mod 6^(k-L)`` of level ``k-1`` at
slot ``j // 6^(k-L)`` (again period ``2 * len``).  The members with
``6 * 6^(k-L) <= s < 7 * 6^(k-L)`` are the thin ones; they are enumerated level
by level and the ``i``-th thin member receives ``I_(a_i)`` flush left, where
``a_0 < a_1 < ...`` enumerates ``F(B)``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

from ..intervals import Interval
from ..numerals import Numeral

BASE = 13


class HostTooShort(ValueError):
    pass


def F_of(B) -> list[int]:
    out = []
    for b in sorted(set(B)):
        if b < 0:
            raise ValueError("B must contain naturals")
        out.extend(range(4**b, 4 ** (b + 1)))
    return out


def fact(n: int) -> int:
    return math.factorial(n)


def scaffold_length(i: int) -> Numeral:
    return Numeral.from_power(BASE, fact(i + 1))


def placement_exponent(m: int, k: int) -> int:
    return fact(m + 1) * fact(k + 1)


def placement_length(m: int, k: int) -> Numeral:
    return Numeral.from_power(BASE, placement_exponent(m, k))


def least_L(length: Numeral) -> int:
    """Least ``L >= 0`` with ``13 * 13^-((L+1)!) < length``."""
    L = 0
    while not Numeral.from_power(BASE, fact(L + 1) - 1) < length:
        L += 1
    return L


def host_admits(length: Numeral, min_f: int) -> bool:
    """``13 * 13^-((min_f+1)!) <= length``."""
    return Numeral.from_power(BASE, fact(min_f + 1) - 1) <= length


def thin_count(level: int, L: int) -> int:
    return 6 ** (level - L)


def thin_position(i: int, L: int) -> tuple[int, int]:
    """Level and member index of the ``i``-th thin member in size order."""
    level = L
    while i >= thin_count(level, L):
        i -= thin_count(level, L)
        level += 1
    return level, 6 * thin_count(level, L) + i


@dataclass(eq=False)
class SpacingScheme:
    m: int
    host: Interval
    B: frozenset
    L: int = field(init=False)
    F: tuple = field(init=False)

    def __post_init__(self):
        if self.host.base != BASE:
            raise ValueError("spacing hosts use base 13")
        if self.m < 0:
            raise ValueError("m must be >= 0")
        self.B = frozenset(self.B)
        self.F = tuple(F_of(self.B))
        self.L = least_L(self.host.length)
        if self.F and not host_admits(self.host.length, self.F[0]):
            raise HostTooShort(f"host shorter than 13*13^-(({self.F[0]}+1)!)")
        self._pos = {a: n for n, a in enumerate(self.F)}
        self._lo: dict[tuple[int, int], Numeral] = {}
        self._lock = threading.Lock()

    def level_size(self, level: int) -> int:
        return 7 * 6 ** (level - self.L)

    def scaffold_lo(self, level: int, j: int) -> Numeral:
        if level < self.L or not 0 <= j < self.level_size(level):
            raise IndexError("no such scaffold member")
        key = (level, j)
        hit = self._lo.get(key)
        if hit is not None:
            return hit
        e = fact(level + 1)
        if level == self.L:
            base_lo, slot = self.host.lo, j
        else:
            q = 6 ** (level - self.L)
            base_lo, slot = self.scaffold_lo(level - 1, j % q), j // q
        val = base_lo + Numeral.from_int(2 * slot, BASE).shift(e) if slot else base_lo
        with self._lock:
            self._lo[key] = val
        return val

    def scaffold(self, level: int, j: int) -> Interval:
        return Interval.at(self.scaffold_lo(level, j), scaffold_length(level))

    def is_thin(self, level: int, j: int) -> bool:
        return j >= 6 * 6 ** (level - self.L)

    def host_of(self, k: int) -> tuple[int, int]:
        """Thin scaffold member receiving ``I_k``."""
        if k not in self._pos:
            raise KeyError(f"{k} is not in F(B)")
        return thin_position(self._pos[k], self.L)

    def placement(self, k: int) -> Interval:
        level, j = self.host_of(k)
        length = placement_length(self.m, k)
        if scaffold_length(level) < length:
            raise HostTooShort(f"I_{k} does not fit in its scaffold member")
        return Interval.at(self.scaffold_lo(level, j), length)

    def placements(self, b: int | None = None) -> dict[int, Interval]:
        ks = self.F if b is None else range(4**b, 4 ** (b + 1))
        return {k: self.placement(k) for k in ks}

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "host": self.host.to_json(),
            "B": sorted(self.B),
            "L": self.L,
            "placements": [{"index": k, "interval": iv.to_json()} for k, iv in self.placements().items()],
        }


def spacing_place(m: int, I: Interval, B) -> SpacingScheme:
    return SpacingScheme(m, I, frozenset(B))
