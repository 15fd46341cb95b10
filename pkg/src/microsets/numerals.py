"""Exact signed positional numerals with run-length encoded digits.

A :class:`Numeral` stands for ``sign * sum(d * base**(-e))`` where the digit
``d`` is constant over runs of consecutive exponent positions.  Exponents are
plain Python ints, so a value like ``2**-(2**200)`` costs one run, and a
borrow across a gap of ``10**1000`` positions costs one run as well.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

Run = tuple[int, int, int]


class BaseMismatch(ValueError):
    pass


def _canonical_runs(runs, base):
    items = sorted((r for r in runs if r[2] != 0), key=lambda r: r[0])
    out: list[list[int]] = []
    for lo, hi, d in items:
        if lo > hi:
            raise ValueError(f"empty run {lo}..{hi}")
        if not 1 <= d < base:
            raise ValueError(f"digit {d} out of range for base {base}")
        if out and lo <= out[-1][1]:
            raise ValueError("overlapping runs")
        if out and out[-1][2] == d and out[-1][1] + 1 == lo:
            out[-1][1] = hi
        else:
            out.append([lo, hi, d])
    return tuple((lo, hi, d) for lo, hi, d in out)


def _align(ra, rb):
    """Split the exponent range of both run lists into elementary segments.

    Yields ``(lo, hi, da, db)`` in ascending exponent order (most significant
    first), covering every position between the extreme runs, gaps included.
    """
    pts = set()
    for lo, hi, _ in ra:
        pts.add(lo)
        pts.add(hi + 1)
    for lo, hi, _ in rb:
        pts.add(lo)
        pts.add(hi + 1)
    pts = sorted(pts)
    ia = ib = 0
    out = []
    for lo, nxt in zip(pts, pts[1:]):
        while ia < len(ra) and ra[ia][1] < lo:
            ia += 1
        while ib < len(rb) and rb[ib][1] < lo:
            ib += 1
        da = ra[ia][2] if ia < len(ra) and ra[ia][0] <= lo else 0
        db = rb[ib][2] if ib < len(rb) and rb[ib][0] <= lo else 0
        out.append((lo, nxt - 1, da, db))
    return out


def _cmp_mag(ra, rb) -> int:
    for _, _, da, db in _align(ra, rb):
        if da != db:
            return 1 if da > db else -1
    return 0


def _add_mag(ra, rb, base):
    # Within a segment the carry settles after the first position: the
    # carry map c -> (da + db + c) // base is either constant or the identity.
    out = []
    carry = 0
    segs = _align(ra, rb)
    for lo, hi, da, db in reversed(segs):
        s = da + db + carry
        out.append((hi, hi, s % base))
        carry = s // base
        if hi > lo:
            s = da + db + carry
            out.append((lo, hi - 1, s % base))
            carry = s // base
    if carry:
        out.append((segs[0][0] - 1, segs[0][0] - 1, carry))
    return _canonical_runs(out, base)


def _sub_mag(ra, rb, base):
    # Requires |ra| >= |rb|; same settling argument as _add_mag for borrows.
    out = []
    borrow = 0
    for lo, hi, da, db in reversed(_align(ra, rb)):
        d = da - db - borrow
        borrow = 1 if d < 0 else 0
        out.append((hi, hi, d % base))
        if hi > lo:
            d = da - db - borrow
            borrow = 1 if d < 0 else 0
            out.append((lo, hi - 1, d % base))
    if borrow:
        raise ArithmeticError("magnitude subtraction underflow")
    return _canonical_runs(out, base)


@functools.total_ordering
@dataclass(frozen=True)
class Numeral:
    """Exact value ``sign * sum over runs of digit * base**(-e)``.

    Construct through :meth:`make`, :meth:`from_power`, :meth:`from_int` or
    :meth:`from_fraction`; the raw constructor trusts its arguments.
    """

    base: int
    sign: int
    runs: tuple[Run, ...]

    # -- construction -----------------------------------------------------

    @classmethod
    def make(cls, base: int, sign: int, runs) -> "Numeral":
        if base < 2:
            raise ValueError("base must be >= 2")
        runs = _canonical_runs(runs, base)
        if not runs:
            return cls(base, 0, ())
        if sign not in (-1, 1):
            raise ValueError("nonzero numeral needs sign +1 or -1")
        return cls(base, sign, runs)

    @classmethod
    def zero(cls, base: int) -> "Numeral":
        if base < 2:
            raise ValueError("base must be >= 2")
        return cls(base, 0, ())

    @classmethod
    def from_power(cls, base: int, e: int) -> "Numeral":
        """``base**(-e)``."""
        if base < 2:
            raise ValueError("base must be >= 2")
        return cls(base, 1, ((e, e, 1),))

    @classmethod
    def from_int(cls, n: int, base: int) -> "Numeral":
        if base < 2:
            raise ValueError("base must be >= 2")
        sign = (n > 0) - (n < 0)
        n = abs(n)
        runs = []
        if base == 2:
            # jump over runs of set bits instead of peeling one digit at a time
            pos = 0
            while n:
                low = (n & -n).bit_length() - 1
                n >>= low
                pos += low
                width = (~n & (n + 1)).bit_length() - 1
                runs.append((-(pos + width - 1), -pos, 1))
                n >>= width
                pos += width
            return cls.make(base, sign, runs)
        e = 0
        while n:
            n, d = divmod(n, base)
            if d:
                if runs and runs[-1][2] == d and runs[-1][0] == e + 1:
                    runs[-1] = (e, runs[-1][1], d)
                else:
                    runs.append((e, e, d))
            e -= 1
        return cls.make(base, sign, runs)

    @classmethod
    def from_fraction(cls, q, base: int) -> "Numeral":
        """Exact conversion; the denominator must divide a power of ``base``."""
        q = Fraction(q)
        den = q.denominator
        k = 0
        scale = 1
        while scale % den:
            scale *= base
            k += 1
            if k > 4 * den.bit_length() + 8:
                raise ValueError(f"{q} has no finite base-{base} expansion")
        return cls.from_int(q.numerator * (scale // den), base).shift(k)

    # -- basic queries ----------------------------------------------------

    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def lead_exponent(self) -> int:
        """Exponent of the most significant nonzero digit."""
        if not self.runs:
            raise ValueError("zero has no leading exponent")
        return self.runs[0][0]

    @property
    def tail_exponent(self) -> int:
        if not self.runs:
            raise ValueError("zero has no trailing exponent")
        return self.runs[-1][1]

    def is_power(self) -> bool:
        """True for values ``base**(-e)``."""
        return self.sign == 1 and len(self.runs) == 1 and self.runs[0][0] == self.runs[0][1] \
            and self.runs[0][2] == 1

    def _check(self, other: "Numeral") -> None:
        if not isinstance(other, Numeral):
            raise TypeError(f"expected Numeral, got {type(other).__name__}")
        if other.base != self.base:
            raise BaseMismatch(f"base {self.base} vs base {other.base}")

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "Numeral":
        return Numeral(self.base, -self.sign, self.runs)

    def __abs__(self) -> "Numeral":
        return Numeral(self.base, abs(self.sign), self.runs)

    def __add__(self, other: "Numeral") -> "Numeral":
        self._check(other)
        if other.sign == 0:
            return self
        if self.sign == 0:
            return other
        if self.sign == other.sign:
            return Numeral(self.base, self.sign, _add_mag(self.runs, other.runs, self.base))
        c = _cmp_mag(self.runs, other.runs)
        if c == 0:
            return Numeral.zero(self.base)
        if c > 0:
            return Numeral(self.base, self.sign, _sub_mag(self.runs, other.runs, self.base))
        return Numeral(self.base, other.sign, _sub_mag(other.runs, self.runs, self.base))

    def __sub__(self, other: "Numeral") -> "Numeral":
        self._check(other)
        return self + (-other)

    def shift(self, k: int) -> "Numeral":
        """Multiply by ``base**(-k)``."""
        if k == 0 or self.sign == 0:
            return self
        return Numeral(self.base, self.sign, tuple((lo + k, hi + k, d) for lo, hi, d in self.runs))

    def scale(self, n: int) -> "Numeral":
        """Exact ``n * self`` by shift-and-add over the base digits of ``n``."""
        if n == 0 or self.sign == 0:
            return Numeral.zero(self.base)
        neg = n < 0
        n = abs(n)
        acc = Numeral.zero(self.base)
        pos = 0
        while n:
            n, d = divmod(n, self.base)
            if d:
                term = self.shift(-pos)
                part = term
                for _ in range(d - 1):
                    part = part + term
                acc = acc + part
            pos += 1
        return -acc if neg else acc

    # -- ordering ---------------------------------------------------------

    def compare(self, other: "Numeral") -> int:
        self._check(other)
        if self.sign != other.sign:
            return 1 if self.sign > other.sign else -1
        if self.sign == 0:
            return 0
        return self.sign * _cmp_mag(self.runs, other.runs)

    def __lt__(self, other: "Numeral") -> bool:
        return self.compare(other) < 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Numeral):
            return NotImplemented
        return self.base == other.base and self.sign == other.sign and self.runs == other.runs

    def __hash__(self) -> int:
        return hash((self.base, self.sign, self.runs))

    # -- conversions ------------------------------------------------------

    def to_fraction(self, max_exponent: int = 1 << 16) -> Fraction:
        """Exact rational value; refuses exponents beyond ``max_exponent``."""
        if self.sign == 0:
            return Fraction(0)
        if abs(self.tail_exponent) > max_exponent or abs(self.lead_exponent) > max_exponent:
            raise OverflowError("exponent too large for a Fraction")
        total = Fraction(0)
        b = self.base
        for lo, hi, d in self.runs:
            # d * (b^-lo + ... + b^-hi)
            total += Fraction(d) * (Fraction(b) ** (-lo) - Fraction(b) ** (-hi - 1)) / (1 - Fraction(1, b))
        return self.sign * total

    def scaled_int(self, e: int) -> int:
        """The integer ``self * base**e``; needs every exponent <= e."""
        if self.sign == 0:
            return 0
        if self.tail_exponent > e:
            raise ValueError("scale too small for an exact integer")
        b = self.base
        total = 0
        for lo, hi, d in self.runs:
            n = hi - lo + 1
            total += d * (b ** (e - hi)) * (b ** n - 1) // (b - 1)
        return self.sign * total

    @classmethod
    def from_scaled_int(cls, n: int, base: int, e: int) -> "Numeral":
        return cls.from_int(n, base).shift(e)

    def approx(self) -> str:
        """Approximate decimal rendering; never used for decisions."""
        if self.sign == 0:
            return "0"
        lead = self.lead_exponent
        digits = len(str(abs(lead)))
        if digits > 15:
            return f"≈{'-' if self.sign < 0 else ''}{self.base}^-{lead} [exponent has {digits} digits]"
        log10 = -lead * math.log10(self.base)
        # mantissa from the leading few positions only
        m = 0.0
        for lo, hi, d in self.runs:
            if lo - lead > 20:
                break
            for e in range(lo, min(hi, lead + 20) + 1):
                m += d * self.base ** (lead - e)
        log10 += math.log10(m)
        expo = math.floor(log10)
        mant = 10 ** (log10 - expo)
        return f"≈{'-' if self.sign < 0 else ''}{mant:.6g}e{expo}"

    def __repr__(self) -> str:
        return f"Numeral(base={self.base}, sign={self.sign}, runs={list(self.runs)})"

    def __str__(self) -> str:
        return self.approx()

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "sign": self.sign,
            "runs": [{"lo": str(lo), "hi": str(hi), "digit": d} for lo, hi, d in self.runs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Numeral":
        runs = [(int(r["lo"]), int(r["hi"]), int(r["digit"])) for r in data["runs"]]
        num = cls.make(int(data["base"]), int(data["sign"]), runs)
        if num.sign != int(data["sign"]):
            raise ValueError("sign inconsistent with runs")
        return num


def from_power(base: int, e: int) -> Numeral:
    return Numeral.from_power(base, e)


def add_signed(a: Numeral, b: Numeral) -> Numeral:
    return a + b


def compare(a: Numeral, b: Numeral) -> int:
    return a.compare(b)


def scale_small(n: int, a: Numeral) -> Numeral:
    if n < 0:
        raise ValueError("multiplier must be >= 0")
    return a.scale(n)
