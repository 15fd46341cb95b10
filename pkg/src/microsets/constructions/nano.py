"""The 2-nanoscopic Cantor scheme: index partitions, lengths and lazy placement.

Index k >= 2 has level ``i`` with ``k`` in ``T_i = [2^(i+1), 2^(i+2))``; the
interval ``I_k`` sits inside ``I_i`` and has length ``2^-(2^(k//2 + 1))``.
Indices 0 and 1 form ``T_-1`` and sit directly in the ambient interval.

Placement modes (child ``t`` of a parent with ``c = 2^s`` children, parent
length ``P``):

* ``spread`` (default): child at ``lo + t * P * (2^-s + 2^-2s)``.  The last
  child ends at or before the parent's end, and every sibling gap exceeds
  ``P * 2^-s``, which is what the adversary argument needs.
* ``uniform-slot``: child at ``lo + t * P * 2^-s`` (flush left in equal slots).
* ``exact-stage``: equal gaps with both end children flush to the parent ends;
  only dyadic when ``c == 2``, otherwise the parent falls back to ``spread``
  and is recorded in ``fallbacks``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from ..intervals import Interval, IntervalSet
from ..numerals import Numeral

MODES = ("spread", "uniform-slot", "exact-stage")
AMBIENT = -1  # parent marker for indices 0 and 1

# lengths 2^-(2^x) are materialized while x stays below this
MAX_LENGTH_LOG = 1 << 12


class NotInChildren(ValueError):
    pass


def nano_level(k: int) -> int:
    """The ``i`` with ``k`` in ``T_i`` (``-1`` for k in {0, 1})."""
    if k < 0:
        raise ValueError("index must be >= 0")
    return -1 if k < 2 else k.bit_length() - 2


def nano_f(k: int) -> int:
    """Bound schedule ``f(k) = 2^(i+1)`` for ``k`` in ``T_i``."""
    return 1 << (nano_level(k) + 1)


def nano_T(i: int) -> range:
    if i < -1:
        raise ValueError("level must be >= -1")
    if i == -1:
        return range(0, 2)
    return range(1 << (i + 1), 1 << (i + 2))


def nano_S(d: int) -> range:
    """``S_0 = T_-1`` and ``S_(d+1)`` is the union of ``T_j`` over ``j`` in ``S_d``.

    Each ``S_d`` is a contiguous range, so the union is again a range.
    """
    if d < 0:
        raise ValueError("depth must be >= 0")
    lo, hi = 0, 2
    for _ in range(d):
        lo, hi = 1 << (lo + 1), 1 << (hi + 1)
    return range(lo, hi)


def nano_depth(k: int) -> int:
    d = 0
    while True:
        s = nano_S(d)
        if k < s.stop:
            return d
        d += 1


def length_log(k: int) -> int:
    """``x`` with ``|I_k| = 2^-(2^x)``."""
    return k // 2 + 1


def length_exponent(k: int) -> int:
    x = length_log(k)
    if x > MAX_LENGTH_LOG:
        raise OverflowError(f"length of I_{k} has an exponent with 2^{x} bits")
    return 1 << x


def nano_length(k: int) -> Numeral:
    return Numeral.from_power(2, length_exponent(k))


def pow2_cmp(a: int, b: int, c: int) -> int:
    """Sign of ``2^a - (2^b + c)`` for ``a, b, c >= 0`` without building ``2^a``."""
    if a <= 64 and b <= 64:
        return (1 << a > (1 << b) + c) - (1 << a < (1 << b) + c)
    if a > b:
        # 2^a - 2^b >= 2^(a-1); compare with c
        if a - 1 > c.bit_length():
            return 1
        diff = (1 << a) - (1 << b) - c
        return (diff > 0) - (diff < 0)
    return 0 if a == b and c == 0 else -1


@dataclass(frozen=True)
class NodeRef:
    """Index ``k`` with its ancestor chain, root-most first, ending in ``k``."""

    index: int
    chain: tuple[int, ...]

    @classmethod
    def of(cls, k: int) -> "NodeRef":
        path = [k]
        while path[-1] >= 2:
            path.append(nano_level(path[-1]))
        return cls(k, tuple(reversed(path)))

    @property
    def parent(self) -> int:
        return self.chain[-2] if len(self.chain) > 1 else AMBIENT

    @property
    def depth(self) -> int:
        return len(self.chain) - 1

    def to_json(self) -> dict:
        return {"index": str(self.index), "path": [str(x) for x in self.chain]}

    @classmethod
    def from_json(cls, data: dict) -> "NodeRef":
        ref = cls.of(int(data["index"]))
        if [str(x) for x in ref.chain] != list(data["path"]):
            raise ValueError("index path does not match the T-tree")
        return ref


@dataclass(eq=False)
class NanoScheme:
    mode: str = "spread"
    ambient: Interval = field(default_factory=lambda: Interval.of(0, 1))
    fallbacks: set = field(default_factory=set, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown placement mode {self.mode!r}")
        if self.ambient.base != 2:
            raise ValueError("nano ambient interval must use base 2")
        if self.ambient.length < Numeral.from_int(1, 2):
            raise ValueError("ambient interval must have length >= 1")
        self._lo: dict[int, Numeral] = {}
        self._lock = threading.Lock()

    # --- geometry of one parent -------------------------------------------
    def _parent_len(self, j: int) -> Numeral:
        return self.ambient.length if j == AMBIENT else nano_length(j)

    def _parent_lo(self, j: int) -> Numeral:
        return self.ambient.lo if j == AMBIENT else self.lo(j)

    @staticmethod
    def children(j: int) -> range:
        return nano_T(j) if j != AMBIENT else nano_T(-1)

    def step(self, j: int) -> Numeral:
        """Offset between consecutive children of ``I_j``."""
        kids = self.children(j)
        s = (kids.stop - kids.start).bit_length() - 1
        P = self._parent_len(j)
        mode = self.mode
        if mode == "exact-stage":
            if kids.stop - kids.start == 2:
                return P - nano_length(kids[1])
            with self._lock:
                self.fallbacks.add(j)
            mode = "spread"
        if mode == "uniform-slot":
            return P.shift(s)
        return P.shift(s) + P.shift(2 * s)

    def offset(self, j: int, t: int) -> Numeral:
        st = self.step(j)
        if t == 0:
            return Numeral.zero(2)
        if all(lo == hi for lo, hi, _ in st.runs):
            total = Numeral.zero(2)
            for lo, _, d in st.runs:
                total = total + Numeral.from_int(t * d, 2).shift(lo)
            return total
        return st.scale(t)

    def envelope(self, j: int) -> Numeral:
        """A length bounding every child of ``I_j`` that fits before the next child."""
        kids = self.children(j)
        s = (kids.stop - kids.start).bit_length() - 1
        P = self._parent_len(j)
        return P.shift(s + 1) if self.mode == "uniform-slot" else P.shift(2 * s)

    # --- lazy node positions ----------------------------------------------
    def lo(self, k: int) -> Numeral:
        hit = self._lo.get(k)
        if hit is not None:
            return hit
        j = nano_level(k)
        par = AMBIENT if j < 0 else j
        t = k - self.children(par).start
        val = self._parent_lo(par) + self.offset(par, t)
        with self._lock:
            self._lo[k] = val
        return val

    def hull(self, k: int) -> tuple[Interval, bool]:
        """Interval of ``I_k`` and whether it is exact.

        When ``|I_k|`` is too large an exponent to materialize, the sound
        envelope ``[lo, lo + envelope(parent)]`` is returned instead.
        """
        lo = self.lo(k)
        if length_log(k) <= MAX_LENGTH_LOG:
            return Interval.at(lo, nano_length(k)), True
        par = nano_level(k)
        return Interval.at(lo, self.envelope(AMBIENT if par < 0 else par)), False

    def interval(self, k: int) -> Interval:
        iv, exact = self.hull(k)
        if not exact:
            raise OverflowError(f"I_{k} is not materializable")
        return iv

    # --- gap inequality ---------------------------------------------------
    def min_child_gap(self, j: int) -> Numeral | None:
        """Exact smallest sibling gap among the children of ``I_j``, if materializable."""
        kids = self.children(j)
        if length_log(kids.start) > MAX_LENGTH_LOG:
            return None
        return self.step(j) - nano_length(kids.start)

    def gap_inequality(self, j: int, i: int) -> bool:
        """Budget ``(1/4)^(2^i) = 2^-(2^(i+1))`` is strictly below every child gap of ``I_j``."""
        gap = self.min_child_gap(j)
        if gap is not None and i + 1 <= MAX_LENGTH_LOG:
            return Numeral.from_power(2, 1 << (i + 1)) < gap
        return self.gap_inequality_symbolic(j, i)

    def gap_inequality_symbolic(self, j: int, i: int) -> bool:
        """Sufficient exponent test valid at any size.

        For ``j >= 1`` every gap strictly exceeds ``P*2^-s`` (spread) or is at
        least ``P*2^-(s+1)`` (uniform-slot), with ``P = 2^-(2^b)``; the budget
        is ``2^-(2^a)``.  Exact-stage parents with four or more children use
        spread placement.
        """
        if j == AMBIENT or j == 0:
            gap = self.min_child_gap(j)
            return Numeral.from_power(2, 1 << (i + 1)) < gap
        s = j + 1
        b = length_log(j)
        a = i + 1
        if self.mode == "uniform-slot":
            return pow2_cmp(a, b, s + 1) > 0
        return pow2_cmp(a, b, s) >= 0


def nano_stage(sch: NanoScheme, depth: int) -> tuple[IntervalSet, tuple[int, ...]]:
    """Materialized ``X_depth`` with its index labels in position order."""
    if not 0 <= depth <= 2:
        raise ValueError("stages beyond depth 2 are not materializable")
    idx = list(nano_S(depth))
    ivs = [sch.interval(k) for k in idx]
    order = sorted(range(len(idx)), key=lambda n: ivs[n].lo)
    return IntervalSet(tuple(ivs[n] for n in order)), tuple(idx[n] for n in order)


def nano_child(sch: NanoScheme, parent: NodeRef | int, k: int) -> Interval:
    j = parent.index if isinstance(parent, NodeRef) else parent
    if k not in sch.children(j):
        raise NotInChildren(f"{k} is not a child of {j}")
    return sch.hull(k)[0]
