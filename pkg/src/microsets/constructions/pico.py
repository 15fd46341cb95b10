"""The base-13 scheme ``I^n_k`` behind the point-addition counterexample.

Rows ``n`` have budgets ``eps_n = 13^-((n+1)!)`` and ``|I^n_k| = eps_n^((k+1)!)``.
Initial intervals (``k < h(n)``, ``h(n) = 4^(k_n)`` with ``k_n`` least such that
``4^(k_n) > (n+1)!``) sit at ``idx * 2/13`` in row-major order over rows
``n < rows``.  Every other node ``I^m_j`` (``j >= h(m)``) is placed by the
spacing scaffold in the host cell of step ``m`` that owns ``b = floor(log4 j)``.

Partition of ``{b >= k_m}`` among the cells of step ``m``: with ``p_m`` the
``m``-th prime and ``r = b - k_m``, the natural owner of ``b`` is the cell of
rank ``v_(p_m)(r + 1)`` in the canonical cell order.  Distinct primes make any
two cells of different steps meet in an infinite set; an index below its
natural owner's length threshold goes to the lowest-ranked cell admitting it.

The scheme is finite through two horizons: steps ``m < M`` and blocks
``b <= b_max``.  Nodes outside them raise :class:`HorizonExceeded`.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

from ..intervals import Interval
from ..numerals import Numeral
from .spacing import BASE, SpacingScheme, host_admits

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
X_POINT = -1


class HorizonExceeded(LookupError):
    pass


def k_of(n: int) -> int:
    f = math.factorial(n + 1)
    k = 0
    while 4**k <= f:
        k += 1
    return k


def h_of(n: int) -> int:
    return 4 ** k_of(n)


def floor_log4(j: int) -> int:
    return (j.bit_length() - 1) // 2


def valuation(x: int, p: int) -> int:
    a = 0
    while x % p == 0:
        x //= p
        a += 1
    return a


def node_exponent(n: int, k: int) -> int:
    return math.factorial(n + 1) * math.factorial(k + 1)


def node_length(n: int, k: int) -> Numeral:
    return Numeral.from_power(BASE, node_exponent(n, k))


@dataclass(eq=False)
class PicoScheme:
    M: int = 2
    b_max: int = 4
    rows: int = 5

    def __post_init__(self):
        if not 1 <= self.M <= len(PRIMES):
            raise ValueError(f"step horizon must lie in 1..{len(PRIMES)}")
        if self.b_max < 1 or self.rows < 1:
            raise ValueError("horizons must be positive")
        self._lock = threading.Lock()
        self._cells: dict[int, list] = {}
        self._owner: dict[tuple[int, int], tuple[int, int]] = {}
        self._root: dict[tuple[int, int], tuple[int, int]] = {}
        self._spacing: dict[tuple[int, int], SpacingScheme] = {}
        self._iv: dict[tuple[int, int], Interval] = {}

    # --- initial intervals ------------------------------------------------
    def initial_rank(self, n: int, k: int) -> int:
        if not (0 <= n < self.rows and 0 <= k < h_of(n)):
            raise HorizonExceeded(f"({n},{k}) is not an initial interval within the row horizon")
        return sum(h_of(r) for r in range(n)) + k

    def initial_nodes(self):
        for n in range(self.rows):
            for k in range(h_of(n)):
                yield (n, k)

    def is_initial(self, node) -> bool:
        n, k = node
        return k < h_of(n)

    # --- structure ----------------------------------------------------------
    def root(self, node) -> tuple[int, int]:
        """The initial interval containing ``node``."""
        if self.is_initial(node):
            return node
        hit = self._root.get(node)
        if hit is None:
            hit = self.root(self.host(node))
            with self._lock:
                self._root[node] = hit
        return hit

    def host(self, node) -> tuple[int, int]:
        i, j = node
        if self.is_initial(node):
            raise ValueError("initial intervals have no host")
        return self.owner(i, floor_log4(j))

    def g(self, node) -> int:
        """Step at which ``node`` is a cell, i.e. the row of its direct children."""
        i, _ = node
        n = self.root(node)[0]
        if i == n:
            return 0 if n != 0 else 1
        if i == n - 1:
            return n + 1
        return i + 1

    def is_cell(self, m: int, node) -> bool:
        i, k = node
        if m == 0:
            return i > 0 and k < h_of(i)
        if m == 1:
            return i == 0 and self.root(node)[0] != 1
        if i == m - 1:
            return k >= h_of(m - 1) and self.root(node)[0] != m
        if i == m - 2:
            return self.root(node)[0] == m - 1
        return False

    def cell(self, m: int, rank: int) -> tuple[int, int]:
        """``rank``-th cell of step ``m`` in canonical order."""
        cells = self._cells.setdefault(m, [])
        if m == 0:
            # diagonals n + k = d, within a diagonal by ascending k
            while len(cells) <= rank:
                d = sum(cells[-1]) if cells else 1
                start = cells[-1][1] + 1 if cells else 0
                found = None
                while found is None:
                    for k in range(start, d):
                        n = d - k
                        if n >= 1 and k < h_of(n):
                            found = (n, k)
                            break
                    else:
                        d, start = d + 1, 0
                if found[0] >= self.rows:
                    raise HorizonExceeded("step-0 cell beyond the row horizon")
                cells.append(found)
            return cells[rank]
        # ascending k, then the older row first
        while len(cells) <= rank:
            k, row = (cells[-1][1], cells[-1][0]) if cells else (0, m)
            while True:
                if row == m:
                    row = max(m - 2, 0)
                elif row == m - 2:
                    row = m - 1
                else:
                    k, row = k + 1, max(m - 2, 0)
                if row == m or row < 0:
                    continue
                if k >= 4 ** (self.b_max + 1):
                    raise HorizonExceeded(f"step-{m} cell rank {rank} beyond the index horizon")
                try:
                    if self.is_cell(m, (row, k)):
                        break
                except HorizonExceeded:
                    continue
            cells.append((row, k))
        return cells[rank]

    def threshold_ok(self, node, b: int) -> bool:
        return host_admits(node_length(*node), 4**b)

    def owner(self, m: int, b: int) -> tuple[int, int]:
        if m >= self.M:
            raise HorizonExceeded(f"step {m} beyond step horizon {self.M}")
        if b > self.b_max:
            raise HorizonExceeded(f"block {b} beyond index horizon {self.b_max}")
        km = k_of(m)
        if b < km:
            raise ValueError(f"block {b} is below k_{m} = {km}")
        key = (m, b)
        hit = self._owner.get(key)
        if hit is not None:
            return hit
        rank = valuation(b - km + 1, PRIMES[m])
        cell = self.cell(m, rank)
        if not self.threshold_ok(cell, b):
            r = 0
            while not self.threshold_ok(self.cell(m, r), b):
                r += 1
                if r > 64:
                    raise HorizonExceeded(f"no cell of step {m} admits block {b}")
            cell = self.cell(m, r)
        with self._lock:
            self._owner[key] = cell
        return cell

    def blocks(self, node) -> list[int]:
        """Elements of ``B(node)`` within the index horizon."""
        m = self.g(node)
        if m >= self.M:
            return []
        return [b for b in range(k_of(m), self.b_max + 1) if self.owner(m, b) == node]

    # --- geometry -----------------------------------------------------------
    def spacing(self, node) -> SpacingScheme:
        hit = self._spacing.get(node)
        if hit is None:
            hit = SpacingScheme(self.g(node), self.interval(node), frozenset(self.blocks(node)))
            with self._lock:
                self._spacing[node] = hit
        return hit

    def interval(self, node) -> Interval:
        hit = self._iv.get(node)
        if hit is not None:
            return hit
        n, k = node
        if self.is_initial(node):
            lo = Numeral.from_int(2 * self.initial_rank(n, k), BASE).shift(1)
            iv = Interval.at(lo, node_length(n, k))
        else:
            sch = self.spacing(self.host(node))
            if sch.m != n:
                raise AssertionError("host cell belongs to a different step")
            iv = sch.placement(k)
        with self._lock:
            self._iv[node] = iv
        return iv

    def children(self, node, b: int) -> list[tuple[int, int]]:
        m = self.g(node)
        if self.owner(m, b) != node:
            raise ValueError(f"block {b} is not in B{node}")
        return [(m, j) for j in range(4**b, 4 ** (b + 1))]

    def partition_report(self, steps=None, ranks: int = 3) -> dict:
        """Finite checks of the partition constraints within the horizons."""
        steps = range(self.M) if steps is None else steps
        rows = []
        ok = True
        for m in steps:
            for b in range(k_of(m), self.b_max + 1):
                c = self.owner(m, b)
                good = self.threshold_ok(c, b) and self.is_cell(m, c)
                ok &= good
                rows.append({"step": m, "block": b, "cell": list(c), "threshold_ok": good})
        meets = []
        for m1 in steps:
            for m2 in steps:
                if m1 >= m2:
                    continue
                for a1 in range(ranks):
                    for a2 in range(ranks):
                        b = _common_block(k_of(m1), a1, PRIMES[m1], k_of(m2), a2, PRIMES[m2])
                        meets.append({"steps": [m1, m2], "ranks": [a1, a2], "first_common_natural_block": b})
        return {"ok": ok, "assignments": rows, "cross_step_witnesses": meets}


def _common_block(k1, a1, p1, k2, a2, p2, limit=10**6):
    """Least ``b`` whose natural ranks are ``a1`` at step 1 and ``a2`` at step 2."""
    b = max(k1, k2)
    while b < limit:
        if valuation(b - k1 + 1, p1) == a1 and valuation(b - k2 + 1, p2) == a2:
            return b
        b += 1
    return None


def pico_stage(sch: PicoScheme, m: int, depth: int | None = None) -> dict[tuple[int, int], Interval]:
    """Row ``m`` intervals defined within the horizons (initial ones plus placements)."""
    if m >= sch.rows:
        raise HorizonExceeded(f"row {m} beyond the row horizon")
    b_top = sch.b_max if depth is None else min(depth, sch.b_max)
    out = {(m, k): sch.interval((m, k)) for k in range(h_of(m))}
    if m < sch.M:
        for b in range(k_of(m), b_top + 1):
            host = sch.owner(m, b)
            try:
                sch.interval(host)
            except HorizonExceeded:
                continue
            for j in range(4**b, 4 ** (b + 1)):
                out[(m, j)] = sch.interval((m, j))
    return out
