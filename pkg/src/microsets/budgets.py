"""Budget families ``f_k(eps) = eps**e(k)`` with ``eps = base**-t``."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .numerals import Numeral


@dataclass(frozen=True)
class EpsilonSpec:
    """``eps = base**(-t)`` with ``t >= 1``."""

    base: int
    t: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if self.t < 1:
            raise ValueError("t must be >= 1 so that eps lies in (0, 1)")

    @property
    def value(self) -> Numeral:
        return Numeral.from_power(self.base, self.t)

    def to_json(self) -> dict:
        return {"base": self.base, "t": str(self.t)}

    @classmethod
    def from_json(cls, data: dict) -> "EpsilonSpec":
        return cls(int(data["base"]), int(data["t"]))

    def __str__(self) -> str:
        return f"{self.base}^-{self.t}"


@dataclass(frozen=True)
class PowerFamily:
    """Budget family with integer exponent function ``e``.

    ``convergence_horizon`` optionally records a finite K for which a partial
    sum bound was certified; nothing is inferred from it.
    """

    name: str
    exponent_fn: Callable[[int], int] = field(compare=False)
    convergence_horizon: int | None = None
    table: tuple[int, ...] | None = None

    def exponent(self, k: int) -> int:
        if k < 0:
            raise ValueError("index must be >= 0")
        e = self.exponent_fn(k)
        if e < 1:
            raise ValueError(f"{self.name}: exponent e({k}) = {e} < 1")
        return e

    def budget(self, k: int, eps: EpsilonSpec) -> Numeral:
        return budget_length(self, k, eps)

    def spec(self) -> str:
        return self.name


def _custom_fn(table: tuple[int, ...]):
    def fn(k: int) -> int:
        if k >= len(table):
            raise IndexError(f"custom family defines e(k) only for k < {len(table)}")
        return table[k]

    return fn


def micro() -> PowerFamily:
    # e(k) = k + 1: the first budget is eps, not eps**0 = 1
    return PowerFamily("micro", lambda k: k + 1)


def nano() -> PowerFamily:
    return PowerFamily("nano", lambda k: 1 << k)


def pico() -> PowerFamily:
    return PowerFamily("pico", lambda k: math.factorial(k + 1))


def hybrid(k0: int) -> PowerFamily:
    if k0 < 0:
        raise ValueError("k0 must be >= 0")
    return PowerFamily(
        f"hybrid:{k0}",
        lambda k: math.factorial(k + 1) if k < k0 else math.factorial(k + 2),
    )


def custom(exps: Sequence[int]) -> PowerFamily:
    table = tuple(int(e) for e in exps)
    if not table:
        raise ValueError("custom family needs at least one exponent")
    if any(e < 1 for e in table):
        raise ValueError("custom exponents must be >= 1")
    if any(a > b for a, b in zip(table, table[1:])):
        raise ValueError("custom exponents must be nondecreasing")
    return PowerFamily("custom", _custom_fn(table), table=table)


def parse_family(text: str, exps_json: str | None = None) -> PowerFamily:
    """Parse ``micro|nano|pico|hybrid:k0|custom``; custom reads ``{"exps": [...]}``."""
    if text == "micro":
        return micro()
    if text == "nano":
        return nano()
    if text == "pico":
        return pico()
    if text.startswith("hybrid:"):
        return hybrid(int(text.split(":", 1)[1]))
    if text == "custom":
        if exps_json is None:
            raise ValueError("custom family needs an exponent table")
        data = json.loads(exps_json) if isinstance(exps_json, str) else exps_json
        return custom([int(e) for e in data["exps"]])
    raise ValueError(f"unknown family {text!r}")


def family_to_json(fam: PowerFamily) -> dict:
    if fam.table is not None:
        return {"name": "custom", "exps": [str(e) for e in fam.table]}
    return {"name": fam.name}


def family_from_json(data: dict) -> PowerFamily:
    if data["name"] == "custom":
        return custom([int(e) for e in data["exps"]])
    if data["name"].startswith("shift:"):
        _, m, inner = data["name"].split(":", 2)
        return shift_family(family_from_json({"name": inner}), int(m))
    return parse_family(data["name"])


def budget_length(fam: PowerFamily, k: int, eps: EpsilonSpec) -> Numeral:
    return Numeral.from_power(eps.base, eps.t * fam.exponent(k))


def shift_family(fam: PowerFamily, m: int) -> PowerFamily:
    """Each budget level repeated ``m`` times: ``e'(m*k + r) = e(k)``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return fam
    inner = fam.exponent_fn
    table = None
    if fam.table is not None:
        table = tuple(e for e in fam.table for _ in range(m))
    return PowerFamily(f"shift:{m}:{fam.name}", lambda k: inner(k // m), table=table)


def partial_sum_check(fam: PowerFamily, eps: EpsilonSpec, K: int) -> tuple[Numeral, bool]:
    """Exact ``sum_{k<K} f_k(eps)`` and whether it is below 1."""
    if K < 1:
        raise ValueError("K must be >= 1")
    total = Numeral.zero(eps.base)
    for k in range(K):
        total = total + budget_length(fam, k, eps)
    return total, total < Numeral.from_int(1, eps.base)


@dataclass(frozen=True)
class BudgetList:
    """Finite list of budget lengths; banned indices are withheld (empty)."""

    lengths: tuple[Numeral, ...]
    banned: frozenset[int] = frozenset()

    def __post_init__(self):
        for x in self.lengths:
            if x.sign <= 0:
                raise ValueError("budget lengths must be positive")
        for i in self.banned:
            if not 0 <= i < len(self.lengths):
                raise ValueError(f"banned index {i} out of range")
        bases = {x.base for x in self.lengths}
        if len(bases) > 1:
            raise ValueError("budgets must share one base")

    @classmethod
    def from_family(cls, fam: PowerFamily, eps: EpsilonSpec, count: int, banned=()) -> "BudgetList":
        return cls(tuple(budget_length(fam, k, eps) for k in range(count)), frozenset(banned))

    def __len__(self) -> int:
        return len(self.lengths)

    def usable(self) -> list[int]:
        return [i for i in range(len(self.lengths)) if i not in self.banned]

    def to_json(self) -> dict:
        return {"lengths": [x.to_json() for x in self.lengths], "banned": sorted(self.banned)}

    @classmethod
    def from_json(cls, data: dict) -> "BudgetList":
        return cls(tuple(Numeral.from_json(x) for x in data["lengths"]), frozenset(data.get("banned", ())))
