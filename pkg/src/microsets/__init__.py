"""Exact constructions, cover procedures and adversary strategies for
generalized microscopic sets."""

from .budgets import BudgetList, EpsilonSpec, PowerFamily, parse_family
from .cover import CoverProblem, CoverVerdict, greedy_cover, solve_feasible, validate_cover
from .intervals import Interval, IntervalSet, normalize_union
from .numerals import Numeral

__all__ = [
    "BudgetList",
    "CoverProblem",
    "CoverVerdict",
    "EpsilonSpec",
    "Interval",
    "IntervalSet",
    "Numeral",
    "PowerFamily",
    "greedy_cover",
    "normalize_union",
    "parse_family",
    "solve_feasible",
    "validate_cover",
]
__version__ = "0.1.0"
