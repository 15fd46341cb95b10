"""Adversary strategies: chains of construction nodes that a given cover misses.

A chain is a strictly nested list of construction intervals.  Node ``t``
carries a bound ``bound(t)`` and must be disjoint from every budget interval
with index ``< bound(t)``; bounds increase strictly.  When the last node is
disjoint from every placed budget the chain is conclusive: that construction
interval is entirely uncovered.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .budgets import BudgetList, EpsilonSpec, nano, shift_family
from .constructions.nano import (
    AMBIENT,
    NanoScheme,
    nano_f,
    nano_S,
    nano_stage,
)
from .constructions.pico import HorizonExceeded, PicoScheme, h_of, node_exponent
from .constructions.spacing import BASE, SpacingScheme, fact, placement_exponent, scaffold_length
from .cover import CoverProblem, greedy_cover, solve_feasible
from .intervals import Interval, IntervalSet, max_hit_count, normalize_union
from .numerals import Numeral

MAX_NANO_DEPTH = 4
# a child of I_k has index >= 2^(k+1); refuse to build indices wider than this
MAX_INDEX_BITS = 1 << 24


class HypothesisViolation(ValueError):
    pass


class IndexHorizon(OverflowError):
    pass


@dataclass(frozen=True)
class ChainNode:
    label: Any
    interval: Interval
    exact: bool
    bound: int

    def to_json(self) -> dict:
        lab = [str(x) for x in self.label] if isinstance(self.label, tuple) else str(self.label)
        return {"label": lab, "interval": self.interval.to_json(), "exact": self.exact, "bound": str(self.bound)}


@dataclass(frozen=True)
class ChainWitness:
    kind: str
    status: str  # "found" | "inconclusive"
    nodes: tuple = ()
    budgets: tuple = ()  # (index, Interval) pairs the chain was built against
    log: tuple = ()

    @property
    def found(self) -> bool:
        return self.status == "found"

    @property
    def conclusive(self) -> bool:
        if not self.found or not self.nodes:
            return False
        last = self.nodes[-1].interval
        return all(not last.intersects(iv) for _, iv in self.budgets)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "status": self.status,
            "conclusive": self.conclusive,
            "nodes": [n.to_json() for n in self.nodes],
            "budgets": [{"index": i, "interval": iv.to_json()} for i, iv in self.budgets],
            "log": list(self.log),
        }


def verify_chain(w: ChainWitness) -> tuple[bool, list[str]]:
    """Re-check nesting, disjointness and the bound schedule from scratch."""
    problems = []
    nodes = w.nodes
    for a, b in zip(nodes, nodes[1:]):
        if not a.interval.contains(b.interval):
            problems.append(f"{b.label} not inside {a.label}")
        if a.interval == b.interval:
            problems.append(f"{b.label} equals its parent")
        if not a.bound < b.bound:
            problems.append(f"bound does not increase at {b.label}")
    for n in nodes:
        for i, iv in w.budgets:
            if i < n.bound and n.interval.intersects(iv):
                problems.append(f"node {n.label} meets budget {i}")
    return not problems, problems


# --- nano -------------------------------------------------------------------
def nano_budget(k: int) -> Numeral:
    """``(1/4)^(2^k) = 2^-(2^(k+1))``."""
    return Numeral.from_power(2, 1 << (k + 1))


def _hit_range(sch: NanoScheme, j: int, J: Interval):
    """Children ``t`` of ``I_j`` (hull-wise) meeting ``J``, as a closed range."""
    kids = sch.children(j)
    c = kids.stop - kids.start

    def hull(t):
        return sch.hull(kids.start + t)[0]

    lo, hi = 0, c  # first t with hull.hi >= J.lo
    while lo < hi:
        mid = (lo + hi) // 2
        if hull(mid).hi < J.lo:
            lo = mid + 1
        else:
            hi = mid
    first = lo
    lo, hi = -1, c - 1  # last t with hull.lo <= J.hi
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if hull(mid).lo <= J.hi:
            lo = mid
        else:
            hi = mid - 1
    last = lo
    return (first, last) if first <= last else None


def nano_witness_chain(sch: NanoScheme, placed, depth: int) -> ChainWitness:
    """Chain ``K_0 ⊃ ... ⊃ K_depth`` with ``K_n`` disjoint from ``J_i``, ``i < f(K_n)``."""
    placed = dict(placed)
    if not 0 <= depth <= MAX_NANO_DEPTH:
        raise ValueError(f"depth must lie in 0..{MAX_NANO_DEPTH}")
    for i, iv in placed.items():
        if i < 0 or i > 1 << 20:
            raise HypothesisViolation(f"budget index {i} out of range")
        if nano_budget(i) < iv.length:
            raise HypothesisViolation(f"|J_{i}| exceeds (1/4)^(2^{i})")
    nodes = []
    log = []
    parent = AMBIENT
    lower = 0  # budgets below this index already miss the parent
    for level in range(depth + 1):
        if parent != AMBIENT and parent + 1 > MAX_INDEX_BITS:
            raise IndexHorizon(f"children of I_{parent} have indices wider than {MAX_INDEX_BITS} bits")
        kids = sch.children(parent)
        upper = nano_f(kids.start)  # every child has the same f
        threats = sorted(i for i in placed if lower <= i < upper)
        hits = []
        per_budget = {}
        for i in threats:
            r = _hit_range(sch, parent, placed[i])
            if r is not None:
                hits.append(r)
                per_budget[i] = r[1] - r[0] + 1
        hits.sort()
        blocked = 0
        cursor = -1
        choice = None
        for a, b in hits:
            if choice is None and a > cursor + 1:
                choice = cursor + 1
            a = max(a, cursor + 1)
            if b >= a:
                blocked += b - a + 1
            cursor = max(cursor, b)
        if choice is None:
            choice = cursor + 1
        survivors = (kids.stop - kids.start) - blocked
        need = 1 if parent == AMBIENT else nano_f(parent)
        if survivors < need:
            raise AssertionError(f"only {survivors} survivors under {parent}, expected >= {need}")
        if choice >= kids.stop - kids.start:
            raise AssertionError("no surviving child")
        k = kids.start + choice
        iv, exact = sch.hull(k)
        nodes.append(ChainNode(k, iv, exact, upper))
        log.append({"level": level, "parent": str(parent), "threats": len(threats),
                    "children_hit": blocked, "survivors": str(survivors), "guarantee": str(need),
                    "max_hits_per_budget": max(per_budget.values(), default=0), "chosen": str(k)})
        parent = k
        lower = upper
    w = ChainWitness("nano", "found", tuple(nodes), tuple(sorted(placed.items())), tuple(log))
    ok, bad = verify_chain(w)
    if not ok:
        raise AssertionError("; ".join(bad))
    return w


def random_lazy_chain(rng: random.Random, depth: int = 4, spread: int = 4) -> tuple[list[int], int]:
    """A random root path ``K_0 ⊃ ... ⊃ K_depth`` with small child offsets.

    Returns the expanded nodes ``K_0 .. K_(depth-1)`` and the offset of
    ``K_depth`` among the children of ``K_(depth-1)``.  The last index
    (about ``2^(K_(depth-1)+1)``) is left implicit because at depth 4 it is
    far too wide to write down.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    def offset(j):  # I_j has 2^(j+1) children
        return rng.randrange(spread if j + 1 >= spread.bit_length() else min(spread, 1 << (j + 1)))

    k = rng.randrange(2)
    path = [k]
    for _ in range(depth - 1):
        k = (1 << (k + 1)) + offset(k)
        path.append(k)
    return path, offset(k)


# --- candidate nano covers ------------------------------------------------------
def nano_budget_list(count: int = 16) -> BudgetList:
    return BudgetList(tuple(nano_budget(k) for k in range(count)))


def nano_candidates(sch: NanoScheme, seed: int, trials: int, count: int = 16, dp_budgets: int = 10):
    """Candidate covers of nano stage sets: exact DP placements of random sub-targets,
    greedy attempts on whole stages, and seeded random completions."""
    rng = random.Random(seed)
    stages = {d: nano_stage(sch, d)[0] for d in (0, 1, 2)}
    budgets = nano_budget_list(count)
    out = []
    for trial in range(trials):
        d = rng.choice((0, 1, 1, 2))
        comps = list(stages[d].parts)
        how = trial % 3
        if how == 0:
            verdict = greedy_cover(CoverProblem(stages[d], budgets))
            placement = dict(verdict.placement)
            origin = f"greedy stage {d}"
        else:
            size = rng.randint(1, min(6, len(comps)))
            sub = normalize_union(rng.sample(comps, size))
            head = BudgetList(budgets.lengths[:dp_budgets])
            verdict = solve_feasible(CoverProblem(sub, head))
            if not verdict.feasible:
                verdict = greedy_cover(CoverProblem(sub, head))
            placement = dict(verdict.placement)
            origin = f"dp sub-target of stage {d} ({size} parts, feasible={verdict.feasible})"
        for i in range(count):
            if i in placement:
                continue
            anchor = rng.choice(comps)
            lo = anchor.lo if rng.random() < 0.5 else anchor.hi - budgets.lengths[i]
            if rng.random() < 0.2:
                lo = Numeral.from_fraction(Fraction(rng.randrange(1 << 12), 1 << 12), 2)
            placement[i] = Interval.at(lo, budgets.lengths[i])
        out.append({"seed": seed, "trial": trial, "origin": origin, "placement": placement})
    return out


# --- pico -----------------------------------------------------------------------
def pico_budget(k: int) -> Numeral:
    return Numeral.from_power(BASE, fact(k + 1))


def pico_candidates(sch: PicoScheme, N: int, seed: int, trials: int, count: int = 8):
    """Seeded covers with ``J_N`` withheld, anchored at construction intervals."""
    rng = random.Random(seed)
    pool = [sch.interval(nd) for nd in sch.initial_nodes()]
    for nd in [(1, 0), (2, 0), (0, 0)]:
        for b in sch.blocks(nd):
            for ch in sch.children(nd, b)[:12]:
                pool.append(sch.interval(ch))
    span = Numeral.from_int(2 * len(pool), BASE).shift(1)
    out = []
    for trial in range(trials):
        placement = {}
        for k in range(count):
            if k == N:
                continue
            length = pico_budget(k)
            r = rng.random()
            if r < 0.75:
                lo = rng.choice(pool).lo
            else:
                lo = Numeral.from_fraction(Fraction(rng.randrange(13**3), 13**3), BASE)
                lo = lo if lo < span else Numeral.zero(BASE)
            placement[k] = Interval.at(lo, length)
        out.append({"seed": seed, "trial": trial, "N": N, "placement": placement})
    return out


def pico_witness_chain(sch: PicoScheme, placed, N: int, depth: int = 1) -> ChainWitness:
    """Chain ``I^(i_0)_(j_0) ⊃ ...`` each disjoint from ``J_k`` for ``k <= j_t``."""
    placed = dict(placed)
    if N in placed:
        raise HypothesisViolation(f"index {N} must be withheld")
    for k, iv in placed.items():
        if k < 0:
            raise HypothesisViolation("negative budget index")
        if pico_budget(k) < iv.length:
            raise HypothesisViolation(f"|J_{k}| exceeds 13^-(({k}+1)!)")
    if N >= sch.rows:
        raise HorizonExceeded(f"row {N} beyond the row horizon")
    log = []

    def meets(node_iv, upto):
        return any(k <= upto and node_iv.intersects(iv) for k, iv in placed.items())

    # initial survivors in row N
    row = [(N, k) for k in range(h_of(N))]
    row_iv = {nd: sch.interval(nd) for nd in row}
    early = [k for k in placed if k <= N]
    for k in early:
        hit = sum(1 for nd in row if row_iv[nd].intersects(placed[k]))
        if hit > 1:
            raise AssertionError(f"J_{k} meets {hit} initial intervals of row {N}")
    survivors = [nd for nd in row if not any(row_iv[nd].intersects(placed[k]) for k in early)]
    if len(survivors) < h_of(N) - N:
        raise AssertionError("fewer initial survivors than the pigeonhole bound")
    log.append({"step": "initial", "row": N, "survivors": len(survivors), "guarantee": h_of(N) - N})

    horizon_hit = [False]

    def descend(node, t):
        iv = sch.interval(node)
        if t == depth:
            return [node] if not meets(iv, math.inf) else None
        try:
            m = sch.g(node)
            blocks = sch.blocks(node)
        except HorizonExceeded:
            horizon_hit[0] = True
            return None
        if m >= sch.M or not blocks:
            horizon_hit[0] = True
            return None
        for b in blocks:
            kids = sch.children(node, b)
            kid_iv = [sch.interval(ch) for ch in kids]
            final = t + 1 == depth
            alive = [ch for ch, civ in zip(kids, kid_iv) if not meets(civ, math.inf if final else ch[1])]
            hit = len(kids) - len(alive)
            bound = sum(max_hit_count(kid_iv, placed[k].length) for k in placed)
            if hit > bound:
                raise AssertionError("children hit exceed the per-budget hit bound")
            star = sum(1 for k in range(4**b, 4 ** (b + 1)) if k in placed and placed[k].intersects(iv))
            log.append({"step": t, "node": list(node), "block": b, "children": len(kids), "hit": hit,
                        "hit_bound": bound, "one_third_ok": 3 * hit < len(kids),
                        "budgets_in_block_meeting_node": star, "one_half_of_block": star * 2 > len(kids)})
            for ch in alive:
                rest = descend(ch, t + 1)
                if rest is not None:
                    return [node] + rest
        return None

    starts = survivors + [nd for nd in sch.initial_nodes() if nd[0] != N]
    chain = None
    for nd in starts:
        if meets(sch.interval(nd), nd[1]):
            continue
        chain = descend(nd, 0)
        if chain is not None:
            break
    budgets = tuple(sorted(placed.items()))
    if chain is None:
        log.append({"step": "result", "horizon_exhausted": horizon_hit[0]})
        return ChainWitness("pico", "inconclusive", (), budgets, tuple(log))
    nodes = tuple(ChainNode(nd, sch.interval(nd), True, nd[1] + 1) for nd in chain)
    w = ChainWitness("pico", "found", nodes, budgets, tuple(log))
    ok, bad = verify_chain(w)
    if not ok:
        raise AssertionError("; ".join(bad))
    return w


def point_control(N: int, count: int = 8, unbanned: bool = False) -> dict:
    """Is ``x = -1`` covered by a cover whose only interval near ``-1`` is ``J_N``?"""
    x = Numeral.from_int(-1, BASE)
    placement = {}
    for k in range(count):
        if k == N and not unbanned:
            continue
        lo = x if k == N else Numeral.from_int(1 + k, BASE)
        placement[k] = Interval.at(lo, pico_budget(k))
    covered = any(iv.contains_point(x) for iv in placement.values())
    return {"N": N, "unbanned": unbanned, "x_covered": covered}


# --- spacing conditions ---------------------------------------------------------
def spacing_condition_check(sch: SpacingScheme, placements: dict | None = None) -> dict:
    """Exact checks of conditions (i)-(iii); failures are reported, not raised."""
    pl = sch.placements() if placements is None else dict(placements)
    ks = sorted(pl)
    cond_i = all(pl[k].length == Numeral.from_power(BASE, placement_exponent(sch.m, k)) for k in ks)
    bad_ii = []
    for a, n in enumerate(ks):
        need = scaffold_length(n)
        for k in ks[a + 1:]:
            if pl[n].distance(pl[k]) < need:
                bad_ii.append([n, k])
    per_b = []
    for b in sorted(sch.B):
        fam = [pl[k] for k in range(4**b, 4 ** (b + 1)) if k in pl]
        size = 4 ** (b + 1) - 4**b
        hits = [max_hit_count(fam, scaffold_length(k)) for k in range(sch.L, 4**b)]
        total = sum(hits)
        greedy = _greedy_adversary(fam, sch.L, 4**b)
        per_b.append({
            "b": b,
            "F_size": size,
            "hit_total": total,
            "hits_by_index": hits,
            "strict_one_third": 3 * total < size,
            "distinct_hits_greedy_cover": greedy,
            "not_more_than_one_third": 3 * greedy <= size,
        })
    cond_iii = all(r["strict_one_third"] for r in per_b)
    return {
        "m": sch.m,
        "L": sch.L,
        "B": sorted(sch.B),
        "i": cond_i,
        "ii": not bad_ii,
        "ii_violations": bad_ii[:10],
        "iii": cond_iii,
        "iii_detail": per_b,
        "ok": cond_i and not bad_ii and cond_iii,
    }


MUTATIONS = ("grow", "squeeze", "cluster")


def mutate_spacing(sch: SpacingScheme, kind: str) -> dict:
    """Placements of ``sch`` with one condition deliberately broken.

    ``grow`` lengthens one interval (i); ``squeeze`` moves the second interval
    next to the first (ii); ``cluster`` packs a whole ``F({b})`` block inside
    one ``13^-((L+1)!)`` window (iii).
    """
    pl = sch.placements()
    ks = sorted(pl)
    if not ks:
        raise ValueError("nothing to mutate")
    if kind == "grow":
        k = ks[0]
        pl[k] = Interval.at(pl[k].lo, pl[k].length + pl[k].length)
    elif kind == "squeeze":
        a, k = ks[0], ks[1]
        pl[k] = Interval.at(pl[a].hi + pl[k].length, pl[k].length)
    elif kind == "cluster":
        b = min(sch.B)
        block = [k for k in ks if 4**b <= k < 4 ** (b + 1)]
        lo = pl[block[0]].lo
        step = pl[block[0]].length + pl[block[0]].length
        for n, k in enumerate(block):
            pl[k] = Interval.at(lo + step.scale(n) if n else lo, pl[k].length)
    else:
        raise ValueError(f"mutation must be one of {MUTATIONS}")
    return pl


def _greedy_adversary(fam, lo_k, hi_k) -> int:
    """Distinct intervals met by a cover placing each ``J_k`` to meet the most unmet ones."""
    parts = sorted(fam, key=lambda iv: iv.lo)
    unmet = set(range(len(parts)))
    for k in range(lo_k, hi_k):
        length = scaffold_length(k)
        best = set()
        for i in range(len(parts)):
            J = Interval.at(parts[i].lo, length)
            got = {j for j in range(i, len(parts)) if parts[j].intersects(J)} & unmet
            if len(got) > len(best):
                best = got
        unmet -= best
    return len(parts) - len(unmet)


# --- demo -----------------------------------------------------------------------
def non_ideal_demo(kind: str, seed: int = 0, depth: int = 1, eps_list=(1, 2), trials: int = 6,
                   M: int = 2, N: int = 2, chain_depth: int | None = None) -> dict:
    """Report bundle: part certificates for the pieces plus defeated candidate covers."""
    from .procedures import NanoSchemeSource, decompose_m

    if kind == "nano":
        sch = NanoScheme()
        src = NanoSchemeSource(sch)
        certs = []
        if eps_list:
            dec = decompose_m(src, nano(), 2, max(eps_list) - 1)
            for j, covers in enumerate(dec.part_covers):
                for eps, cov in covers:
                    if eps.t in eps_list:
                        certs.append({"part": j, "eps": str(eps), "valid": not cov.problems(),
                                      "indices": [str(i) for i in cov.indices()]})
        cd = 3 if chain_depth is None else chain_depth
        defeats = []
        for cand in nano_candidates(sch, seed, trials):
            w = nano_witness_chain(sch, cand["placement"], cd)
            ok, _ = verify_chain(w)
            defeats.append({"trial": cand["trial"], "origin": cand["origin"], "status": w.status,
                            "verified": ok, "conclusive": w.conclusive,
                            "chain": [str(n.label) for n in w.nodes]})
        return {"kind": "nano", "seed": seed, "stage_depth": depth, "certificates": certs, "defeats": defeats}
    if kind == "pico":
        from .constructions.pico import pico_stage

        sch = PicoScheme(M=M)
        certs = []
        for t in eps_list:
            row = 0
            while fact(row + 1) < t:
                row += 1
            if row >= sch.M:
                certs.append({"eps": f"13^-{t}", "row": row, "status": "beyond horizon"})
                continue
            stage = pico_stage(sch, row)
            # |I^row_k| = 13^-((row+1)!(k+1)!) <= (13^-t)^((k+1)!)
            ok = all(Numeral.from_power(BASE, t * fact(k + 1)) >= iv.length for (_, k), iv in stage.items())
            certs.append({"eps": f"13^-{t}", "row": row, "intervals": len(stage), "valid": ok})
        cd = 1 if chain_depth is None else chain_depth
        defeats = []
        for cand in pico_candidates(sch, N, seed, trials):
            w = pico_witness_chain(sch, cand["placement"], N, cd)
            ok = verify_chain(w)[0] if w.found else False
            defeats.append({"trial": cand["trial"], "status": w.status, "verified": ok,
                            "conclusive": w.conclusive, "chain": [list(n.label) for n in w.nodes]})
        controls = [point_control(N, unbanned=False), point_control(N, unbanned=True)]
        return {"kind": "pico", "seed": seed, "M": M, "N": N, "certificates": certs,
                "defeats": defeats, "x_controls": controls}
    raise ValueError("kind must be nano or pico")
