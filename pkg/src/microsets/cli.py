"""Command-line front end: construct, cover, transform, witness, demo, verify.

Exit codes: 0 ok, 1 invariant failure, 2 bad input, 3 horizon-inconclusive.
Every JSON artifact is written with sorted keys so identical configurations
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .budgets import EpsilonSpec, parse_family, shift_family
from .cover import CoverProblem, counting_certificate, solve_feasible, validate_cover
from .intervals import Interval
from .numerals import Numeral

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3
RANDOMIZED = {"demo", "witness"}


class BadInput(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated run configuration; every field mirrors a flag of the same name."""

    subcommand: str
    family: str = "nano"
    exps: str | None = None
    eps_base: int = 2
    eps_t: int = 1
    scheme: str = "nano"
    depth: int = 1
    mode: str = "spread"
    m: int = 0
    B: list = field(default_factory=lambda: [1])
    M: int = 2
    N: int = 2
    k: int = 1
    op: str = "compact-shift"
    kind: str = "nano"
    eps_list: list = field(default_factory=lambda: [1, 2])
    trials: int = 4
    problem: str | None = None
    placement: str | None = None
    out: str | None = None
    format: str = "json"
    seed: int | None = None

    def validate(self) -> "RunConfig":
        if self.subcommand in RANDOMIZED and self.seed is None and not (
            self.subcommand == "witness" and self.placement
        ):
            raise BadInput(f"{self.subcommand} needs --seed")
        if self.format not in ("json", "tsv"):
            raise BadInput("format must be json or tsv")
        if self.depth < 0 or self.trials < 0:
            raise BadInput("depth and trials must be >= 0")
        EpsilonSpec(self.eps_base, self.eps_t)
        return self


# --- serialization helpers -----------------------------------------------------
def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(x):
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _load(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadInput(f"cannot read {path}: {exc}") from exc


def _tsv(rows, header) -> str:
    lines = ["\t".join(header)] + ["\t".join(str(c) for c in r) for r in rows]
    return "\n".join(lines) + "\n"


def _exp_of(iv: Interval) -> str:
    """Exponent e with ``|iv| = base^-e`` for powers, else an approximation tag."""
    length = iv.length
    return str(length.lead_exponent) if length.is_power else "~" + length.approx()


# --- subcommands -----------------------------------------------------------------
def cmd_construct(cfg: RunConfig):
    from .constructions import NanoScheme, PicoScheme, nano_stage, pico_stage, spacing_place

    if cfg.scheme == "nano":
        if cfg.depth > 2:
            raise BadInput("nano stages beyond depth 2 are not materializable")
        sch = NanoScheme(mode=cfg.mode)
        s, labels = nano_stage(sch, cfg.depth)
        rows = [(str(k), _exp_of(sch.interval(k))) for k in labels]
        doc = {"scheme": "nano", "mode": cfg.mode, "depth": cfg.depth, "stage": s, "labels": [str(k) for k in labels]}
    elif cfg.scheme == "pico":
        sch = PicoScheme(M=cfg.M)
        st = pico_stage(sch, cfg.m)
        rows = [(f"{n},{k}", _exp_of(iv)) for (n, k), iv in sorted(st.items())]
        doc = {"scheme": "pico", "M": cfg.M, "row": cfg.m, "partition": sch.partition_report(),
               "intervals": [{"node": [n, k], "interval": iv} for (n, k), iv in sorted(st.items())]}
    elif cfg.scheme == "spacing":
        sch = spacing_place(cfg.m, Interval.of(0, 1, 13), set(cfg.B))
        rows = [(str(k), _exp_of(iv)) for k, iv in sch.placements().items()]
        doc = sch.to_json()
    else:
        raise BadInput(f"unknown scheme {cfg.scheme!r}")
    if cfg.format == "tsv":
        return EXIT_OK, _tsv(rows, ("index", "exponent"))
    return EXIT_OK, dumps(doc)


def cmd_cover(cfg: RunConfig):
    if not cfg.problem:
        raise BadInput("cover needs --problem")
    try:
        p = CoverProblem.from_json(_load(cfg.problem))
    except (KeyError, TypeError) as exc:
        raise BadInput(f"malformed problem: {exc}") from exc
    verdict = solve_feasible(p)
    cert = counting_certificate(p)
    if verdict.feasible:
        ok, bad = validate_cover(p.target, p.budgets, verdict.placement)
        if not ok or cert is not None:
            return EXIT_INVARIANT, dumps({"verdict": verdict, "problems": bad, "counting": cert})
    return EXIT_OK, dumps({"verdict": verdict, "counting": _cert(cert)})


def _cert(cert):
    if cert is None:
        return None
    return {k: (v.to_json() if isinstance(v, Numeral) else v) for k, v in cert.items()}


def cmd_transform(cfg: RunConfig):
    from . import procedures as P

    eps = EpsilonSpec(cfg.eps_base, cfg.eps_t)
    fam = shift_family(parse_family(cfg.family, cfg.exps), 2)
    src = P.NanoSchemeSource()
    if cfg.op == "compact-shift":
        doc = P.compact_shift(src, fam, cfg.k, eps)
    elif cfg.op == "sigma-union":
        pts = [P.PointSource.of([Fraction(3 + i, 1)]) for i in range(2)]
        doc = P.sigma_union_cover([src] + pts, fam, eps)
    elif cfg.op == "decompose":
        doc = P.decompose_m(src, parse_family(cfg.family, cfg.exps), 2, cfg.depth)
    elif cfg.op == "null-table":
        doc = P.null_to_family(P.NullCoverInput.parametric(12, 4))
    else:
        raise BadInput(f"unknown transform {cfg.op!r}")
    return EXIT_OK, dumps(doc)


def _read_placement(path: str) -> dict:
    data = _load(path)
    try:
        return {int(e["index"]): Interval.from_json(e["interval"]) for e in data["placement"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise BadInput(f"malformed placement: {exc}") from exc


def cmd_witness(cfg: RunConfig):
    from . import witnesses as W
    from .constructions import NanoScheme, PicoScheme

    out = []
    if cfg.kind == "nano":
        sch = NanoScheme(mode=cfg.mode)
        cands = ([{"trial": 0, "placement": _read_placement(cfg.placement)}] if cfg.placement
                 else W.nano_candidates(sch, cfg.seed, cfg.trials))
        for c in cands:
            w = W.nano_witness_chain(sch, c["placement"], cfg.depth)
            out.append(w)
    elif cfg.kind == "pico":
        sch = PicoScheme(M=cfg.M)
        cands = ([{"trial": 0, "placement": _read_placement(cfg.placement)}] if cfg.placement
                 else W.pico_candidates(sch, cfg.N, cfg.seed, cfg.trials))
        for c in cands:
            out.append(W.pico_witness_chain(sch, c["placement"], cfg.N, cfg.depth))
    else:
        raise BadInput("kind must be nano or pico")
    doc = {"kind": cfg.kind, "seed": cfg.seed, "witnesses": out,
           "verified": [W.verify_chain(w)[0] for w in out if w.found]}
    if not all(doc["verified"]):
        return EXIT_INVARIANT, dumps(doc)
    if any(not w.found for w in out):
        return EXIT_INCONCLUSIVE, dumps(doc)
    return EXIT_OK, dumps(doc)


def cmd_demo(cfg: RunConfig):
    from .witnesses import non_ideal_demo

    rep = non_ideal_demo(cfg.kind, seed=cfg.seed, depth=cfg.depth, eps_list=tuple(cfg.eps_list),
                         trials=cfg.trials, M=cfg.M, N=cfg.N)
    statuses = [d["status"] for d in rep["defeats"]]
    if cfg.format == "tsv":
        rows = [(d["trial"], d["status"], d["verified"]) for d in rep["defeats"]]
        text = _tsv(rows, ("trial", "status", "verified"))
    else:
        text = dumps(rep)
    if not all(d["verified"] for d in rep["defeats"] if d["status"] == "found"):
        return EXIT_INVARIANT, text
    if not all(c.get("valid", True) for c in rep["certificates"]):
        return EXIT_INVARIANT, text
    if "inconclusive" in statuses:
        return EXIT_INCONCLUSIVE, text
    return EXIT_OK, text


def cmd_verify(cfg: RunConfig):
    from .invariants import run_suite

    rows = run_suite(seed=0 if cfg.seed is None else cfg.seed)
    if cfg.format == "tsv":
        text = _tsv([(name, "PASS" if ok else "FAIL", detail) for name, ok, detail in rows],
                    ("check", "result", "detail"))
    else:
        text = dumps([{"check": n, "pass": ok, "detail": d} for n, ok, d in rows])
    return (EXIT_OK if all(ok for _, ok, _ in rows) else EXIT_INVARIANT), text


COMMANDS = {
    "construct": cmd_construct,
    "cover": cmd_cover,
    "transform": cmd_transform,
    "witness": cmd_witness,
    "demo": cmd_demo,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="microsets", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file whose keys mirror the flags")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--family", help="micro|nano|pico|hybrid:k0|custom")
        p.add_argument("--exps", help='custom exponent table, e.g. {"exps": ["1","2","6"]}')
        p.add_argument("--eps-base", type=int, dest="eps_base")
        p.add_argument("--eps-t", type=int, dest="eps_t")
        p.add_argument("--scheme", choices=("nano", "pico", "spacing"))
        p.add_argument("--depth", type=int)
        p.add_argument("--mode", choices=("spread", "uniform-slot", "exact-stage"))
        p.add_argument("--m", type=int)
        p.add_argument("--B", type=int, nargs="*")
        p.add_argument("--M", type=int)
        p.add_argument("--N", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--op", choices=("compact-shift", "sigma-union", "decompose", "null-table"))
        p.add_argument("--kind", choices=("nano", "pico"))
        p.add_argument("--eps-list", type=int, nargs="*", dest="eps_list")
        p.add_argument("--trials", type=int)
        p.add_argument("--problem")
        p.add_argument("--placement")
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "tsv"))
        p.add_argument("--seed", type=int)
    return ap


def make_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        values.update(_load(args.config))
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            values[k] = v
    try:
        return RunConfig(**values).validate()
    except TypeError as exc:
        raise BadInput(f"bad configuration: {exc}") from exc


def run(cfg: RunConfig) -> tuple[int, str]:
    from .constructions.pico import HorizonExceeded
    from .witnesses import HypothesisViolation, IndexHorizon

    try:
        return COMMANDS[cfg.subcommand](cfg)
    except (HorizonExceeded, IndexHorizon) as exc:
        return EXIT_INCONCLUSIVE, dumps({"status": "inconclusive", "reason": str(exc)})
    except AssertionError as exc:
        return EXIT_INVARIANT, dumps({"status": "invariant failure", "reason": str(exc)})
    except (BadInput, HypothesisViolation, ValueError, KeyError) as exc:
        return EXIT_INPUT, dumps({"status": "bad input", "reason": str(exc)})


def main(argv=None) -> int:
    try:
        cfg = make_config(argv)
    except (BadInput, ValueError) as exc:
        sys.stderr.write(f"microsets: {exc}\n")
        return EXIT_INPUT
    code, text = run(cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
