"""Command-line front end: check, prove, decide, transform, compare, presets.

Every command prints a human-readable summary followed by a machine block
delimited by ``---`` lines containing ``key: value`` pairs (``--json`` swaps
the block for a JSON object with the same keys).  Exit codes: 0 for
success/valid/proved, 1 for invalid/underivable/exhausted, 2 for usage or
parse errors.  Defaults may be supplied by a ``key = value`` config file
(``eqseq.toml`` in the working directory, or ``--config``).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .calculus import (
    CalculusError,
    PRESETS,
    Precedence,
    PREC_HEIGHT,
    PREC_NONE,
    RuleId,
    load_precedence_file,
    resolve_spec,
)
from .checker import Derivation, check, stats
from .parser import ParseError, parse_derivation, parse_sequent, parse_term, print_derivation, print_sequent
from .search import (
    DecidedUnderivable,
    Exhausted,
    Proved,
    SearchLimits,
    decide_function_free,
    prove,
)
from .syntax import EqSeqError
from . import transform as tf


class _UsageError(Exception):
    pass


def _load_config(path: str | None) -> dict[str, str]:
    candidates = [path] if path else ["eqseq.toml"]
    out: dict[str, str] = {}
    for cand in candidates:
        if cand and os.path.exists(cand):
            with open(cand, encoding="utf-8") as fh:
                for line in fh:
                    line = line.split("#", 1)[0].strip()
                    if not line:
                        continue
                    if "=" not in line:
                        raise _UsageError(f"malformed config line: {line!r}")
                    key, value = line.split("=", 1)
                    out[key.strip()] = value.strip().strip('"')
            break
    return out


def _emit(human: list[str], machine: dict, json_mode: bool, elapsed_ms: int) -> None:
    for line in human:
        print(line)
    machine = dict(machine)
    machine["time_ms"] = elapsed_ms
    if json_mode:
        print(json.dumps(machine, sort_keys=True))
        return
    print("---")
    for key, value in machine.items():
        if isinstance(value, dict):
            value = " ".join(f"{k}={v}" for k, v in sorted(value.items()))
        print(f"{key}: {value}")
    print("---")


def _counts(d: Derivation) -> dict[str, int]:
    return {r.value: n for r, n in stats(d).rule_counts.items()}


def _limits(args, cfg) -> SearchLimits:
    depth = args.depth if args.depth is not None else int(cfg.get("depth", 6))
    th = args.term_height if args.term_height is not None else int(cfg.get("term_height", 3))
    budget = args.budget if args.budget is not None else int(cfg.get("budget", 100_000))
    universe = None
    if getattr(args, "universe_file", None):
        with open(args.universe_file, encoding="utf-8") as fh:
            terms = [
                parse_term(line.split("#", 1)[0].strip())
                for line in fh
                if line.split("#", 1)[0].strip()
            ]
        universe = frozenset(terms)
    return SearchLimits(max_depth=depth, term_height=th, universe=universe, node_budget=budget)


def _spec_of(args, cfg):
    text = args.preset or args.spec or cfg.get("preset")
    if not text:
        raise _UsageError("a --preset name or --spec string is required")
    return resolve_spec(text)


def _write_drv(path: str, d: Derivation) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(print_derivation(d))


# -- commands


def _cmd_check(args, cfg) -> int:
    spec = _spec_of(args, cfg)
    with open(args.drv, encoding="utf-8") as fh:
        d = parse_derivation(fh.read())
    t0 = time.monotonic()
    rep = check(d, spec)
    ms = int((time.monotonic() - t0) * 1000)
    human = [f"checked {args.drv} against {spec.describe()}"]
    machine = {
        "result": "valid" if rep.valid else "invalid",
        "height": rep.height,
        "counts": {r.value: n for r, n in rep.rule_counts.items()},
    }
    if rep.first_error is not None:
        machine["error"] = str(rep.first_error)
    _emit(human, machine, args.json, ms)
    return 0 if rep.valid else 1


def _cmd_prove(args, cfg) -> int:
    spec = _spec_of(args, cfg)
    goal = parse_sequent(args.sequent)
    lim = _limits(args, cfg)
    t0 = time.monotonic()
    outcome = prove(goal, spec, lim)
    ms = int((time.monotonic() - t0) * 1000)
    if isinstance(outcome, Proved):
        d = outcome.derivation
        machine = {"result": "proved", "height": d.height, "counts": _counts(d)}
        human = [f"proved: {print_sequent(goal)}"]
        if args.out:
            _write_drv(args.out, d)
            human.append(f"derivation written to {args.out}")
        _emit(human, machine, args.json, ms)
        return 0
    if isinstance(outcome, DecidedUnderivable):
        _emit(
            [f"underivable: {print_sequent(goal)} ({outcome.reason})"],
            {"result": "underivable", "reason": outcome.reason},
            args.json,
            ms,
        )
        return 1
    machine = {
        "result": "exhausted",
        "expansions": outcome.expansions,
        "budget_exceeded": outcome.budget_exceeded,
    }
    _emit([f"exhausted the bounds on: {print_sequent(goal)}"], machine, args.json, ms)
    return 1


def _cmd_decide(args, cfg) -> int:
    goal = parse_sequent(args.sequent)
    t0 = time.monotonic()
    plan = decide_function_free(goal)
    ms = int((time.monotonic() - t0) * 1000)
    if isinstance(plan, DecidedUnderivable):
        _emit(
            [f"underivable: {print_sequent(goal)} ({plan.reason})"],
            {"result": "underivable", "reason": plan.reason},
            args.json,
            ms,
        )
        return 1
    human = [f"derivable: {print_sequent(goal)}"]
    machine: dict = {"result": "derivable", "chains": len(plan.chains)}
    if plan.witness_index is not None:
        machine["witness"] = str(goal.ante[plan.witness_index])
    if args.out:
        d = tf.orient_function_free(goal)
        _write_drv(args.out, d)
        machine["height"] = d.height
        human.append(f"oriented witness derivation written to {args.out}")
    _emit(human, machine, args.json, ms)
    return 0


_TRANSFORM_TARGETS = {
    "cut-eliminate": "R12r",
    "right-normalize": "R12r_eqr",
    "scope-restrict": "R_scope",
    "eliminate-rep1r": "R2rlPlus",
    "eliminate-rep2r": "R1rlPlus",
    "single-occurrence": None,
    "semishorten": None,
    "translate": None,
    "project": None,
}


def _cmd_transform(args, cfg) -> int:
    with open(args.drv, encoding="utf-8") as fh:
        d = parse_derivation(fh.read())
    op = args.op
    if op not in _TRANSFORM_TARGETS:
        raise _UsageError(f"unknown transform op {op!r}; choose from {sorted(_TRANSFORM_TARGETS)}")
    t0 = time.monotonic()
    steps: tuple[str, ...] = (op,)
    if op == "cut-eliminate":
        out = tf.cut_eliminate_pipeline(d)
        target = PRESETS["R12r"]
    elif op == "right-normalize":
        out = tf.right_normalize(d)
        target = PRESETS["R12r_eqr"]
    elif op == "scope-restrict":
        out = tf.scope_restrict(d)
        target = PRESETS["R_scope"]
    elif op == "eliminate-rep1r":
        work = PRESETS["R2rlPlus"].with_rules(RuleId.REP1R)
        out = tf.eliminate_rep1r_plus(tf.single_occurrence_normalize(d, work))
        target = PRESETS["R2rlPlus"]
        steps = ("single-occurrence", op)
    elif op == "eliminate-rep2r":
        work = PRESETS["R1rlPlus"].with_rules(RuleId.REP2R)
        out = tf.eliminate_rep2r_plus(tf.single_occurrence_normalize(d, work))
        target = PRESETS["R1rlPlus"]
        steps = ("single-occurrence", op)
    elif op == "single-occurrence":
        spec = _spec_of(args, cfg)
        out = tf.single_occurrence_normalize(d, spec)
        target = spec
    elif op == "semishorten":
        prec = _parse_prec(args.prec or "height")
        out = tf.semishorten(d, prec)
        target = tf.semishorten_target(prec)
    elif op == "translate":
        if not args.source or not args.target:
            raise _UsageError("translate needs --source and --target presets")
        out = tf.equivalence_translate(d, args.source, args.target)
        target = resolve_spec(args.target).with_rules(RuleId.CUT, RuleId.LC, RuleId.LW)
    else:  # project
        spec = _spec_of(args, cfg)
        formula, out = tf.project_succedent(d, spec)
        target = spec
    report = tf.make_report(d, out, target, steps)
    ms = int((time.monotonic() - t0) * 1000)
    human = [f"{op}: ok"] + report.lines()
    machine = {
        "result": "transformed",
        "input_height": report.input_height,
        "output_height": report.output_height,
        "counts": _counts(out),
        "target": report.target.describe(),
    }
    if args.out:
        _write_drv(args.out, out)
        human.append(f"output derivation written to {args.out}")
    _emit(human, machine, args.json, ms)
    return 0


def _parse_prec(text: str) -> Precedence:
    if text == "height":
        return PREC_HEIGHT
    if text == "none":
        return PREC_NONE
    if text.startswith("@"):
        return load_precedence_file(text[1:])
    raise _UsageError(f"unknown precedence {text!r} (use height, none or @file)")


def _outcome_token(outcome) -> str:
    if isinstance(outcome, Proved):
        return f"proved(h={outcome.derivation.height})"
    if isinstance(outcome, DecidedUnderivable):
        return "underivable"
    return "inconclusive"


def _cmd_compare(args, cfg) -> int:
    spec_a = resolve_spec(args.preset_a)
    spec_b = resolve_spec(args.preset_b)
    lim = _limits(args, cfg)
    with open(args.corpus, encoding="utf-8") as fh:
        goals = [
            parse_sequent(line.split("#", 1)[0].strip())
            for line in fh
            if line.split("#", 1)[0].strip()
        ]
    t0 = time.monotonic()
    rows = []
    agree = disagree = inconclusive = 0
    for goal in goals:
        oa = prove(goal, spec_a, lim)
        ob = prove(goal, spec_b, lim)
        ta, tb = _outcome_token(oa), _outcome_token(ob)
        proved_a, proved_b = isinstance(oa, Proved), isinstance(ob, Proved)
        under_a = isinstance(oa, DecidedUnderivable)
        under_b = isinstance(ob, DecidedUnderivable)
        if (proved_a and under_b) or (proved_b and under_a):
            verdict = "DISAGREE"
            disagree += 1
        elif isinstance(oa, Exhausted) or isinstance(ob, Exhausted):
            verdict = "inconclusive"
            inconclusive += 1
        else:
            verdict = "agree"
            agree += 1
        rows.append(f"{print_sequent(goal)}  |  {ta}  {tb}  {verdict}")
    ms = int((time.monotonic() - t0) * 1000)
    human = [f"compare {args.preset_a} vs {args.preset_b} over {len(goals)} sequents:"] + rows
    machine = {
        "result": "disagreements" if disagree else "agreement",
        "sequents": len(goals),
        "agree": agree,
        "disagree": disagree,
        "inconclusive": inconclusive,
    }
    _emit(human, machine, args.json, ms)
    return 1 if disagree else 0


def _cmd_presets(args, cfg) -> int:
    human = []
    for name in sorted(PRESETS):
        human.append(f"{name:16s} {PRESETS[name].describe()}")
    _emit(human, {"result": "ok", "presets": len(PRESETS)}, args.json, 0)
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="eqseq", description=__doc__)
    top.add_argument("--config", help="key = value defaults file (default ./eqseq.toml)")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, spec_opts=True, limit_opts=False):
        p.add_argument("--json", action="store_true", help="machine block as JSON")
        if spec_opts:
            p.add_argument("--preset", help="named calculus preset (see `eqseq presets`)")
            p.add_argument("--spec", help="inline spec: base=.. rules=.. flags=.. prec=..")
        if limit_opts:
            p.add_argument("--depth", type=int, help="inference bound per branch")
            p.add_argument("--term-height", dest="term_height", type=int, help="bound on witness terms")
            p.add_argument("--budget", type=int, help="total node expansion cap")
            p.add_argument("--universe-file", help="file of terms, one per line")

    p = sub.add_parser("check", help="verify a .drv derivation file")
    p.add_argument("drv")
    common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("prove", help="bounded backward proof search")
    p.add_argument("sequent")
    common(p, limit_opts=True)
    p.add_argument("-o", "--out", help="write the found derivation here")
    p.set_defaults(func=_cmd_prove)

    p = sub.add_parser("decide", help="exact decision for function-free atomic sequents")
    p.add_argument("sequent")
    common(p, spec_opts=False)
    p.add_argument("-o", "--out", help="write the oriented witness derivation here")
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("transform", help="apply a proof transformation to a .drv file")
    p.add_argument("drv")
    p.add_argument("op", choices=sorted(_TRANSFORM_TARGETS))
    common(p)
    p.add_argument("--source", help="source preset (translate)")
    p.add_argument("--target", help="target preset (translate)")
    p.add_argument("--prec", help="semishorten precedence: height, none or @file")
    p.add_argument("-o", "--out", help="write the transformed derivation here")
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("compare", help="prove a corpus under two calculi and tabulate")
    p.add_argument("corpus", help=".seq file, one sequent per line")
    p.add_argument("preset_a")
    p.add_argument("preset_b")
    common(p, spec_opts=False, limit_opts=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("presets", help="list the named calculus presets")
    common(p, spec_opts=False)
    p.set_defaults(func=_cmd_presets)

    return top


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = _load_config(args.config)
        return args.func(args, cfg)
    except (_UsageError, ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CalculusError, tf.TransformError, EqSeqError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
