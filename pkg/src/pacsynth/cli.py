"""Command-line front end: run tasks, batch suites, trace space shrinkage.

Exit codes: 0 program found / success, 2 no program, 3 input error,
4 resource cap exceeded, 5 oracle failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time

from .brute import BruteCapacityError, BruteConfig, exact_counts
from .clustering import bool_clusters, cluster, tier_size
from .dsl import DslError, evaluate, pretty
from .engine import (
    component_set_for_task,
    engines_for_task,
    synthesize_min_consistent,
    tier_sizes,
)
from .enumeration import CapacityError, enumerate_programs
from .guarantee import GuaranteeParams, run_tiered
from .oracle import (
    OracleError,
    OracleSource,
    ProtocolError,
    RecordedSource,
    TargetCrashed,
    TargetTimeout,
    TaskError,
    TaskSpec,
    held_out_error,
    load_examples,
    load_task,
    make_example,
    sample_input,
)
from . import reports

EXIT_OK = 0
EXIT_NONE = 2
EXIT_INPUT = 3
EXIT_CAP = 4
EXIT_ORACLE = 5


def _apply_overrides(task: TaskSpec, args) -> TaskSpec:
    updates = {}
    if args.epsilon is not None:
        updates["epsilon"] = args.epsilon
    if args.delta is not None:
        updates["delta"] = args.delta
    if getattr(args, "step_k", None) is not None:
        updates["step_k"] = args.step_k
    if getattr(args, "max_size", None) is not None:
        updates["max_size"] = args.max_size
    if getattr(args, "max_nesting", None) is not None:
        updates["max_nesting"] = args.max_nesting
    return dataclasses.replace(task, **updates) if updates else task


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _run_one(task: TaskSpec, seed: int, entry_cap: int, replay_path: str | None):
    engines = engines_for_task(task, entry_cap)
    if replay_path:
        source = RecordedSource(load_examples(replay_path))
    else:
        source = OracleSource(task, seed)
    params = GuaranteeParams(task.epsilon, task.delta, task.step_k)
    try:
        return run_tiered(source, engines, params)
    finally:
        if isinstance(source, OracleSource):
            source.close()


def cmd_run(args) -> int:
    task = _apply_overrides(load_task(args.task), args)
    out = _outdir(args)
    started = time.perf_counter()
    result = _run_one(task, args.seed, args.entry_cap, args.replay)
    wall = time.perf_counter() - started
    outcome = result.outcome

    held = (None, None, None)
    if outcome.result is not None:
        err, points, exact = held_out_error(
            task, outcome.result.expr, args.heldout_n, args.seed
        )
        held = (err, points, exact)

    report = {
        "format_version": reports.FORMAT_VERSION,
        "task": task.name,
        "seed": args.seed,
        "epsilon": task.epsilon,
        "delta": task.delta,
        "step_k": task.step_k,
        "max_size": task.max_size,
        "max_nesting": task.max_nesting,
        "outcome": "program" if outcome.result else "none",
        "program": outcome.result.text if outcome.result else None,
        "tier": outcome.result.tier if outcome.result else None,
        "program_size": outcome.result.size if outcome.result else None,
        "total_samples": outcome.total_samples,
        "validation_samples": outcome.validation_samples,
        "tiers_run": result.tiers_run,
        "held_out_error": held[0],
        "held_out_points": held[1],
        "held_out_exact": held[2],
        "trace_rows": len(result.trace),
    }
    base = os.path.join(out, task.name)
    reports.write_json(report, base + "_report.json")
    reports.write_trace_csv(result.trace, base + "_trace.csv")
    if args.dump_table or args.dump_clusters:
        comps = component_set_for_task(task)
        table = enumerate_programs(
            comps, [ex.inputs for ex in result.examples], task.max_size, args.entry_cap
        )
        if args.dump_table:
            reports.write_table_csv(table, args.dump_table)
        if args.dump_clusters:
            maps = cluster(table, [ex.output for ex in result.examples], task.output_sort)
            reports.write_cluster_csv(maps, args.dump_clusters)
    if not args.no_figures:
        reports.render_trace_figure(result.trace, base + "_trace.png", task.name)
    print(outcome.result.text if outcome.result else "none")
    print(
        f"samples={outcome.total_samples} validation={outcome.validation_samples} "
        f"held_out_error={held[0]} wall_s={wall:.2f}",
        file=sys.stderr,
    )
    return EXIT_OK if outcome.result else EXIT_NONE


def _eval_one_trial(task, trial, seed, args, rows):
    base_seed = seed + 1000 * trial
    row = {
        "task": task.name, "trial": trial, "mode": "guaranteed", "outcome": "none",
        "tier": None, "total_samples": None, "validation_samples": None,
        "held_out_error": None, "correct": False, "program": None, "error": "",
    }
    try:
        result = _run_one(task, base_seed, args.entry_cap, None)
        outcome = result.outcome
        row["outcome"] = "program" if outcome.result else "none"
        row["total_samples"] = outcome.total_samples
        row["validation_samples"] = outcome.validation_samples
        if outcome.result:
            err, _, _ = held_out_error(task, outcome.result.expr, args.heldout_n, base_seed)
            row.update(
                tier=outcome.result.tier, held_out_error=err,
                correct=err == 0, program=outcome.result.text,
            )
    except (OracleError, CapacityError, DslError) as exc:
        row["error"] = str(exc)
    rows.append(row)

    if args.baseline_n is None:
        return
    row = {
        "task": task.name, "trial": trial, "mode": "baseline", "outcome": "none",
        "tier": None, "total_samples": args.baseline_n, "validation_samples": 0,
        "held_out_error": None, "correct": False, "program": None, "error": "",
    }
    try:
        source = OracleSource(task, base_seed, label="baseline")
        try:
            examples = source.draw(args.baseline_n)
        finally:
            source.close()
        expr = synthesize_min_consistent(task, examples, args.entry_cap)
        if expr is not None:
            err, _, _ = held_out_error(task, expr, args.heldout_n, base_seed)
            row.update(
                outcome="program", program=pretty(expr), held_out_error=err,
                correct=err == 0,
            )
    except (OracleError, CapacityError, DslError) as exc:
        row["error"] = str(exc)
    rows.append(row)


def cmd_eval(args) -> int:
    if not os.path.isdir(args.suite):
        raise TaskError(f"suite directory {args.suite!r} does not exist")
    task_files = sorted(
        os.path.join(args.suite, f)
        for f in os.listdir(args.suite)
        if f.endswith(".json")
    )
    if not task_files:
        raise TaskError(f"suite directory {args.suite!r} has no task files")
    out = _outdir(args)
    rows: list[dict] = []
    for path in task_files:
        task = _apply_overrides(load_task(path), args)
        for trial in range(args.trials):
            _eval_one_trial(task, trial, args.seed, args, rows)

    def aggregate(mode: str) -> dict:
        mode_rows = [r for r in rows if r["mode"] == mode]
        if not mode_rows:
            return {}
        tasks = sorted({r["task"] for r in mode_rows})
        fully_correct = [
            t for t in tasks
            if all(r["correct"] for r in mode_rows if r["task"] == t)
        ]
        samples = [r["total_samples"] for r in mode_rows if r["total_samples"] is not None]
        errors = [r["held_out_error"] for r in mode_rows if r["held_out_error"] is not None]
        return {
            "runs": len(mode_rows),
            "zero_error_runs": sum(1 for r in mode_rows if r["correct"]),
            "tasks_fully_correct": len(fully_correct),
            "tasks": len(tasks),
            "mean_total_samples": sum(samples) / len(samples) if samples else None,
            "mean_held_out_error": sum(errors) / len(errors) if errors else None,
        }

    report = {
        "format_version": reports.FORMAT_VERSION,
        "suite": os.path.basename(os.path.normpath(args.suite)),
        "trials": args.trials,
        "seed": args.seed,
        "baseline_n": args.baseline_n,
        "aggregates": {m: aggregate(m) for m in sorted({r["mode"] for r in rows})},
        "rows": rows,
    }
    reports.write_json(report, os.path.join(out, "suite_report.json"))
    reports.write_suite_rows_csv(rows, os.path.join(out, "suite_rows.csv"))
    if not args.no_figures and rows:
        reports.render_suite_figure(
            rows, os.path.join(out, "suite_samples.png"), "samples per task"
        )
    for mode, agg in report["aggregates"].items():
        print(
            f"{mode}: {agg.get('zero_error_runs', 0)}/{agg.get('runs', 0)} zero-error runs, "
            f"{agg.get('tasks_fully_correct', 0)}/{agg.get('tasks', 0)} tasks correct in all trials"
        )
    return EXIT_OK


def cmd_trace_shrinkage(args) -> int:
    task = _apply_overrides(load_task(args.task), args)
    if args.n_examples < 1:
        raise TaskError("--n-examples must be at least 1")
    out = _outdir(args)
    comps = component_set_for_task(task)
    source = OracleSource(task, args.seed)
    try:
        examples = source.draw(args.n_examples)
    finally:
        source.close()
    rows = []
    for upto in range(args.n_examples + 1):
        sizes = tier_sizes(
            comps, task.output_sort, task.max_size, examples[:upto],
            max_tier=2, entry_cap=args.entry_cap,
        )
        rows.append((upto, sizes))
    base = os.path.join(out, task.name)
    reports.write_shrinkage_csv(rows, base + "_shrinkage.csv")
    if not args.no_figures:
        reports.render_shrinkage_figure(rows, base + "_shrinkage.png", task.name)
    print(base + "_shrinkage.csv")
    return EXIT_OK


def cmd_verify_counts(args) -> int:
    task = _apply_overrides(load_task(args.task), args)
    comps = component_set_for_task(task)
    source = OracleSource(task, args.seed)
    try:
        examples = source.draw(args.examples)
    finally:
        source.close()
    inputs = [ex.inputs for ex in examples]
    outputs = [ex.output for ex in examples]
    nesting = min(task.max_nesting, 2)
    config = BruteConfig(
        comps, task.output_sort, max_size=min(task.max_size, 6),
        max_nesting=nesting, examples=inputs, program_cap=args.program_cap,
    )
    brute = exact_counts(config, outputs)

    table = enumerate_programs(comps, inputs, config.max_size, args.entry_cap)
    maps = cluster(table, outputs, task.output_sort)
    bools = bool_clusters(table)

    mismatches = 0
    for sort, expected in brute.value_counts.items():
        keys = set(expected) | {
            (vec, t) for vec, t, _ in table.entries(sort)
        }
        for vec, t in sorted(keys, key=repr):
            got = table.count(sort, vec, t)
            want = expected.get((vec, t), 0)
            if got != want:
                print(f"count,{sort.value},size={t},engine={got},brute={want}")
                mismatches += 1
    cons_keys = set(brute.consistency_counts) | set(maps.count_by_consistency)
    for c in sorted(cons_keys):
        got = maps.count_by_consistency.get(c, 0)
        want = brute.consistency_counts.get(c, 0)
        if got != want:
            label = "".join("1" if b else "0" for b in c)
            print(f"consistency,{label},engine={got},brute={want}")
            mismatches += 1
    memo: dict = {}
    for tier in range(nesting + 1):
        got = tier_size(maps, bools, tier, memo)
        want = brute.tier_totals[tier]
        if got != want:
            print(f"tier_size,{tier},engine={got},brute={want}")
            mismatches += 1
    return EXIT_OK if mismatches == 0 else 1


def cmd_sample(args) -> int:
    import json as _json

    task = load_task(args.task)
    source = OracleSource(task, args.seed)
    try:
        examples = source.draw(args.n)
    finally:
        source.close()
    lines = [
        _json.dumps({"inputs": ex.inputs, "output": ex.output}, sort_keys=True)
        for ex in examples
    ]
    if args.out_file:
        with open(args.out_file, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pacsynth",
        description="String-program synthesis with a PAC generalization guarantee",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, guarantee=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--no-figures", action="store_true")
        p.add_argument("--entry-cap", type=int, default=2_000_000)
        p.add_argument("--max-size", type=int, default=None)
        p.add_argument("--max-nesting", type=int, default=None)
        if guarantee:
            p.add_argument("--epsilon", type=float, default=None)
            p.add_argument("--delta", type=float, default=None)
            p.add_argument("--step-k", type=int, default=None, dest="step_k")

    p_run = sub.add_parser("run", help="synthesize one task with the guarantee loop")
    p_run.add_argument("task")
    common(p_run)
    p_run.add_argument("--heldout-n", type=int, default=10_000, dest="heldout_n")
    p_run.add_argument("--replay", default=None, help="JSONL example file as the oracle")
    p_run.add_argument("--dump-table", default=None)
    p_run.add_argument("--dump-clusters", default=None)
    p_run.set_defaults(fn=cmd_run)

    p_eval = sub.add_parser("eval", help="batch-evaluate a suite directory")
    p_eval.add_argument("suite")
    common(p_eval)
    p_eval.add_argument("--trials", type=int, default=3)
    p_eval.add_argument("--baseline-n", type=int, default=None, dest="baseline_n")
    p_eval.add_argument("--heldout-n", type=int, default=10_000, dest="heldout_n")
    p_eval.set_defaults(fn=cmd_eval)

    p_tr = sub.add_parser("trace-shrinkage", help="per-example tier-size trace")
    p_tr.add_argument("task")
    common(p_tr, guarantee=False)
    p_tr.add_argument("--epsilon", type=float, default=None)
    p_tr.add_argument("--delta", type=float, default=None)
    p_tr.add_argument("--n-examples", type=int, default=12, dest="n_examples")
    p_tr.set_defaults(fn=cmd_trace_shrinkage)

    p_vc = sub.add_parser("verify-counts", help="audit counts against brute force")
    p_vc.add_argument("task")
    common(p_vc, guarantee=False)
    p_vc.add_argument("--epsilon", type=float, default=None)
    p_vc.add_argument("--delta", type=float, default=None)
    p_vc.add_argument("--examples", type=int, default=2)
    p_vc.add_argument("--program-cap", type=int, default=10_000_000, dest="program_cap")
    p_vc.set_defaults(fn=cmd_verify_counts)

    p_s = sub.add_parser("sample", help="dump n examples for a task")
    p_s.add_argument("task")
    p_s.add_argument("-n", type=int, default=10)
    p_s.add_argument("--seed", type=int, default=0)
    p_s.add_argument("--out", dest="out_file", default=None)
    p_s.set_defaults(fn=cmd_sample)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (TaskError, DslError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (CapacityError, BruteCapacityError) as err:
        print(f"resource cap: {err}", file=sys.stderr)
        return EXIT_CAP
    except (ProtocolError, TargetTimeout, TargetCrashed, OracleError) as err:
        print(f"oracle failure: {err}", file=sys.stderr)
        return EXIT_ORACLE


if __name__ == "__main__":
    sys.exit(main())
