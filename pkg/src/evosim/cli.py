"""Operator CLI: run simulations, compute metrics, re-run assessments,
compare runs, validate worlds, and serve the steering API."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from .environment import WorldParseError, load_world
from .hashing import canonical_json
from .kernel import RunConfig, read_log, run_simulation
from .evaluation.metrics import agent_ids, metrics_report, score_series_from_log

ABLATION_FLAGS = {
    "growth": "disable_growth",
    "insight": "disable_insight",
    "feelings": "disable_cognitive_feelings",
    "simple-character": "simple_character",
}


def _fail(code: int, message: str) -> int:
    print(message, file=sys.stderr)
    return code


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path, encoding="utf-8") as fh:
        return RunConfig.from_dict(json.load(fh))


def cmd_run(args) -> int:
    try:
        config = _load_config(args.config)
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        return _fail(2, f"invalid config: {exc}")
    if args.days is not None:
        config.days = args.days
    if args.seed is not None:
        config.seed = args.seed
    if args.backend is not None:
        config.backend = args.backend
    if args.world is not None:
        try:
            with open(args.world, encoding="utf-8") as fh:
                config.world_csv = fh.read()
        except OSError as exc:
            return _fail(2, f"invalid config: {exc}")
    for name in (args.ablate.split(",") if args.ablate else []):
        name = name.strip()
        if not name:
            continue
        if name not in ABLATION_FLAGS:
            return _fail(2, f"invalid config: unknown ablation {name!r} "
                            f"(choose from {', '.join(ABLATION_FLAGS)})")
        setattr(config, ABLATION_FLAGS[name], True)
    if config.days < 1:
        return _fail(2, "invalid config: days must be >= 1")
    log_path = args.out
    os.makedirs(os.path.dirname(os.path.abspath(log_path)), exist_ok=True)
    if os.path.exists(log_path):
        os.remove(log_path)
    run_simulation(config, log_path)
    digest = hashlib.sha256(open(log_path, "rb").read()).hexdigest()
    print(log_path)
    print(f"sha256 {digest}", file=sys.stderr)
    return 0


def _read_log_or_fail(path: str) -> list[dict] | int:
    try:
        return read_log(path)
    except OSError as exc:
        return _fail(3, f"cannot read log: {exc}")
    except ValueError as exc:
        return _fail(3, str(exc))


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
                     for r in rows)


def cmd_metrics(args) -> int:
    records = _read_log_or_fail(args.log)
    if isinstance(records, int):
        return records
    report = metrics_report(records)
    if args.json:
        print(canonical_json(report))
        return 0
    rows = [["agent", "delta_overall", "activity_level"]]
    for agent, data in sorted(report["agents"].items()):
        rows.append([agent,
                     "n/a" if data["delta_overall"] is None else f"{data['delta_overall']:.4f}",
                     "n/a" if data["activity_level"] is None else f"{data['activity_level']:.4f}"])
    print(_table(rows))
    return 0


def cmd_bfi(args) -> int:
    records = _read_log_or_fail(args.log)
    if isinstance(records, int):
        return records
    rows = [["agent", "day", "EXT", "AGR", "CON", "NEU", "OPEN"]]
    for agent in agent_ids(records):
        series = score_series_from_log(records, agent)
        for day in range(series.days):
            rows.append([agent, str(day + 1)] + [
                str(series.series[d][day])
                for d in ("extraversion", "agreeableness", "conscientiousness",
                          "neuroticism", "openness")])
    print(_table(rows))
    return 0


def cmd_compare(args) -> int:
    records_a = _read_log_or_fail(args.log_a)
    if isinstance(records_a, int):
        return records_a
    records_b = _read_log_or_fail(args.log_b)
    if isinstance(records_b, int):
        return records_b
    if agent_ids(records_a) != agent_ids(records_b):
        return _fail(4, f"agent sets differ: {agent_ids(records_a)} vs {agent_ids(records_b)}")
    rep_a = metrics_report(records_a)
    rep_b = metrics_report(records_b)
    rows = [["agent", "delta_A", "delta_B", "activity_A", "activity_B", "activity_diff"]]
    for agent in agent_ids(records_a):
        a = rep_a["agents"][agent]
        b = rep_b["agents"][agent]
        rows.append([
            agent,
            f"{a['delta_overall']:.4f}", f"{b['delta_overall']:.4f}",
            f"{a['activity_level']:.4f}", f"{b['activity_level']:.4f}",
            f"{a['activity_level'] - b['activity_level']:+.4f}"])
    print(_table(rows))
    return 0


def cmd_validate_world(args) -> int:
    try:
        with open(args.csv, encoding="utf-8") as fh:
            world = load_world(fh.read())
    except OSError as exc:
        return _fail(2, f"cannot read csv: {exc}")
    except WorldParseError as exc:
        return _fail(2, f"invalid world: {exc}")
    print(f"ok: {len(world.buildings)} buildings, {len(world.places)} places")
    return 0


def cmd_serve(args) -> int:
    try:
        config = _load_config(args.config)
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        return _fail(2, f"invalid config: {exc}")
    from .server import serve

    serve(config, host=args.host, port=args.port, log_path=args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evosim")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a simulation and write the event log")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--days", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--backend", choices=["scripted", "http"])
    p.add_argument("--world", help="world CSV path")
    p.add_argument("--ablate", help="comma list: growth,insight,feelings,simple-character")
    p.add_argument("--out", default="events.jsonl", help="log output path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("metrics", help="personality/behavior metrics from a log")
    p.add_argument("log")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bfi", help="re-run the BFI assessment over a finished log")
    p.add_argument("log")
    p.set_defaults(func=cmd_bfi)

    p = sub.add_parser("compare", help="side-by-side metrics for two logs")
    p.add_argument("log_a")
    p.add_argument("log_b")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate-world", help="validate a world CSV")
    p.add_argument("csv")
    p.set_defaults(func=cmd_validate_world)

    p = sub.add_parser("serve", help="serve the steering API")
    p.add_argument("--config")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--out", help="log output path")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
