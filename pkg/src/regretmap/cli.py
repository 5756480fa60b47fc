"""Command-line entry points.

  regretmap run      --config FILE [--mode M] [--seed N] [--iterations N]
                     [--workers N] --out DIR
  regretmap report   --out DIR [--policy ID]
  regretmap replay   --out DIR --policy ID --cell X,Y
  regretmap validate --config FILE

Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .io import (ArchiveFormatError, ConfigError, export_heatmap,
                 export_replay, format_config, load_archive, parse_config,
                 save_result)
from .policies import make_target
from .search import MODES, SearchConfig, run_search

USAGE_ERROR = 1
VALIDATION_ERROR = 2
RUNTIME_ERROR = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regretmap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run a search and write a result directory")
    p_run.add_argument("--config", help="run configuration file")
    p_run.add_argument("--mode", choices=MODES)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--iterations", type=int)
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--out", required=True, help="result directory to create")

    p_rep = sub.add_parser("report", help="summarize a result directory, write heatmaps")
    p_rep.add_argument("--out", required=True, help="result directory to read")
    p_rep.add_argument("--policy", help="restrict heatmap export to one policy id")

    p_play = sub.add_parser("replay", help="export one cell's cross-/self-play traces")
    p_play.add_argument("--out", required=True, help="result directory to read")
    p_play.add_argument("--policy", required=True, help="reference policy id")
    p_play.add_argument("--cell", required=True, metavar="X,Y", help="cell bins, e.g. 12,4")

    p_val = sub.add_parser("validate", help="check a configuration file")
    p_val.add_argument("--config", required=True)
    return parser


def _load_effective_config(args) -> SearchConfig:
    if args.config:
        config = parse_config(args.config)
    else:
        config = SearchConfig()
    overrides = {}
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.iterations is not None:
        overrides["iterations"] = args.iterations
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


def _cmd_run(args) -> int:
    config = _load_effective_config(args)
    result = run_search(config, workers=max(1, args.workers))
    save_result(result, args.out)
    final = result.metrics[-1]
    print(f"wrote {args.out}: {len(result.archive)} occupied cells, "
          f"mean regret {final.mean_archive_regret:+.4f}, "
          f"coverage {final.coverage:.3f}, qd {final.qd_score:.1f}")
    return 0


def _cmd_report(args) -> int:
    archive, policies, _seed = load_archive(os.path.join(args.out, "archive.txt"))
    ids = [p.id for p in policies]
    if args.policy is not None and args.policy not in ids:
        raise ConfigError(f"unknown policy id {args.policy!r}")
    heat_dir = os.path.join(args.out, "heatmaps")
    os.makedirs(heat_dir, exist_ok=True)
    chosen = [args.policy] if args.policy else ids
    for pid in chosen:
        export_heatmap(archive, policies, pid, os.path.join(heat_dir, f"{pid}.csv"))
    print(f"{'policy':<12} {'skill':>6} {'cells':>6} {'mean_regret':>12} {'best':>7}")
    for i, p in enumerate(policies):
        regrets = archive.policy_regrets(i)
        mean = sum(regrets) / archive.spec.cells_per_policy
        best = max(regrets) if regrets else float("nan")
        print(f"{p.id:<12} {p.skill:>6.3f} {len(regrets):>6} {mean:>+12.4f} {best:>+7.2f}")
    print(f"heatmaps -> {heat_dir}")
    return 0


def _cmd_replay(args) -> int:
    archive, policies, _seed = load_archive(os.path.join(args.out, "archive.txt"))
    ids = [p.id for p in policies]
    if args.policy not in ids:
        raise ConfigError(f"unknown policy id {args.policy!r}")
    try:
        xs, ys = args.cell.split(",")
        xb, yb = int(xs), int(ys)
    except ValueError:
        raise ConfigError(f"--cell expects X,Y integers, got {args.cell!r}") from None
    p = ids.index(args.policy)
    elite = archive.cells.get((p, xb, yb))
    if elite is None:
        raise ConfigError(f"cell ({xb}, {yb}) for policy {args.policy!r} is empty")
    config_path = os.path.join(args.out, "config.txt")
    run_config = parse_config(config_path) if os.path.exists(config_path) else SearchConfig()
    match = run_config.match
    target = make_target(run_config.target_flaws)
    replay_dir = os.path.join(args.out, "replays")
    os.makedirs(replay_dir, exist_ok=True)
    path = os.path.join(replay_dir, f"{args.policy}_{xb}_{yb}.json")
    export_replay(elite.level, policies[p], target, elite.eval_seed, match, path)
    print(f"wrote {path} (regret {elite.regret:+.2f}, xp {elite.xp_mean:+.2f}, "
          f"sp {elite.sp_mean:+.2f})")
    return 0


def _cmd_validate(args) -> int:
    config = parse_config(args.config)
    sys.stdout.write(format_config(config))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else USAGE_ERROR
    try:
        if args.verb == "run":
            return _cmd_run(args)
        if args.verb == "report":
            return _cmd_report(args)
        if args.verb == "replay":
            return _cmd_replay(args)
        return _cmd_validate(args)
    except (ConfigError, ArchiveFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_ERROR
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


def entry() -> None:
    raise SystemExit(main())
