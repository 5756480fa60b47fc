"""Text formats and result persistence.

Formats are line-oriented text: small, diffable, and byte-stable. Floats
are written with 9 significant digits; parsing such a field and re-writing
it reproduces the bytes, so save -> load -> save is an identity.

  config   `key = value` lines mirroring SearchConfig, `#` comments
  archive  versioned header (grid spec, policy roster, seed) plus one line
           per occupied cell in (policy, x_bin, y_bin) order
  heatmap  y_bins rows x x_bins comma-separated regret values per policy
  replay   JSON with the level, both policy ids, the evaluation seed, and
           full step-by-step traces of the cross-play and self-play episodes
"""

from __future__ import annotations

import json
import os
import numpy as np

from .archive import Archive, Elite, GridSpec
from .evaluation import PHASE_SP, PHASE_XP, derive_episode_seed, trace_episode
from .levels import level_descriptor
from .pitch import MatchConfig
from .policies import ALL_FLAWS, PolicySpec
from .search import MODES, LadderConfig, MetricsRecord, SearchConfig, SearchResult

ARCHIVE_FORMAT_VERSION = 1


class ConfigError(ValueError):
    """Invalid run-configuration file or value."""


class ArchiveFormatError(ValueError):
    """Malformed archive file; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


# ---------------------------------------------------------------------------
# run configuration files

_CONFIG_KEYS = ("mode", "iterations", "emitters", "repeats", "sigma", "seed",
                "n_ladder", "include_bots", "target_flaws", "x_bins", "y_bins",
                "qd_offset", "init_levels_per_policy", "metrics_stride",
                "episode_length", "offsides_enabled", "team_size",
                "keeper_track_speed")

_BOOL = {"true": True, "false": False}


def _parse_scalar(key: str, raw: str, kind: str, lo=None, hi=None):
    try:
        if kind == "int":
            v = int(raw)
        elif kind == "float":
            v = float(raw)
        else:
            if raw.lower() not in _BOOL:
                raise ValueError
            v = _BOOL[raw.lower()]
    except ValueError:
        raise ConfigError(f"{key}: expected {kind}, got {raw!r}") from None
    if lo is not None and v < lo:
        raise ConfigError(f"{key}: value {raw} below minimum {lo}")
    if hi is not None and kind != "bool" and v > hi:
        raise ConfigError(f"{key}: value {raw} above maximum {hi}")
    return v


def parse_config_text(text: str) -> SearchConfig:
    values: dict[str, str] = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {ln}: expected `key = value`, got {line.strip()!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {ln}: duplicate key {key!r}")
        values[key] = raw

    def take(key, kind, default, lo=None, hi=None):
        if key not in values:
            return default
        return _parse_scalar(key, values.pop(key), kind, lo, hi)

    mode = values.pop("mode", "madrid_cmame")
    if mode not in MODES:
        raise ConfigError(f"mode: must be one of {', '.join(MODES)}, got {mode!r}")

    flaws_raw = values.pop("target_flaws", "all")
    if flaws_raw == "all":
        flaws = ALL_FLAWS
    elif flaws_raw == "none":
        flaws = frozenset()
    else:
        flaws = frozenset(p.strip() for p in flaws_raw.split(",") if p.strip())
        unknown = flaws - ALL_FLAWS
        if unknown:
            raise ConfigError(f"target_flaws: unknown flaw {sorted(unknown)[0]!r}")

    match = MatchConfig(
        episode_length=take("episode_length", "int", 128, lo=1),
        offsides_enabled=take("offsides_enabled", "bool", True),
        team_size=take("team_size", "int", 5, lo=2),
        keeper_track_speed=take("keeper_track_speed", "float", 0.04, lo=1e-9),
    )
    ladder = LadderConfig(
        n_ladder=take("n_ladder", "int", 8, lo=1),
        include_bots=take("include_bots", "bool", True),
    )
    try:
        return SearchConfig(
            mode=mode,
            iterations=take("iterations", "int", 5000, lo=1),
            emitters=take("emitters", "int", 4, lo=1),
            repeats=take("repeats", "int", 4, lo=1),
            sigma=take("sigma", "float", 0.1, lo=0.0),
            seed=take("seed", "int", 0, lo=0),
            ladder=ladder,
            match=match,
            target_flaws=flaws,
            x_bins=take("x_bins", "int", 16, lo=1),
            y_bins=take("y_bins", "int", 10, lo=1),
            qd_offset=take("qd_offset", "float", -2.0),
            init_levels_per_policy=take("init_levels_per_policy", "int", 16, lo=1),
            metrics_stride=take("metrics_stride", "int", 25, lo=1),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(path) -> SearchConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def format_config(config: SearchConfig) -> str:
    flaws = sorted(config.target_flaws)
    if config.target_flaws == ALL_FLAWS:
        flaws_str = "all"
    elif not flaws:
        flaws_str = "none"
    else:
        flaws_str = ",".join(flaws)
    lines = [
        f"mode = {config.mode}",
        f"iterations = {config.iterations}",
        f"emitters = {config.emitters}",
        f"repeats = {config.repeats}",
        f"sigma = {_fmt(config.sigma)}",
        f"seed = {config.seed}",
        f"n_ladder = {config.ladder.n_ladder}",
        f"include_bots = {str(config.ladder.include_bots).lower()}",
        f"target_flaws = {flaws_str}",
        f"x_bins = {config.x_bins}",
        f"y_bins = {config.y_bins}",
        f"qd_offset = {_fmt(config.qd_offset)}",
        f"init_levels_per_policy = {config.init_levels_per_policy}",
        f"metrics_stride = {config.metrics_stride}",
        f"episode_length = {config.match.episode_length}",
        f"offsides_enabled = {str(config.match.offsides_enabled).lower()}",
        f"team_size = {config.match.team_size}",
        f"keeper_track_speed = {_fmt(config.match.keeper_track_speed)}",
    ]
    return "\n".join(lines) + "\n"


def save_config(config: SearchConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_config(config))


# ---------------------------------------------------------------------------
# archive files

def save_archive(archive: Archive, policies: list[PolicySpec], seed: int, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_archive(archive, policies, seed))


def format_archive(archive: Archive, policies: list[PolicySpec], seed: int) -> str:
    spec = archive.spec
    if len(policies) != spec.policy_count:
        raise ValueError(f"roster size {len(policies)} != policy_count {spec.policy_count}")
    out = [
        f"format_version = {ARCHIVE_FORMAT_VERSION}",
        f"seed = {seed}",
        f"x_bins = {spec.x_bins}",
        f"y_bins = {spec.y_bins}",
        f"x_range = {_fmt(spec.x_range[0])} {_fmt(spec.x_range[1])}",
        f"y_range = {_fmt(spec.y_range[0])} {_fmt(spec.y_range[1])}",
        f"offset = {_fmt(archive.offset)}",
        f"policy_count = {spec.policy_count}",
    ]
    for p in policies:
        flaws = ",".join(sorted(p.flaws)) if p.flaws else "-"
        out.append(f"policy = {p.id} {p.kind} {_fmt(p.skill)} {flaws}")
    out.append("cells:")
    for key, e in archive.items_sorted():
        coords = " ".join(_fmt(c) for c in np.asarray(e.level, dtype=float))
        out.append(f"{policies[key.policy].id} {key.x} {key.y} {_fmt(e.regret)} "
                   f"{_fmt(e.xp_mean)} {_fmt(e.sp_mean)} {e.eval_seed} "
                   f"{e.iteration_found} {coords}")
    return "\n".join(out) + "\n"


def load_archive(path) -> tuple[Archive, list[PolicySpec], int]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_archive_text(text)


def parse_archive_text(text: str) -> tuple[Archive, list[PolicySpec], int]:
    lines = text.splitlines()
    header: dict[str, str] = {}
    policies: list[PolicySpec] = []
    ln = 0

    def fail(msg: str) -> ArchiveFormatError:
        return ArchiveFormatError(msg, ln + 1)

    while ln < len(lines):
        line = lines[ln].strip()
        if line == "cells:":
            break
        if "=" not in line:
            raise fail(f"expected `key = value` or `cells:`, got {line!r}")
        key, raw = (p.strip() for p in line.split("=", 1))
        if key == "policy":
            parts = raw.split()
            if len(parts) != 4:
                raise fail("policy line needs: id kind skill flaws")
            flaws = frozenset() if parts[3] == "-" else frozenset(parts[3].split(","))
            try:
                policies.append(PolicySpec(parts[1], float(parts[2]), parts[0], flaws))
            except ValueError as exc:
                raise fail(str(exc)) from None
        else:
            header[key] = raw
        ln += 1
    else:
        raise fail("missing `cells:` section")

    try:
        version = int(header["format_version"])
    except (KeyError, ValueError):
        raise fail("missing or malformed format_version") from None
    if version != ARCHIVE_FORMAT_VERSION:
        raise fail(f"unsupported format_version {version}")
    try:
        seed = int(header["seed"])
        spec = GridSpec(
            x_bins=int(header["x_bins"]),
            y_bins=int(header["y_bins"]),
            x_range=tuple(float(v) for v in header["x_range"].split()),
            y_range=tuple(float(v) for v in header["y_range"].split()),
            policy_count=int(header["policy_count"]),
        )
        offset = float(header["offset"])
    except (KeyError, ValueError) as exc:
        raise fail(f"bad header: {exc}") from None
    if len(policies) != spec.policy_count:
        raise fail(f"roster size {len(policies)} != policy_count {spec.policy_count}")

    by_id = {p.id: i for i, p in enumerate(policies)}
    archive = Archive(spec, offset=offset)
    for ln in range(ln + 1, len(lines)):
        line = lines[ln].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 9:
            raise fail("truncated cell record")
        pid, xb, yb = parts[0], parts[1], parts[2]
        if pid not in by_id:
            raise fail(f"unknown policy id {pid!r}")
        try:
            regret = float(parts[3])
            xp = float(parts[4])
            sp = float(parts[5])
            eval_seed = int(parts[6])
            iteration = int(parts[7])
            level = np.array([float(v) for v in parts[8:]], dtype=float)
            xb = int(xb)
            yb = int(yb)
        except ValueError as exc:
            raise fail(f"bad cell field: {exc}") from None
        try:
            elite = Elite(level, regret, xp, sp, level_descriptor(level), by_id[pid],
                          eval_seed, iteration)
            key = archive.key_for(elite)
        except ValueError as exc:
            raise fail(str(exc)) from None
        if (key.x, key.y) != (xb, yb):
            raise fail(f"descriptor maps to cell ({key.x}, {key.y}), record says ({xb}, {yb})")
        if key in archive.cells:
            raise fail(f"duplicate cell ({pid}, {xb}, {yb})")
        archive.cells[key] = elite
    return archive, policies, seed


# ---------------------------------------------------------------------------
# heatmaps, metrics, replays

def format_heatmap(archive: Archive, policies: list[PolicySpec], policy_id: str) -> str:
    ids = [p.id for p in policies]
    if policy_id not in ids:
        raise ValueError(f"unknown policy id {policy_id!r}")
    p = ids.index(policy_id)
    spec = archive.spec
    rows = []
    for yb in range(spec.y_bins):
        row = []
        for xb in range(spec.x_bins):
            elite = archive.cells.get((p, xb, yb))
            row.append(_fmt(elite.regret) if elite is not None else "")
        rows.append(",".join(row))
    return "\n".join(rows) + "\n"


def export_heatmap(archive: Archive, policies: list[PolicySpec], policy_id: str, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_heatmap(archive, policies, policy_id))


def format_metrics_csv(metrics: list[MetricsRecord]) -> str:
    out = ["iteration,evaluations,mean_archive_regret,scoring_rate,coverage,qd_score"]
    for m in metrics:
        out.append(f"{m.iteration},{m.evaluations},{_fmt(m.mean_archive_regret)},"
                   f"{_fmt(m.scoring_rate)},{_fmt(m.coverage)},{_fmt(m.qd_score)}")
    return "\n".join(out) + "\n"


def format_policy_summary_csv(result: SearchResult) -> str:
    out = ["policy_id,kind,skill,final_mean_regret,scoring_rate"]
    for i, p in enumerate(result.references):
        out.append(f"{p.id},{p.kind},{_fmt(p.skill)},"
                   f"{_fmt(result.per_policy_mean_regret[i])},"
                   f"{_fmt(result.per_policy_scoring_rate[i])}")
    return "\n".join(out) + "\n"


def build_replay(level, ref: PolicySpec, target: PolicySpec, eval_seed: int,
                 config: MatchConfig) -> dict:
    """Cross-play and self-play traces for one archive cell, regenerated from
    the stored evaluation seed (repeat 0 of each phase)."""
    xp_seed = derive_episode_seed(eval_seed, PHASE_XP, 0)
    sp_seed = derive_episode_seed(eval_seed, PHASE_SP, 0)
    return {
        "level": [float(v) for v in np.asarray(level, dtype=float)],
        "ref_id": ref.id,
        "target_id": target.id,
        "eval_seed": int(eval_seed),
        "episode_length": config.episode_length,
        "traces": {
            "xp": {"team_a": ref.id, "team_b": target.id,
                   **trace_episode(level, ref, target, xp_seed, config)},
            "sp": {"team_a": target.id, "team_b": target.id,
                   **trace_episode(level, target, target, sp_seed, config)},
        },
    }


def export_replay(level, ref: PolicySpec, target: PolicySpec, eval_seed: int,
                  config: MatchConfig, path) -> None:
    doc = build_replay(level, ref, target, eval_seed, config)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# result directories

def save_result(result: SearchResult, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    save_config(result.config, os.path.join(out_dir, "config.txt"))
    save_archive(result.archive, result.references, result.config.seed,
                 os.path.join(out_dir, "archive.txt"))
    with open(os.path.join(out_dir, "metrics.csv"), "w", encoding="utf-8") as fh:
        fh.write(format_metrics_csv(result.metrics))
    with open(os.path.join(out_dir, "policy_summary.csv"), "w", encoding="utf-8") as fh:
        fh.write(format_policy_summary_csv(result))
    with open(os.path.join(out_dir, "provenance.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"version = {result.version}\n"
                 f"mode = {result.config.mode}\n"
                 f"seed = {result.config.seed}\n"
                 f"evaluations = {result.evaluations}\n"
                 f"target_flaws = {','.join(sorted(result.target.flaws)) or '-'}\n")
