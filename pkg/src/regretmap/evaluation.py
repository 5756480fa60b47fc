"""Rollout execution and regret estimation.

The value of an episode is +1 / 0 / -1 for a goal by the row team, no goal,
or a goal by the column team. Regret of a level against a reference policy
is the mean cross-play value (reference vs target) minus the mean self-play
value (target vs target), each over the same number of repeated episodes on
that level. Teams may be PolicySpec instances or bare callables
(obs, rng) -> action, which is how tests inject deterministic stubs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .pitch import (RULE_AGENT_BASE, TEAM_A, TEAM_B, MatchConfig, StepEvent,
                    attack_sign, reset, step_inplace)
from .policies import Observation, PolicySpec, act, observe
from .policies import _skeleton
from .rng import EpisodeRng, StreamRng, mix64

PHASE_XP = 0
PHASE_SP = 1


@dataclass
class RolloutOutcome:
    scorer: int | None  # TEAM_A, TEAM_B or None
    end_step: int
    events: list[StepEvent] = field(default_factory=list)


@dataclass
class RegretEstimate:
    level: np.ndarray
    policy_index: int
    xp_mean: float
    sp_mean: float
    regret: float
    repeats: int
    seeds: list[int]


def derive_episode_seed(base_seed: int, phase: int, repeat: int) -> int:
    """Independent per-episode seed; cross-play and self-play never share draws."""
    return mix64(base_seed, phase, repeat)


def _action_fn(policy):
    if isinstance(policy, PolicySpec):
        if policy.skill >= 1.0:
            # the skill gate can never substitute; skipping its draw touches
            # no other stream, so the trajectory is unchanged
            return partial(_skeleton_only, policy)
        return partial(act, policy)
    if callable(policy):
        return policy
    raise TypeError(f"policy must be a PolicySpec or callable, got {type(policy)!r}")


def _skeleton_only(spec, obs, rng):
    return _skeleton(spec, obs)


def _team_views(state, team: int, n_out: int) -> list[Observation]:
    """Reusable per-agent observations; the mutable scalars are refreshed each
    step by the episode loop, the position lists are live references."""
    if team == TEAM_A:
        tx, ty, ox, oy = state.ax, state.ay, state.bx, state.by
    else:
        tx, ty, ox, oy = state.bx, state.by, state.ax, state.ay
    sign = attack_sign(team)
    return [Observation(team, i, tx, ty, ox, oy, 0.0, 0.0, None, 0, sign, 0, len(tx) - 1)
            for i in range(n_out)]


def play_episode(level, team_a, team_b, seed: int, config: MatchConfig) -> RolloutOutcome:
    """One episode of team_a vs team_b on the level, fully determined by the
    arguments. Runs until a terminal event or the configured horizon."""
    fa = _action_fn(team_a)
    fb = _action_fn(team_b)
    state = reset(level, config)
    ern = EpisodeRng(seed)
    eseed = ern.seed
    n_out = config.team_size - 1
    views_a = _team_views(state, TEAM_A, n_out)
    views_b = _team_views(state, TEAM_B, n_out)
    rngs = [StreamRng(eseed) for _ in range(2 * n_out)]
    events: list[StepEvent] = []
    while not state.done:
        t = state.step_count
        bx, by = state.ball_x, state.ball_y
        car = state.carrier
        srs = state.shot_range_steps
        actions = []
        for i in range(n_out):
            o = views_a[i]
            o.ball_x = bx
            o.ball_y = by
            o.carrier = car
            o.step_count = t
            o.shot_range_steps = srs
            r = rngs[i]
            r.reset(t, RULE_AGENT_BASE + i)
            actions.append(fa(o, r))
        for i in range(n_out):
            o = views_b[i]
            o.ball_x = bx
            o.ball_y = by
            o.carrier = car
            o.step_count = t
            o.shot_range_steps = srs
            r = rngs[n_out + i]
            r.reset(t, RULE_AGENT_BASE + 32 + i)
            actions.append(fb(o, r))
        ev = step_inplace(state, actions, ern, config)
        if ev is not None:
            events.append(ev)
    return RolloutOutcome(state.scorer, state.step_count, events)


def value(outcome: RolloutOutcome, perspective: int) -> int:
    """+1 if the perspective team scored, -1 if its opponent did, else 0."""
    if outcome.scorer is None:
        return 0
    return 1 if outcome.scorer == perspective else -1


def estimate_regret(level, ref, target, repeats: int = 4, base_seed: int = 0,
                    config: MatchConfig | None = None, policy_index: int = 0) -> RegretEstimate:
    """Cross-play minus self-play value, each averaged over `repeats` episodes.

    Cross-play puts the reference on team A against the target; self-play is
    target vs target. Episode seeds derive from (base_seed, phase, repeat)."""
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    cfg = config if config is not None else MatchConfig()
    seeds = []
    xp_total = 0
    sp_total = 0
    for r in range(repeats):
        s = derive_episode_seed(base_seed, PHASE_XP, r)
        seeds.append(s)
        xp_total += value(play_episode(level, ref, target, s, cfg), TEAM_A)
    for r in range(repeats):
        s = derive_episode_seed(base_seed, PHASE_SP, r)
        seeds.append(s)
        sp_total += value(play_episode(level, target, target, s, cfg), TEAM_A)
    xp_mean = xp_total / repeats
    sp_mean = sp_total / repeats
    return RegretEstimate(np.asarray(level, dtype=float), policy_index,
                          xp_mean, sp_mean, xp_mean - sp_mean, repeats, seeds)


def scoring_rate(estimates: list[RegretEstimate]) -> float:
    """Fraction of estimates where the reference scored on average (xp_mean > 0)."""
    if not estimates:
        raise ValueError("scoring_rate needs a non-empty list of estimates")
    return sum(1 for e in estimates if e.xp_mean > 0) / len(estimates)


def trace_episode(level, team_a, team_b, seed: int, config: MatchConfig) -> dict:
    """Like play_episode, but records every step for replay export."""
    fa = _action_fn(team_a)
    fb = _action_fn(team_b)
    state = reset(level, config)
    ern = EpisodeRng(seed)
    eseed = ern.seed
    n_out = config.team_size - 1
    steps = []
    while not state.done:
        t = state.step_count
        record = {
            "t": t,
            "team_a": [[state.ax[i], state.ay[i]] for i in range(config.team_size)],
            "team_b": [[state.bx[i], state.by[i]] for i in range(config.team_size)],
            "ball": [state.ball_x, state.ball_y],
            "carrier": list(state.carrier) if state.carrier is not None else None,
        }
        actions = [
            fa(observe(state, TEAM_A, i), StreamRng(eseed, t, RULE_AGENT_BASE + i))
            for i in range(n_out)
        ]
        actions += [
            fb(observe(state, TEAM_B, i), StreamRng(eseed, t, RULE_AGENT_BASE + 32 + i))
            for i in range(n_out)
        ]
        ev = step_inplace(state, actions, ern, config)
        record["actions"] = actions
        record["event"] = None if ev is None else {
            "kind": ev.kind, "team": ev.team, "own_goal": ev.own_goal,
        }
        steps.append(record)
    scorer = {None: None, TEAM_A: "team_a", TEAM_B: "team_b"}[state.scorer]
    return {"seed": seed, "steps": steps,
            "outcome": {"scorer": scorer, "end_step": state.step_count}}
