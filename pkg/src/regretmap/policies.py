"""Scripted decentralized policies: a skill ladder, heuristic bots, and a
strong target with implanted, individually toggleable flaws.

All policies share one deterministic decision skeleton:

  carrier   advance toward the goal centre; once within shooting range move
            into the centre corridor and shoot; pass when pressured (but
            never to an offside receiver).
  off-ball  attack: hold your lane a little ahead of the ball.
            defence: the nearest defender closes down the carrier aiming at
            its projected position; the others mark goal-side of their
            nearest opponent; with a free ball the nearest teammate chases.

A policy of skill s plays the skeleton, except that with probability 1-s
each step it substitutes a uniformly random action. Bots additionally pass
to better-positioned teammates even when unpressured. The target (skill 1)
carries flaw flags, each a trigger -> override rule documented below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .pitch import (ACT_IDLE, ACT_PASS, ACT_SHOOT, N_ACTIONS, TEAM_A, MatchState,
                    attack_sign, is_offside, pass_receiver)
from .rng import StreamRng

# Flaw flags. Triggers and overrides:
#   blind_pass        pass when pressured even if the receiver is offside
#   own_goal_zone     pressured deep in own half (x*sign < -0.7): shoot
#                     (the engine aims a deep shot at the nearer, own, goal)
#   narrow_angle_shot shoot anywhere within range, skipping the centre corridor
#   sprint_only_defense close down at the carrier's current position instead
#                     of its projected position
#   hesitation        delay the shot until 3 full steps inside shooting range
FLAW_BLIND_PASS = "blind_pass"
FLAW_OWN_GOAL_ZONE = "own_goal_zone"
FLAW_NARROW_ANGLE_SHOT = "narrow_angle_shot"
FLAW_SPRINT_ONLY_DEFENSE = "sprint_only_defense"
FLAW_HESITATION = "hesitation"
ALL_FLAWS = frozenset({FLAW_BLIND_PASS, FLAW_OWN_GOAL_ZONE, FLAW_NARROW_ANGLE_SHOT,
                       FLAW_SPRINT_ONLY_DEFENSE, FLAW_HESITATION})

BOT_KINDS = ("bot_easy", "bot_medium", "bot_hard")
BOT_SKILLS = (0.05, 0.5, 0.95)

# Skeleton constants.
SHOT_RANGE = 0.25          # distance to opponent goal line that allows a shot
CENTER_CORRIDOR = 0.08     # |y| band considered a good shooting angle
PRESSURE_RADIUS = 0.05     # opponent this close forces a decision
OWN_ZONE_X = 0.7           # own-half depth that triggers the panic-shot flaw
HESITATION_STEPS = 3
BOT_PASS_GAIN = 0.10       # how much closer to goal a receiver must be for bots
DEFENSE_LEAD = 0.10        # closing-down aim point lead toward own goal
MARK_OFFSET = 0.08         # goal-side marking distance
SUPPORT_LEAD = 0.15        # how far ahead of the ball attackers position


@dataclass(frozen=True)
class PolicySpec:
    """Immutable description of one scripted policy."""

    kind: str  # ladder | bot_easy | bot_medium | bot_hard | target
    skill: float
    id: str
    flaws: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not 0.0 <= self.skill <= 1.0:
            raise ValueError(f"skill must be in [0, 1], got {self.skill}")
        unknown = self.flaws - ALL_FLAWS
        if unknown:
            raise ValueError(f"unknown flaw flags: {sorted(unknown)}")


class Observation:
    """One agent's view of the match. Fully observable: the fields reference
    the live state lists, so read them before stepping the engine."""

    __slots__ = ("team", "index", "team_x", "team_y", "opp_x", "opp_y",
                 "ball_x", "ball_y", "carrier", "step_count", "attack_sign",
                 "shot_range_steps", "keeper_index")

    def __init__(self, team, index, team_x, team_y, opp_x, opp_y, ball_x, ball_y,
                 carrier, step_count, attack_sign, shot_range_steps, keeper_index):
        self.team = team
        self.index = index
        self.team_x = team_x
        self.team_y = team_y
        self.opp_x = opp_x
        self.opp_y = opp_y
        self.ball_x = ball_x
        self.ball_y = ball_y
        self.carrier = carrier
        self.step_count = step_count
        self.attack_sign = attack_sign
        self.shot_range_steps = shot_range_steps
        self.keeper_index = keeper_index


def observe(state: MatchState, team: int, index: int) -> Observation:
    if team == TEAM_A:
        tx, ty, ox, oy = state.ax, state.ay, state.bx, state.by
    else:
        tx, ty, ox, oy = state.bx, state.by, state.ax, state.ay
    return Observation(team, index, tx, ty, ox, oy, state.ball_x, state.ball_y,
                       state.carrier, state.step_count, attack_sign(team),
                       state.shot_range_steps, len(tx) - 1)


def build_reference_ladder(n_ladder: int = 8, include_bots: bool = True) -> list[PolicySpec]:
    """Reference roster: n_ladder skill rungs evenly spaced in (0, 1), plus
    the three heuristic bots when requested."""
    if n_ladder < 1:
        raise ValueError(f"n_ladder must be >= 1, got {n_ladder}")
    refs = [PolicySpec("ladder", (i + 1) / (n_ladder + 1), f"ladder{i + 1:02d}")
            for i in range(n_ladder)]
    if include_bots:
        refs += [PolicySpec(kind, skill, kind) for kind, skill in zip(BOT_KINDS, BOT_SKILLS)]
    return refs


def make_target(flaws: frozenset[str] = ALL_FLAWS) -> PolicySpec:
    return PolicySpec("target", 1.0, "target", frozenset(flaws))


_TAN_22_5 = 0.41421356237309503


def _toward(x: float, y: float, tx: float, ty: float) -> int:
    """Compass move action toward (tx, ty); idle when already there."""
    dx = tx - x
    dy = ty - y
    adx = -dx if dx < 0.0 else dx
    ady = -dy if dy < 0.0 else dy
    if ady <= _TAN_22_5 * adx:
        if adx == 0.0:
            return ACT_IDLE
        return 1 if dx > 0.0 else 5  # E / W
    if adx <= _TAN_22_5 * ady:
        return 3 if dy > 0.0 else 7  # N / S
    if dx > 0.0:
        return 2 if dy > 0.0 else 8  # NE / SE
    return 4 if dy > 0.0 else 6  # NW / SW


def _nearest_opponent_d2(obs: Observation, x: float, y: float) -> float:
    best = math.inf
    ox, oy = obs.opp_x, obs.opp_y
    for i in range(len(ox)):
        dx = ox[i] - x
        dy = oy[i] - y
        d2 = dx * dx + dy * dy
        if d2 < best:
            best = d2
    return best


def _carrier_action(spec: PolicySpec, obs: Observation) -> int:
    sign = obs.attack_sign
    x = obs.team_x[obs.index]
    y = obs.team_y[obs.index]
    flaws = spec.flaws
    pressured = _nearest_opponent_d2(obs, x, y) <= PRESSURE_RADIUS * PRESSURE_RADIUS

    if FLAW_OWN_GOAL_ZONE in flaws and x * sign < -OWN_ZONE_X and pressured:
        return ACT_SHOOT  # panic clearance; deep shots fly at the own goal

    if 1.0 - x * sign <= SHOT_RANGE:
        if FLAW_NARROW_ANGLE_SHOT in flaws or abs(y) <= CENTER_CORRIDOR:
            if FLAW_HESITATION in flaws and obs.shot_range_steps < HESITATION_STEPS:
                return _pass_or_hold(spec, obs, x, y, sign, pressured, hold=ACT_IDLE)
            return ACT_SHOOT
        return _toward(x, y, sign, 0.0)  # work into the centre corridor first

    if spec.kind in BOT_KINDS:
        j = pass_receiver(obs.team_x, obs.team_y, obs.index, sign)
        if j is not None and j != obs.keeper_index:
            gain = (1.0 - x * sign) - (1.0 - obs.team_x[j] * sign)
            if gain >= BOT_PASS_GAIN and not is_offside(obs.team_x[j], obs.ball_x, obs.opp_x, sign):
                return ACT_PASS

    if pressured:
        return _pass_or_hold(spec, obs, x, y, sign, pressured, hold=_toward(x, y, sign, 0.0))
    return _toward(x, y, sign, 0.0)


def _pass_or_hold(spec: PolicySpec, obs: Observation, x: float, y: float,
                  sign: float, pressured: bool, hold: int) -> int:
    if not pressured:
        return hold
    j = pass_receiver(obs.team_x, obs.team_y, obs.index, sign)
    if j is None:
        return hold
    if FLAW_BLIND_PASS in spec.flaws or not is_offside(obs.team_x[j], obs.ball_x, obs.opp_x, sign):
        return ACT_PASS
    return hold


def _defense_action(spec: PolicySpec, obs: Observation, chase_x: float, chase_y: float,
                    closing: bool) -> int:
    sign = obs.attack_sign
    x = obs.team_x[obs.index]
    y = obs.team_y[obs.index]
    own_goal_x = -sign
    if closing:
        if FLAW_SPRINT_ONLY_DEFENSE in spec.flaws:
            return _toward(x, y, chase_x, chase_y)
        # aim where the carrier is heading: between it and our goal
        dx = own_goal_x - chase_x
        dy = 0.0 - chase_y
        n = math.sqrt(dx * dx + dy * dy)
        if n < 1e-9:
            return _toward(x, y, chase_x, chase_y)
        return _toward(x, y, chase_x + DEFENSE_LEAD * dx / n, chase_y + DEFENSE_LEAD * dy / n)
    # mark the nearest opponent, goal-side
    ox = obs.opp_x
    oy = obs.opp_y
    best = math.inf
    mx = my = 0.0
    for i in range(len(ox)):
        dx = ox[i] - x
        dy = oy[i] - y
        d2 = dx * dx + dy * dy
        if d2 < best:
            best = d2
            mx = ox[i]
            my = oy[i]
    dx = own_goal_x - mx
    dy = 0.0 - my
    n = math.sqrt(dx * dx + dy * dy)
    if n < 1e-9:
        return _toward(x, y, mx, my)
    return _toward(x, y, mx + MARK_OFFSET * dx / n, my + MARK_OFFSET * dy / n)


def _am_nearest_outfield(obs: Observation, x: float, y: float) -> bool:
    """Is this agent its team's nearest outfield player to (x, y)? Ties break
    to the lowest index."""
    me = obs.index
    dxm = obs.team_x[me] - x
    dym = obs.team_y[me] - y
    mine = dxm * dxm + dym * dym
    for i in range(obs.keeper_index):
        if i == me:
            continue
        dx = obs.team_x[i] - x
        dy = obs.team_y[i] - y
        d2 = dx * dx + dy * dy
        if d2 < mine or (d2 == mine and i < me):
            return False
    return True


def _skeleton(spec: PolicySpec, obs: Observation) -> int:
    carrier = obs.carrier
    if carrier is not None and carrier[0] == obs.team:
        if carrier[1] == obs.index:
            return _carrier_action(spec, obs)
        # support: hold the lane slightly ahead of the ball
        x = obs.team_x[obs.index]
        y = obs.team_y[obs.index]
        return _toward(x, y, obs.ball_x + obs.attack_sign * SUPPORT_LEAD, y)
    x = obs.team_x[obs.index]
    y = obs.team_y[obs.index]
    if carrier is None:
        if _am_nearest_outfield(obs, obs.ball_x, obs.ball_y):
            return _toward(x, y, obs.ball_x, obs.ball_y)
        return _defense_action(spec, obs, obs.ball_x, obs.ball_y, closing=False)
    cx = obs.opp_x[carrier[1]]
    cy = obs.opp_y[carrier[1]]
    return _defense_action(spec, obs, cx, cy, closing=_am_nearest_outfield(obs, cx, cy))


def act(spec: PolicySpec, obs: Observation, rng: StreamRng) -> int:
    """One agent's action: the skeleton, randomized by (1 - skill)."""
    if rng.uniform() < 1.0 - spec.skill:
        return rng.randrange(N_ACTIONS)
    return _skeleton(spec, obs)
