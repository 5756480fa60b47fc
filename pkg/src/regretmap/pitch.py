"""MiniPitch: a desk-scale two-team football engine.

The game is deliberately small: K players per side (index K-1 is an
engine-controlled goalkeeper), 11 discrete actions, straight-line ball
flight, and a short fixed horizon. Team 0 attacks the +x goal, team 1 the
-x goal. All rules below are the documented rulebook; there is no physics
beyond them.

Rulebook summary
----------------
movement   off-ball 0.02/step, carrier 0.015/step, 8 compass directions,
           positions clamped to the field.
possession a free ball within 0.03 of a player attaches to the nearest
           such player (ties: team 0 first, lowest index).
pass       ball leaves the carrier at 0.06/step toward the position of the
           nearest teammate strictly ahead (toward the opponent goal),
           else the nearest teammate. While in flight, if any opponent is
           within 0.025 of the ball, one coin flip per step (p=0.5) gives
           the first such opponent the ball.
shot       ball flies at 0.08/step toward a point drawn uniformly in the
           mouth of the goal NEAREST the release point (ties: attacking
           goal); a deep defensive shot therefore flies at one's own goal.
           On-target with probability clamp(1 - 0.5*d, 0.1, 1.0) where d is
           the distance to that goal line; off-target aims one mouth
           half-height outside the drawn point and exits play.
keeper     pinned to x = -+0.95; its y steps toward the ball y at
           0.04/step, clamped to |y| <= 0.12. It blocks a shot if within
           0.06 (in y) of the ball when the ball crosses its x plane, and
           passes the ball away on the step after gaining it. Shots
           released beyond its plane cannot be blocked.
goal       ball reaching x = -+1 with |y| <= 0.10 scores for the team
           attacking that goal (an own goal if the shooter defends it).
offside    checked at pass release: receiver in the opponent half, nearer
           the opponent goal line than both the ball and the second-last
           opponent. Sanction: free kick where the receiver stood, taken
           by the nearest opponent (no episode end).
restarts   out-of-play balls are re-placed in bounds and possession goes
           to the nearest player. Free-kick/restart takers walk to the
           ball; if the nearest player is a keeper, the ball goes to the
           keeper instead so keepers never leave their line.

Every stochastic rule draws from a stream keyed by (episode seed, step,
rule id); see rng.StreamRng.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .levels import FIELD_X, FIELD_Y, FieldSpec, genotype_length
from .rng import EpisodeRng

TEAM_A = 0
TEAM_B = 1

# Action set: idle, 8 compass moves, pass, shoot.
ACT_IDLE = 0
ACT_PASS = 9
ACT_SHOOT = 10
N_ACTIONS = 11

_SQ2 = math.sqrt(0.5)
# Move actions 1..8 at 45-degree spacing, counterclockwise from east.
DIR_X = (1.0, _SQ2, 0.0, -_SQ2, -1.0, -_SQ2, 0.0, _SQ2)
DIR_Y = (0.0, _SQ2, 1.0, _SQ2, 0.0, -_SQ2, -1.0, -_SQ2)

# Rule ids for keyed random streams.
RULE_SHOT = 1
RULE_INTERCEPT = 2
RULE_AGENT_BASE = 16  # + team * 32 + player index


@dataclass(frozen=True)
class MatchConfig:
    episode_length: int = 128
    offsides_enabled: bool = True
    end_on_score: bool = True
    end_on_out_of_play: bool = False
    end_on_possession_change: bool = False
    move_speed: float = 0.02
    carrier_speed: float = 0.015
    pass_speed: float = 0.06
    shot_speed: float = 0.08
    capture_radius: float = 0.03
    intercept_radius: float = 0.025
    keeper_block_radius: float = 0.06
    keeper_track_speed: float = 0.04
    keeper_y_limit: float = 0.12
    shot_range_distance: float = 0.25
    team_size: int = 5
    field: FieldSpec = field(default_factory=FieldSpec)

    def __post_init__(self):
        for name in ("move_speed", "carrier_speed", "pass_speed", "shot_speed",
                     "capture_radius", "intercept_radius", "keeper_block_radius",
                     "keeper_track_speed", "keeper_y_limit", "shot_range_distance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.episode_length < 1:
            raise ValueError("episode_length must be >= 1")
        if self.team_size < 2:
            raise ValueError("team_size must be >= 2")


@dataclass
class StepEvent:
    kind: str  # none | goal | offside | interception | out_of_play
    team: int | None = None  # goal: scorer; offside: offending (passing) team
    own_goal: bool = False
    step: int = 0


class BallFlight:
    """A ball in straight-line flight toward a fixed target point."""

    __slots__ = ("kind", "team", "tx", "ty", "on_target")

    def __init__(self, kind: str, team: int, tx: float, ty: float, on_target: bool = True):
        self.kind = kind  # "pass" | "shot"
        self.team = team
        self.tx = tx
        self.ty = ty
        self.on_target = on_target


class MatchState:
    """Mutable match situation. `step` returns an updated copy; the engine's
    internal loop advances a state in place via `step_inplace`."""

    __slots__ = ("ax", "ay", "bx", "by", "ball_x", "ball_y", "carrier", "flight",
                 "step_count", "shot_range_steps", "scorer", "done")

    def __init__(self, ax, ay, bx, by, ball_x, ball_y, carrier=None, flight=None,
                 step_count=0, shot_range_steps=0, scorer=None, done=False):
        self.ax = ax
        self.ay = ay
        self.bx = bx
        self.by = by
        self.ball_x = ball_x
        self.ball_y = ball_y
        self.carrier = carrier  # (team, index) | None
        self.flight = flight
        self.step_count = step_count
        self.shot_range_steps = shot_range_steps
        self.scorer = scorer  # TEAM_A | TEAM_B | None
        self.done = done

    def copy(self) -> "MatchState":
        return MatchState(self.ax[:], self.ay[:], self.bx[:], self.by[:],
                          self.ball_x, self.ball_y, self.carrier, self.flight,
                          self.step_count, self.shot_range_steps, self.scorer, self.done)

    def positions(self, team: int) -> list[tuple[float, float]]:
        if team == TEAM_A:
            return list(zip(self.ax, self.ay))
        return list(zip(self.bx, self.by))


def attack_sign(team: int) -> float:
    return 1.0 if team == TEAM_A else -1.0


def reset(level: np.ndarray, config: MatchConfig) -> MatchState:
    """Place outfield players and the ball from the genotype.

    First K-1 coordinate pairs are team A, next K-1 team B, last the ball.
    Keepers sit at (-+keeper_home_x, 0). The nearest player within the
    capture radius starts with the ball; otherwise the ball is free.
    """
    k = config.team_size
    level = np.asarray(level, dtype=float)
    want = genotype_length(k)
    if level.ndim != 1 or level.size != want:
        raise ValueError(f"genotype must have length {want} for team_size {k}, got {level.size}")
    if not np.all(np.isfinite(level)):
        raise ValueError("genotype coordinates must be finite")

    xlo, xhi = FIELD_X
    ylo, yhi = FIELD_Y
    n_out = k - 1

    def pair(i: int) -> tuple[float, float]:
        x = min(max(float(level[2 * i]), xlo), xhi)
        y = min(max(float(level[2 * i + 1]), ylo), yhi)
        return x, y

    ax = [0.0] * k
    ay = [0.0] * k
    bx = [0.0] * k
    by = [0.0] * k
    for i in range(n_out):
        ax[i], ay[i] = pair(i)
        bx[i], by[i] = pair(n_out + i)
    ax[k - 1], ay[k - 1] = -config.field.keeper_home_x, 0.0
    bx[k - 1], by[k - 1] = config.field.keeper_home_x, 0.0
    ball_x, ball_y = pair(2 * n_out)

    state = MatchState(ax, ay, bx, by, ball_x, ball_y)
    _capture_free_ball(state, config)
    return state


def _capture_free_ball(s: MatchState, cfg: MatchConfig) -> None:
    """Attach a free ball to the nearest player within the capture radius.

    Ties break to team A first, then lowest index."""
    r2 = cfg.capture_radius * cfg.capture_radius
    best = math.inf
    who = (TEAM_A, 0)
    bx, by = s.ball_x, s.ball_y
    for team, xs, ys in ((TEAM_A, s.ax, s.ay), (TEAM_B, s.bx, s.by)):
        for i in range(len(xs)):
            dx = xs[i] - bx
            dy = ys[i] - by
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
                who = (team, i)
    if best <= r2:
        s.carrier = who
        xs, ys = (s.ax, s.ay) if who[0] == TEAM_A else (s.bx, s.by)
        s.ball_x = xs[who[1]]
        s.ball_y = ys[who[1]]


def pass_receiver(xs: list[float], ys: list[float], idx: int, sign: float) -> int | None:
    """Index of the nearest teammate strictly ahead, else the nearest teammate."""
    cx, cy = xs[idx], ys[idx]
    best_ahead = best_any = math.inf
    j_ahead = j_any = None
    for j in range(len(xs)):
        if j == idx:
            continue
        dx = xs[j] - cx
        dy = ys[j] - cy
        d2 = dx * dx + dy * dy
        if d2 < best_any:
            best_any = d2
            j_any = j
        if xs[j] * sign > cx * sign and d2 < best_ahead:
            best_ahead = d2
            j_ahead = j
    return j_ahead if j_ahead is not None else j_any


def is_offside(rx: float, ball_x: float, opp_xs: list[float], sign: float) -> bool:
    """Receiver offside: in the opponent half, nearer the opponent goal line
    than both the ball and the second-last opponent (all strict)."""
    adv = rx * sign
    if adv <= 0.0 or adv <= ball_x * sign:
        return False
    first = second = -math.inf
    for ox in opp_xs:
        a = ox * sign
        if a > first:
            second = first
            first = a
        elif a > second:
            second = a
    return adv > second


def _move(xs: list[float], ys: list[float], i: int, action: int, speed: float) -> None:
    d = action - 1
    x = xs[i] + DIR_X[d] * speed
    y = ys[i] + DIR_Y[d] * speed
    xlo, xhi = FIELD_X
    ylo, yhi = FIELD_Y
    xs[i] = xlo if x < xlo else (xhi if x > xhi else x)
    ys[i] = ylo if y < ylo else (yhi if y > yhi else y)


def _give_ball_at_spot(s: MatchState, team: int, keeper_idx: int, x: float, y: float) -> None:
    """Possession restart at (x, y): nearest player of `team` takes it.

    Outfield takers walk to the spot; a keeper taker pulls the ball to its
    own position instead, so keepers never leave their line."""
    xs, ys = (s.ax, s.ay) if team == TEAM_A else (s.bx, s.by)
    best = math.inf
    j = 0
    for i in range(len(xs)):
        dx = xs[i] - x
        dy = ys[i] - y
        d2 = dx * dx + dy * dy
        if d2 < best:
            best = d2
            j = i
    if j == keeper_idx:
        s.ball_x, s.ball_y = xs[j], ys[j]
    else:
        xs[j], ys[j] = x, y
        s.ball_x, s.ball_y = x, y
    s.carrier = (team, j)
    s.flight = None


def _give_ball_any_team(s: MatchState, keeper_idx: int, x: float, y: float) -> None:
    """Restart with possession to the nearest player of either team."""
    best = math.inf
    who = TEAM_A
    for team, xs, ys in ((TEAM_A, s.ax, s.ay), (TEAM_B, s.bx, s.by)):
        for i in range(len(xs)):
            dx = xs[i] - x
            dy = ys[i] - y
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
                who = team
    _give_ball_at_spot(s, who, keeper_idx, x, y)


def _release_shot(s: MatchState, team: int, cfg: MatchConfig, ern: EpisodeRng, t: int) -> None:
    gm = cfg.field.goal_mouth_half_height
    bx = s.ball_x
    if bx > 0.0:
        goal_x = 1.0
    elif bx < 0.0:
        goal_x = -1.0
    else:
        goal_x = attack_sign(team)
    stream = ern.stream(t, RULE_SHOT)
    aim = -gm + 2.0 * gm * stream.uniform()
    d = abs(goal_x - bx)
    p = 1.0 - 0.5 * d
    p = 0.1 if p < 0.1 else (1.0 if p > 1.0 else p)
    on_target = stream.uniform() < p
    ty = aim if on_target else aim + math.copysign(gm, aim)
    s.flight = BallFlight("shot", team, goal_x, ty, on_target)
    s.carrier = None


def _release_pass(s: MatchState, team: int, idx: int, cfg: MatchConfig, t: int) -> StepEvent | None:
    xs, ys = (s.ax, s.ay) if team == TEAM_A else (s.bx, s.by)
    oxs = s.bx if team == TEAM_A else s.ax
    sign = attack_sign(team)
    j = pass_receiver(xs, ys, idx, sign)
    if j is None:  # pragma: no cover - a team always has >= 1 teammate
        return None
    rx, ry = xs[j], ys[j]
    if cfg.offsides_enabled and is_offside(rx, s.ball_x, oxs, sign):
        _give_ball_at_spot(s, 1 - team, cfg.team_size - 1, rx, ry)
        return StepEvent("offside", team, step=t)
    s.flight = BallFlight("pass", team, rx, ry)
    s.carrier = None
    return None


def _advance_flight(s: MatchState, cfg: MatchConfig, ern: EpisodeRng, t: int) -> StepEvent | None:
    fl = s.flight
    bx0, by0 = s.ball_x, s.ball_y
    dx = fl.tx - bx0
    dy = fl.ty - by0
    dist = math.sqrt(dx * dx + dy * dy)
    speed = cfg.shot_speed if fl.kind == "shot" else cfg.pass_speed
    if dist <= speed:
        nx, ny = fl.tx, fl.ty
        landed = True
    else:
        f = speed / dist
        nx = bx0 + dx * f
        ny = by0 + dy * f
        landed = False

    if fl.kind == "shot":
        # keeper block when the ball crosses the defending keeper's x plane
        keeper_team = TEAM_A if fl.tx < 0.0 else TEAM_B
        kx = -cfg.field.keeper_home_x if keeper_team == TEAM_A else cfg.field.keeper_home_x
        if (kx - bx0) * (kx - nx) <= 0.0 and bx0 != nx:
            ycross = by0 + (ny - by0) * (kx - bx0) / (nx - bx0)
            ky = s.ay[cfg.team_size - 1] if keeper_team == TEAM_A else s.by[cfg.team_size - 1]
            if abs(ycross - ky) <= cfg.keeper_block_radius:
                s.ball_x, s.ball_y = kx, ky
                s.carrier = (keeper_team, cfg.team_size - 1)
                s.flight = None
                return None

    s.ball_x, s.ball_y = nx, ny
    if fl.kind == "pass" and not landed:
        oxs, oys = (s.bx, s.by) if fl.team == TEAM_A else (s.ax, s.ay)
        r2 = cfg.intercept_radius * cfg.intercept_radius
        threat = -1
        for i in range(len(oxs)):
            ddx = oxs[i] - nx
            ddy = oys[i] - ny
            if ddx * ddx + ddy * ddy <= r2:
                threat = i
                break
        if threat >= 0 and ern.stream(t, RULE_INTERCEPT).uniform() < 0.5:
            opp = 1 - fl.team
            xs, ys = (s.ax, s.ay) if opp == TEAM_A else (s.bx, s.by)
            s.ball_x, s.ball_y = xs[threat], ys[threat]
            s.carrier = (opp, threat)
            s.flight = None
            return StepEvent("interception", opp, step=t)
        return None

    if not landed:
        return None

    if fl.kind == "pass":
        s.flight = None  # ball free at the target point
        return None

    # shot landing on the goal line: goal or out of play
    gm = cfg.field.goal_mouth_half_height
    if abs(fl.ty) <= gm and fl.on_target:
        scorer = TEAM_A if fl.tx > 0.0 else TEAM_B
        s.scorer = s.scorer if s.scorer is not None else scorer
        s.flight = None
        if cfg.end_on_score:
            s.done = True
        else:
            s.ball_x = s.ball_y = 0.0
            s.carrier = None
        return StepEvent("goal", scorer, own_goal=(scorer != fl.team), step=t)

    # off target (or aimed outside the mouth): ball leaves play
    x = min(max(fl.tx, FIELD_X[0]), FIELD_X[1])
    y = min(max(fl.ty, FIELD_Y[0]), FIELD_Y[1])
    s.flight = None
    ev = StepEvent("out_of_play", step=t)
    if cfg.end_on_out_of_play:
        s.done = True
        s.ball_x, s.ball_y = x, y
        s.carrier = None
        return ev
    _give_ball_any_team(s, cfg.team_size - 1, x, y)
    return ev


def step_inplace(s: MatchState, actions, ern: EpisodeRng, cfg: MatchConfig) -> StepEvent | None:
    """Advance one tick, mutating `s`. `actions` lists one action per outfield
    player, team A block first. Returns the step's event, None when nothing
    noteworthy happened."""
    if s.done:
        raise RuntimeError("cannot step a terminal state")
    t = s.step_count
    k = cfg.team_size
    n_out = k - 1
    event: StepEvent | None = None
    prev_carrier = s.carrier

    # 1. carrier acts first: release or move with the ball
    if s.carrier is not None:
        team, idx = s.carrier
        if idx == n_out:
            action = ACT_PASS  # keepers always clear the ball
        else:
            action = actions[team * n_out + idx]
        if action == ACT_SHOOT:
            _release_shot(s, team, cfg, ern, t)
        elif action == ACT_PASS:
            event = _release_pass(s, team, idx, cfg, t)
        elif 1 <= action <= 8:
            xs, ys = (s.ax, s.ay) if team == TEAM_A else (s.bx, s.by)
            _move(xs, ys, idx, action, cfg.carrier_speed)
            s.ball_x, s.ball_y = xs[idx], ys[idx]

    # 2. everyone else moves
    carrier = s.carrier
    for team, xs, ys in ((TEAM_A, s.ax, s.ay), (TEAM_B, s.bx, s.by)):
        base = team * n_out
        for i in range(n_out):
            if carrier is not None and carrier[0] == team and carrier[1] == i:
                continue
            a = actions[base + i]
            if 1 <= a <= 8:
                _move(xs, ys, i, a, cfg.move_speed)

    # 3. keepers track the ball's y at limited speed
    lim = cfg.keeper_y_limit
    want = s.ball_y
    want = -lim if want < -lim else (lim if want > lim else want)
    for ys in (s.ay, s.by):
        ky = ys[n_out]
        dy = want - ky
        v = cfg.keeper_track_speed
        ys[n_out] = want if abs(dy) <= v else ky + math.copysign(v, dy)

    # 4. ball resolution
    if s.carrier is not None:
        team, idx = s.carrier
        xs, ys = (s.ax, s.ay) if team == TEAM_A else (s.bx, s.by)
        s.ball_x, s.ball_y = xs[idx], ys[idx]
    elif s.flight is not None:
        ev = _advance_flight(s, cfg, ern, t)
        if ev is not None:
            event = ev

    # 5. free-ball capture
    if not s.done and s.carrier is None and s.flight is None:
        _capture_free_ball(s, cfg)

    # 6. bookkeeping and termination
    if cfg.end_on_possession_change and prev_carrier is not None and s.carrier is not None \
            and s.carrier[0] != prev_carrier[0]:
        s.done = True
    s.step_count = t + 1
    if s.carrier is None:
        s.shot_range_steps = 0
    else:
        team, idx = s.carrier
        cx = s.ax[idx] if team == TEAM_A else s.bx[idx]
        in_range = (1.0 - cx * attack_sign(team)) <= cfg.shot_range_distance
        if not in_range:
            s.shot_range_steps = 0
        elif prev_carrier == s.carrier:
            s.shot_range_steps += 1
        else:
            s.shot_range_steps = 1
    if not s.done and s.step_count >= cfg.episode_length:
        s.done = True
    return event


def step(state: MatchState, actions, rng: EpisodeRng, config: MatchConfig) -> tuple[MatchState, StepEvent]:
    """Pure-value step: returns an advanced copy and the step's event."""
    n_out = config.team_size - 1
    if len(actions) != 2 * n_out:
        raise ValueError(f"expected {2 * n_out} actions, got {len(actions)}")
    for a in actions:
        if not 0 <= a < N_ACTIONS:
            raise ValueError(f"action {a} out of range [0, {N_ACTIONS})")
    nxt = state.copy()
    ev = step_inplace(nxt, actions, rng, config)
    return nxt, ev if ev is not None else StepEvent("none", step=state.step_count)
