"""Shared stub policies and levels for the evaluation and acceptance tests."""

import numpy as np

from regretmap.pitch import ACT_IDLE, ACT_SHOOT, TEAM_A


def idle_policy(obs, rng):
    return ACT_IDLE


def line_scorer(obs, rng):
    """Carrier walks to the opponent goal line and shoots point blank."""
    if obs.carrier == (obs.team, obs.index):
        if obs.attack_sign * obs.team_x[obs.index] >= 0.999:
            return ACT_SHOOT
        return 1 if obs.attack_sign > 0 else 5
    return ACT_IDLE


def deep_clearance(obs, rng):
    """As team A, walks the ball deep and fires one panic shot at its own
    goal (on target with p=0.965); all other agents idle."""
    if obs.team == TEAM_A and obs.index == 0 and obs.carrier == (TEAM_A, 0):
        if obs.team_x[0] <= -0.929:
            return ACT_SHOOT
        return 5
    return ACT_IDLE


# A0 holds the ball at (-0.3, 0.3); A1 sits where it collects keeper
# clearances so a missed deep shot never returns to the shooter.
STUB_LEVEL = np.array([
    -0.3, 0.3, -0.85, 0.0, 0.2, -0.3, 0.5, 0.2,
    0.7, 0.3, 0.7, -0.3, 0.4, 0.35, 0.4, -0.35,
    -0.3, 0.3,
])
