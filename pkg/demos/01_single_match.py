"""Walk through one MiniPitch episode step by step.

Builds a random level, pits a strong reference policy against the flawed
target, and prints the events as they happen.
"""

import numpy as np

from regretmap import (MatchConfig, TEAM_A, build_reference_ladder, make_target,
                       play_episode, random_level, value)

config = MatchConfig()
rng = np.random.default_rng(4)
level = random_level(rng)

references = build_reference_ladder()
reference = references[-1]  # bot_hard
target = make_target()

print(f"level ball position: ({level[-2]:+.3f}, {level[-1]:+.3f})")
print(f"{reference.id} (attacking +x) vs {target.id} ({len(target.flaws)} flaws)")

outcome = play_episode(level, reference, target, seed=2024, config=config)

for event in outcome.events:
    extra = " (own goal!)" if event.own_goal else ""
    team = {0: "team A", 1: "team B", None: "-"}[event.team]
    print(f"  step {event.step:3d}: {event.kind} {team}{extra}")

scorer = {0: "team A", 1: "team B", None: "nobody"}[outcome.scorer]
print(f"after {outcome.end_step} steps: {scorer} scored; "
      f"value for {reference.id}: {value(outcome, TEAM_A):+d}")
