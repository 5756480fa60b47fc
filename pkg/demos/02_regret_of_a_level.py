"""Estimate the regret of hand-built levels.

Regret = mean cross-play value (reference vs target) minus mean self-play
value (target vs target). A deep-corner level that pressures the target into
its own-goal flaw shows a large positive regret; a random level sits near 0.
"""

import numpy as np

from regretmap import (MatchConfig, build_reference_ladder, estimate_regret,
                       make_target, random_level)

config = MatchConfig()
reference = build_reference_ladder()[7]  # strongest ladder rung
target = make_target()

# team A outfield (4 pairs), team B outfield (4 pairs), then the ball:
# the target's deepest defender holds the ball behind its own keeper's
# plane with an opponent breathing down its neck
trap = np.array([
    -0.97, 0.25,   # A0, carrier, deep in its own corner
    -0.30, 0.10, -0.20, -0.20, 0.10, 0.00,
    -0.95, 0.23,   # B0 applies the pressure
    -0.50, -0.10, 0.30, 0.20, 0.60, -0.10,
    -0.97, 0.25,   # ball at A0
])

est = estimate_regret(trap, reference, target, repeats=4, base_seed=99, config=config)
print("own-goal trap level:")
print(f"  cross-play mean {est.xp_mean:+.2f}, self-play mean {est.sp_mean:+.2f}"
      f" -> regret {est.regret:+.2f}")

rng = np.random.default_rng(0)
rs = [estimate_regret(random_level(rng), reference, target, 4, i, config).regret
      for i in range(20)]
print(f"20 random levels: mean regret {np.mean(rs):+.3f} (min {min(rs):+.2f}, "
      f"max {max(rs):+.2f})")
