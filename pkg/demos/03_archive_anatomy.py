"""The elitist archive in isolation: insertion semantics and QD metrics."""

import numpy as np

from regretmap import Archive, Elite, GridSpec, cell_index

spec = GridSpec(policy_count=1)  # 16 x 10 over the pitch
archive = Archive(spec)


def elite_at(x, y, regret):
    level = np.zeros(18)
    level[-2:] = (x, y)
    return Elite(level, regret, regret, 0.0, (x, y), 0, eval_seed=0, iteration_found=0)


print("cell for the kickoff spot:", cell_index((0.0, 0.0), spec, 0))

print(archive.try_insert(elite_at(0.0, 0.0, 0.25)).status.value, "<- empty cell")
print(archive.try_insert(elite_at(0.0, 0.0, 0.75)).status.value, "<- strict improvement")
print(archive.try_insert(elite_at(0.0, 0.0, 0.75)).status.value, "<- tie loses")

rng = np.random.default_rng(1)
for _ in range(500):
    archive.try_insert(elite_at(rng.uniform(-1, 1), rng.uniform(-0.42, 0.42),
                                float(rng.integers(-8, 9)) / 4))

print(f"after 500 random inserts: {len(archive)} occupied cells, "
      f"coverage {archive.coverage():.2f}, qd score {archive.qd_score():.1f}")
print("uniform elite sample:", archive.sample_uniform(rng).descriptor)
