"""A small end-to-end search run with heatmap export.

Two hundred iterations against a two-rung ladder: enough to watch the
archive's mean regret climb and to export per-policy heatmaps. The CLI verbs
`run`, `report`, and `replay` wrap exactly this flow for full-size runs.
"""

import os

from regretmap import LadderConfig, SearchConfig, run_search
from regretmap.io import format_heatmap, save_result

config = SearchConfig(
    mode="madrid_cmame",
    iterations=200,
    emitters=1,
    seed=7,
    ladder=LadderConfig(n_ladder=2, include_bots=False),
    metrics_stride=40,
)

result = run_search(config)

for record in result.metrics:
    print(f"iter {record.iteration:4d}: mean regret {record.mean_archive_regret:+.4f} "
          f"coverage {record.coverage:.3f}  qd {record.qd_score:7.1f}")

print("\nper-policy final mean regret:")
for ref, regret in zip(result.references, result.per_policy_mean_regret):
    print(f"  {ref.id} (skill {ref.skill:.2f}): {regret:+.4f}")

out = "demo_run"
save_result(result, out)
print(f"\nresult files in {out}/:", sorted(os.listdir(out)))

best = max(result.archive.cells.values(), key=lambda e: e.regret)
print(f"best cell: regret {best.regret:+.2f} at ball "
      f"({best.descriptor[0]:+.2f}, {best.descriptor[1]:+.2f}) "
      f"vs {result.references[best.policy_index].id}")
print("\nheatmap for", result.references[0].id)
print(format_heatmap(result.archive, result.references, result.references[0].id))
