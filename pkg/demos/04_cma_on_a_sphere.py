"""Sanity-check the CMA machinery on a known landscape.

Swapping regret for -||x - x*||^2 turns the improvement emitter into plain
CMA-ES; its mean must march to x*.
"""

import numpy as np

from regretmap import CmaMeEmitter, InsertOutcome, InsertStatus, RankedCandidate
from regretmap.emitters import rank_candidates

dim = 18
target = np.full(dim, 0.3)
emitter = CmaMeEmitter(dim, sigma0=0.1)
emitter.mean = np.zeros(dim)
emitter._decompose()
rng = np.random.default_rng(0)

for gen in range(500):
    batch = emitter.ask(rng)
    ranked = rank_candidates([
        RankedCandidate(g, 0.0, InsertOutcome(InsertStatus.IMPROVED, 0.0),
                        -float(np.sum((g - target) ** 2)), i)
        for i, g in enumerate(batch)
    ])
    emitter.tell(ranked, None, rng)
    dist = float(np.linalg.norm(emitter.mean - target))
    if gen % 20 == 0 or dist <= 1e-3:
        print(f"gen {gen:3d}: |mean - x*| = {dist:.2e}  sigma = {emitter.sigma:.2e}")
    if dist <= 1e-3:
        print("converged")
        break
