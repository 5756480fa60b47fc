"""Candidate-level generators with an ask/tell interface.

Two emitters produce level batches for the search loop:

* GaussianEmitter: samples one parent elite from the archive, perturbs it
  with isotropic Gaussian noise, and evaluates the batch against the
  parent's reference policy.
* CmaMeEmitter: a full CMA-ES distribution (mean, covariance, step size,
  evolution paths) adapted toward archive improvement. Each emitter serves
  one reference-policy sub-grid at a time and rotates round-robin to the
  next policy when it restarts.

Improvement ranking: a candidate's value is its regret minus the replaced
quantity (the archive offset for a new cell, the incumbent regret
otherwise), so filling empty cells dominates and rejected candidates rank
non-positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .archive import Archive, EmptyArchiveError, InsertOutcome, InsertStatus
from .levels import clamp_level, mutate_level, random_level

CONDITION_LIMIT = 1e14


def improvement_value(outcome: InsertOutcome, regret: float, offset: float) -> float:
    """Ranking value of one insertion attempt."""
    if outcome.status is InsertStatus.NEW:
        return regret - offset
    return regret - outcome.prior_regret


@dataclass
class RankedCandidate:
    genotype: np.ndarray
    regret: float
    outcome: InsertOutcome
    improvement: float
    index: int


def rank_candidates(candidates: list[RankedCandidate]) -> list[RankedCandidate]:
    """Sort by improvement descending; ties keep candidate order."""
    return sorted(candidates, key=lambda c: (-c.improvement, c.index))


def default_batch_size(dim: int) -> int:
    return 4 + int(3 * math.log(dim))


class GaussianEmitter:
    """Mutation emitter: one archive parent per batch, Gaussian noise around it."""

    def __init__(self, sigma: float = 0.1, batch_size: int = 12):
        if sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {sigma}")
        if batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {batch_size}")
        self.sigma = sigma
        self.batch_size = batch_size
        self.policy_index = 0  # adopted from the sampled parent on each ask

    def ask(self, archive: Archive, rng: np.random.Generator) -> list[np.ndarray]:
        parent = archive.sample_uniform(rng)  # raises EmptyArchiveError when empty
        self.policy_index = parent.policy_index
        return [mutate_level(parent.level, self.sigma, rng) for _ in range(self.batch_size)]

    def tell(self, ranked: list[RankedCandidate], archive: Archive,
             rng: np.random.Generator) -> None:
        pass  # stateless


class CmaMeEmitter:
    """CMA-ES sampler adapted by archive-improvement ranking.

    The update equations are the standard recurrences: weighted recombination
    of the top half, cumulative step-size adaptation, and rank-one plus
    rank-mu covariance updates. A restart re-seeds the distribution at a
    random elite of the next reference policy's sub-grid.
    """

    def __init__(self, dim: int, sigma0: float = 0.1, batch_size: int | None = None,
                 policy_index: int = 0, policy_count: int = 1):
        self.dim = dim
        self.sigma0 = sigma0
        self.batch_size = batch_size if batch_size is not None else default_batch_size(dim)
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2")
        self.policy_index = policy_index
        self.policy_count = policy_count
        self.generation = 0
        self.restarts = 0

        n = dim
        lam = self.batch_size
        self.mu = lam // 2
        weights = np.log(self.mu + 0.5) - np.log(np.arange(1, self.mu + 1))
        self.weights = weights / weights.sum()
        self.mu_eff = 1.0 / np.sum(self.weights ** 2)

        self.c_sigma = (self.mu_eff + 2) / (n + self.mu_eff + 5)
        self.d_sigma = 1 + 2 * max(0.0, math.sqrt((self.mu_eff - 1) / (n + 1)) - 1) + self.c_sigma
        self.c_c = (4 + self.mu_eff / n) / (n + 4 + 2 * self.mu_eff / n)
        self.c_1 = 2 / ((n + 1.3) ** 2 + self.mu_eff)
        self.c_mu = min(1 - self.c_1,
                        2 * (self.mu_eff - 2 + 1 / self.mu_eff) / ((n + 2) ** 2 + self.mu_eff))
        self.chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))

        self.mean = np.zeros(n)
        self._reset_distribution()

    def _reset_distribution(self) -> None:
        n = self.dim
        self.sigma = self.sigma0
        self.cov = np.eye(n)
        self.path_c = np.zeros(n)
        self.path_sigma = np.zeros(n)
        self.generation = 0
        self._decompose()

    def _decompose(self) -> None:
        self.cov = (self.cov + self.cov.T) / 2.0
        vals, vecs = np.linalg.eigh(self.cov)
        self._eigvals = vals
        self._eigvecs = vecs
        if vals[0] <= 0:
            self._sqrt_vals = None
            return
        self._sqrt_vals = np.sqrt(vals)
        self._inv_sqrt = (vecs * (1.0 / self._sqrt_vals)) @ vecs.T

    @property
    def condition_number(self) -> float:
        if self._eigvals[0] <= 0:
            return math.inf
        return float(self._eigvals[-1] / self._eigvals[0])

    def seed_from_archive(self, archive: Archive, rng: np.random.Generator) -> None:
        """Centre the distribution on a random elite of this emitter's policy
        sub-grid (falling back to the whole archive, then a random level)."""
        if archive is not None and len(archive) > 0:
            try:
                elite = archive.sample_uniform(rng, policy_index=self.policy_index)
            except EmptyArchiveError:
                elite = archive.sample_uniform(rng)
            self.mean = np.array(elite.level, dtype=float)
        else:
            self.mean = random_level(rng, team_size=(self.dim // 2 + 1) // 2)
        self.mean = clamp_level(self.mean)

    def ask(self, rng: np.random.Generator) -> list[np.ndarray]:
        """Sample batch_size genotypes from N(mean, sigma^2 C), clamped to the
        field bounds."""
        z = rng.standard_normal((self.batch_size, self.dim))
        y = (z * self._sqrt_vals) @ self._eigvecs.T
        return [clamp_level(self.mean + self.sigma * y[i]) for i in range(self.batch_size)]

    def tell(self, ranked: list[RankedCandidate], archive: Archive | None,
             rng: np.random.Generator) -> bool:
        """Consume one ranked generation (improvement-descending, length
        batch_size). Returns True when the emitter restarted."""
        if len(ranked) != self.batch_size:
            raise ValueError(f"expected {self.batch_size} ranked candidates, got {len(ranked)}")

        all_rejected = all(c.outcome.status is InsertStatus.REJECTED for c in ranked)
        if all_rejected:
            return self._restart(archive, rng)

        n = self.dim
        old_mean = self.mean
        selected = np.array([ranked[i].genotype for i in range(self.mu)], dtype=float)
        new_mean = self.weights @ selected
        y_w = (new_mean - old_mean) / self.sigma

        # cumulative step-size adaptation
        csn = math.sqrt(self.c_sigma * (2 - self.c_sigma) * self.mu_eff)
        self.path_sigma = (1 - self.c_sigma) * self.path_sigma + csn * (self._inv_sqrt @ y_w)
        self.generation += 1
        ps_norm = float(np.linalg.norm(self.path_sigma))
        expected = self.chi_n * math.sqrt(
            1 - (1 - self.c_sigma) ** (2 * self.generation))
        h_sigma = 1.0 if ps_norm < (1.4 + 2 / (n + 1)) * expected else 0.0

        ccn = math.sqrt(self.c_c * (2 - self.c_c) * self.mu_eff)
        self.path_c = (1 - self.c_c) * self.path_c + h_sigma * ccn * y_w

        # rank-one and rank-mu covariance updates
        c1a = self.c_1 * (1 - (1 - h_sigma ** 2) * self.c_c * (2 - self.c_c))
        ys = (selected - old_mean) / self.sigma
        rank_mu = (ys.T * self.weights) @ ys
        self.cov = ((1 - c1a - self.c_mu) * self.cov
                    + self.c_1 * np.outer(self.path_c, self.path_c)
                    + self.c_mu * rank_mu)

        self.sigma *= math.exp((self.c_sigma / self.d_sigma) * (ps_norm / self.chi_n - 1))

        self.mean = new_mean
        self._decompose()
        if self._sqrt_vals is None or not math.isfinite(self.sigma) \
                or self.condition_number > CONDITION_LIMIT:
            return self._restart(archive, rng)
        return False

    def _restart(self, archive: Archive | None, rng: np.random.Generator) -> bool:
        self.restarts += 1
        self.policy_index = (self.policy_index + 1) % self.policy_count
        self.seed_from_archive(archive, rng)
        self._reset_distribution()
        return True
