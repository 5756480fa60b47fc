"""The outer search loop and its two ablation baselines.

Modes:
  madrid_cmame     CMA-ME emitters evolve levels toward archive improvement.
  madrid_gaussian  plain Gaussian mutation of sampled archive elites.
  targeted         fresh random levels, elitist archive insertion.
  random           fresh random levels, unconditional cell overwrite
                   (no elitism), so its mean tracks random-level regret.

One iteration asks every emitter for a batch, estimates each candidate's
regret against the emitter's reference policy, inserts candidates in
(emitter, candidate) order, and feeds the ranked outcomes back. Candidate
evaluations are pure functions of their arguments, so they may be farmed to
a worker pool; results are combined in deterministic order and the outcome
is byte-identical for any worker count.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .archive import Archive, Elite, GridSpec
from .emitters import (CmaMeEmitter, GaussianEmitter, RankedCandidate,
                       default_batch_size, improvement_value, rank_candidates)
from .evaluation import RegretEstimate, estimate_regret
from .levels import genotype_length, level_descriptor, random_level
from .pitch import MatchConfig
from .policies import ALL_FLAWS, PolicySpec, build_reference_ladder, make_target
from .rng import mix64

MODES = ("madrid_cmame", "madrid_gaussian", "targeted", "random")

# stream tags for deriving independent generators from the search seed
_TAG_INIT_LEVEL = 1
_TAG_INIT_EVAL = 2
_TAG_ASK = 3
_TAG_EVAL = 4
_TAG_TELL = 5
_TAG_EMITTER = 6


@dataclass(frozen=True)
class LadderConfig:
    n_ladder: int = 8
    include_bots: bool = True


@dataclass(frozen=True)
class SearchConfig:
    mode: str = "madrid_cmame"
    iterations: int = 5000
    emitters: int = 4
    repeats: int = 4
    sigma: float = 0.1
    seed: int = 0
    ladder: LadderConfig = field(default_factory=LadderConfig)
    match: MatchConfig = field(default_factory=MatchConfig)
    target_flaws: frozenset[str] = ALL_FLAWS
    x_bins: int = 16
    y_bins: int = 10
    qd_offset: float = -2.0
    init_levels_per_policy: int = 16
    metrics_stride: int = 25

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.emitters < 1:
            raise ValueError("emitters must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.x_bins < 1 or self.y_bins < 1:
            raise ValueError("bin counts must be positive")
        if self.init_levels_per_policy < 1:
            raise ValueError("init_levels_per_policy must be >= 1")
        if self.metrics_stride < 1:
            raise ValueError("metrics_stride must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


@dataclass
class MetricsRecord:
    iteration: int
    evaluations: int
    mean_archive_regret: float
    scoring_rate: float
    coverage: float
    qd_score: float


@dataclass
class SearchResult:
    archive: Archive
    metrics: list[MetricsRecord]
    references: list[PolicySpec]
    target: PolicySpec
    per_policy_mean_regret: list[float]
    per_policy_scoring_rate: list[float]
    config: SearchConfig
    evaluations: int
    version: str = __version__


def compute_metrics(archive: Archive, iteration: int, evaluations: int = 0) -> MetricsRecord:
    """Archive-wide metrics; empty cells contribute zero to the mean."""
    total = archive.spec.total_cells
    occupied = len(archive.cells)
    regret_sum = 0.0
    scored = 0
    for elite in archive.cells.values():
        regret_sum += elite.regret
        if elite.xp_mean > 0:
            scored += 1
    return MetricsRecord(
        iteration=iteration,
        evaluations=evaluations,
        mean_archive_regret=regret_sum / total,
        scoring_rate=(scored / occupied) if occupied else 0.0,
        coverage=occupied / total,
        qd_score=archive.qd_score(),
    )


def _eval_job(args) -> RegretEstimate:
    level, ref, target, repeats, base_seed, match_cfg, policy_index = args
    return estimate_regret(level, ref, target, repeats=repeats, base_seed=base_seed,
                           config=match_cfg, policy_index=policy_index)


class _RandomLevelEmitter:
    """Baseline 'emitter': fresh random levels against a random policy."""

    def __init__(self, batch_size: int, team_size: int, policy_count: int):
        self.batch_size = batch_size
        self.team_size = team_size
        self.policy_count = policy_count
        self.policy_index = 0

    def ask(self, rng: np.random.Generator) -> list[np.ndarray]:
        self.policy_index = int(rng.integers(self.policy_count))
        return [random_level(rng, self.team_size) for _ in range(self.batch_size)]


def _build_emitters(config: SearchConfig, dim: int, policy_count: int):
    if config.mode == "madrid_cmame":
        return [CmaMeEmitter(dim, sigma0=config.sigma, policy_index=e % policy_count,
                             policy_count=policy_count)
                for e in range(config.emitters)]
    if config.mode == "madrid_gaussian":
        return [GaussianEmitter(sigma=config.sigma) for _ in range(config.emitters)]
    batch = default_batch_size(dim)
    return [_RandomLevelEmitter(batch, config.match.team_size, policy_count)
            for _ in range(config.emitters)]


def run_search(config: SearchConfig, workers: int = 1, evaluator=None,
               on_checkpoint=None) -> SearchResult:
    """Run the configured search and return archives, metrics, and finals.

    `evaluator`, when given, replaces the real regret estimator with a
    callable (level, policy_index, base_seed) -> RegretEstimate; evaluation
    then runs in-process. `on_checkpoint(record, archive)` fires at every
    metrics checkpoint.
    """
    references = build_reference_ladder(config.ladder.n_ladder, config.ladder.include_bots)
    target = make_target(config.target_flaws)
    policy_count = len(references)
    grid = GridSpec(config.x_bins, config.y_bins, policy_count=policy_count)
    archive = Archive(grid, offset=config.qd_offset)
    match_cfg = config.match
    dim = genotype_length(match_cfg.team_size)
    seed = config.seed
    elitist = config.mode != "random"

    pool = None
    if workers > 1 and evaluator is None:
        pool = multiprocessing.get_context("fork").Pool(workers)

    def eval_jobs(jobs: list[tuple[np.ndarray, int, int]]) -> list[RegretEstimate]:
        if evaluator is not None:
            return [evaluator(level, pol, base_seed) for level, pol, base_seed in jobs]
        args = [(level, references[pol], target, config.repeats, base_seed, match_cfg, pol)
                for level, pol, base_seed in jobs]
        if pool is not None:
            chunk = max(1, len(args) // (workers * 2))
            return pool.map(_eval_job, args, chunksize=chunk)
        return [_eval_job(a) for a in args]

    try:
        # seed the archive with random levels for every reference policy
        jobs = []
        for p in range(policy_count):
            for j in range(config.init_levels_per_policy):
                lrng = np.random.default_rng(mix64(seed, _TAG_INIT_LEVEL, p, j))
                jobs.append((random_level(lrng, match_cfg.team_size), p,
                             mix64(seed, _TAG_INIT_EVAL, p, j)))
        estimates = eval_jobs(jobs)
        for (level, pol, base_seed), est in zip(jobs, estimates):
            elite = Elite(level, est.regret, est.xp_mean, est.sp_mean,
                          level_descriptor(level), pol, base_seed, 0)
            archive.try_insert(elite) if elitist else archive.overwrite_insert(elite)
        evaluations = len(jobs)

        metrics = [compute_metrics(archive, 0, evaluations)]
        if on_checkpoint is not None:
            on_checkpoint(metrics[-1], archive)

        emitters = _build_emitters(config, dim, policy_count)
        if config.mode == "madrid_cmame":
            for e_idx, em in enumerate(emitters):
                em.seed_from_archive(archive, np.random.default_rng(
                    mix64(seed, _TAG_EMITTER, e_idx)))

        for it in range(1, config.iterations + 1):
            batches = []
            for e_idx, em in enumerate(emitters):
                ask_rng = np.random.default_rng(mix64(seed, _TAG_ASK, it, e_idx))
                if config.mode == "madrid_gaussian":
                    genotypes = em.ask(archive, ask_rng)
                else:
                    genotypes = em.ask(ask_rng)
                batches.append((e_idx, em.policy_index, genotypes))

            jobs = []
            for e_idx, pol, genotypes in batches:
                for c, genotype in enumerate(genotypes):
                    jobs.append((genotype, pol, mix64(seed, _TAG_EVAL, it, e_idx, c)))
            estimates = eval_jobs(jobs)

            pos = 0
            for e_idx, pol, genotypes in batches:
                candidates = []
                for c, genotype in enumerate(genotypes):
                    est = estimates[pos]
                    base_seed = jobs[pos][2]
                    pos += 1
                    elite = Elite(genotype, est.regret, est.xp_mean, est.sp_mean,
                                  level_descriptor(genotype), pol, base_seed, it)
                    if elitist:
                        outcome = archive.try_insert(elite)
                    else:
                        outcome = archive.overwrite_insert(elite)
                    candidates.append(RankedCandidate(
                        genotype, est.regret, outcome,
                        improvement_value(outcome, est.regret, archive.offset), c))
                if config.mode == "madrid_cmame":
                    emitters[e_idx].tell(rank_candidates(candidates), archive,
                                         np.random.default_rng(mix64(seed, _TAG_TELL, it, e_idx)))
            evaluations += len(jobs)

            if it % config.metrics_stride == 0:
                metrics.append(compute_metrics(archive, it, evaluations))
                if on_checkpoint is not None:
                    on_checkpoint(metrics[-1], archive)
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    per_policy_regret = []
    per_policy_scoring = []
    for p in range(policy_count):
        cells = [e for k, e in archive.cells.items() if k.policy == p]
        per_policy_regret.append(sum(e.regret for e in cells) / grid.cells_per_policy)
        scored = sum(1 for e in cells if e.xp_mean > 0)
        per_policy_scoring.append(scored / len(cells) if cells else 0.0)

    return SearchResult(archive, metrics, references, target, per_policy_regret,
                        per_policy_scoring, config, evaluations)
