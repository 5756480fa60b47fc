"""regretmap: quality-diversity search for adversarial game levels.

Searches over procedurally generated two-team football levels for
configurations where weaker reference policies outperform a target policy,
measured by the cross-play minus self-play value gap (estimated regret),
and archives the best level per ball-position cell and reference policy.
"""

__version__ = "0.1.0"

from .archive import (Archive, CellKey, Elite, EmptyArchiveError, GridSpec,
                      InsertOutcome, InsertStatus, cell_index)
from .emitters import (CmaMeEmitter, GaussianEmitter, RankedCandidate,
                       improvement_value, rank_candidates)
from .evaluation import (RegretEstimate, RolloutOutcome, derive_episode_seed,
                         estimate_regret, play_episode, scoring_rate,
                         trace_episode, value)
from .levels import (FieldSpec, clamp_level, genotype_length, level_descriptor,
                     mutate_level, random_level)
from .pitch import (ACT_IDLE, ACT_PASS, ACT_SHOOT, N_ACTIONS, TEAM_A, TEAM_B,
                    MatchConfig, MatchState, StepEvent, reset, step)
from .policies import (ALL_FLAWS, BOT_KINDS, Observation, PolicySpec, act,
                       build_reference_ladder, make_target, observe)
from .rng import EpisodeRng, StreamRng, mix64
from .search import (MODES, LadderConfig, MetricsRecord, SearchConfig,
                     SearchResult, compute_metrics, run_search)

__all__ = [
    "Archive", "CellKey", "Elite", "EmptyArchiveError", "GridSpec",
    "InsertOutcome", "InsertStatus", "cell_index",
    "CmaMeEmitter", "GaussianEmitter", "RankedCandidate", "improvement_value",
    "rank_candidates",
    "RegretEstimate", "RolloutOutcome", "derive_episode_seed", "estimate_regret",
    "play_episode", "scoring_rate", "trace_episode", "value",
    "FieldSpec", "clamp_level", "genotype_length", "level_descriptor",
    "mutate_level", "random_level",
    "ACT_IDLE", "ACT_PASS", "ACT_SHOOT", "N_ACTIONS", "TEAM_A", "TEAM_B",
    "MatchConfig", "MatchState", "StepEvent", "reset", "step",
    "ALL_FLAWS", "BOT_KINDS", "Observation", "PolicySpec", "act",
    "build_reference_ladder", "make_target", "observe",
    "EpisodeRng", "StreamRng", "mix64",
    "MODES", "LadderConfig", "MetricsRecord", "SearchConfig", "SearchResult",
    "compute_metrics", "run_search",
]
