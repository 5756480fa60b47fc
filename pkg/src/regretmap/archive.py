"""Elitist grid archive over level descriptors, one sub-grid per reference policy.

Each cell keeps the highest-regret level whose ball position falls in that
cell. Ties reject: the first level to reach a value keeps the cell. The
reference-policy dimension is realized as independent sub-grids sharing one
GridSpec, which is equivalent to stacking an extra grid axis and simpler to
serialize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple, Optional

import numpy as np

DEFAULT_QD_OFFSET = -2.0


class EmptyArchiveError(RuntimeError):
    """Raised when sampling from an archive with no occupied cells."""


@dataclass(frozen=True)
class GridSpec:
    """Shape of the descriptor grid and the roster size it is replicated for."""

    x_bins: int = 16
    y_bins: int = 10
    x_range: tuple[float, float] = (-1.0, 1.0)
    y_range: tuple[float, float] = (-0.42, 0.42)
    policy_count: int = 1

    def __post_init__(self):
        if self.x_bins < 1 or self.y_bins < 1:
            raise ValueError("bin counts must be positive")
        if self.policy_count < 1:
            raise ValueError("policy_count must be positive")
        if self.x_range[0] >= self.x_range[1] or self.y_range[0] >= self.y_range[1]:
            raise ValueError("degenerate descriptor range")

    @property
    def cells_per_policy(self) -> int:
        return self.x_bins * self.y_bins

    @property
    def total_cells(self) -> int:
        return self.cells_per_policy * self.policy_count


class CellKey(NamedTuple):
    policy: int
    x: int
    y: int


@dataclass
class Elite:
    """Occupant of one cell: the level plus the evaluation that put it there."""

    level: np.ndarray
    regret: float
    xp_mean: float
    sp_mean: float
    descriptor: tuple[float, float]
    policy_index: int
    eval_seed: int
    iteration_found: int


class InsertStatus(Enum):
    NEW = "new"
    IMPROVED = "improved"
    REJECTED = "rejected"


@dataclass(frozen=True)
class InsertOutcome:
    status: InsertStatus
    prior_regret: Optional[float] = None  # incumbent value for IMPROVED/REJECTED


def _bin_index(value: float, lo: float, hi: float, bins: int) -> int:
    b = math.floor((value - lo) / (hi - lo) * bins)
    if b < 0:
        return 0
    if b >= bins:
        return bins - 1
    return b


def cell_index(descriptor: tuple[float, float], spec: GridSpec, policy_index: int) -> CellKey:
    """Uniform binning of a descriptor; out-of-range values clamp to edge bins."""
    dx, dy = descriptor
    if not (math.isfinite(dx) and math.isfinite(dy)):
        raise ValueError(f"invalid descriptor {descriptor!r}: values must be finite")
    if not 0 <= policy_index < spec.policy_count:
        raise ValueError(f"policy index {policy_index} out of range [0, {spec.policy_count})")
    return CellKey(
        policy_index,
        _bin_index(dx, spec.x_range[0], spec.x_range[1], spec.x_bins),
        _bin_index(dy, spec.y_range[0], spec.y_range[1], spec.y_bins),
    )


class Archive:
    """Map from CellKey to Elite with strictly-improving insertion."""

    def __init__(self, spec: GridSpec, offset: float = DEFAULT_QD_OFFSET):
        self.spec = spec
        self.offset = offset
        self.cells: dict[CellKey, Elite] = {}

    def __len__(self) -> int:
        return len(self.cells)

    def key_for(self, elite: Elite) -> CellKey:
        return cell_index(elite.descriptor, self.spec, elite.policy_index)

    def try_insert(self, candidate: Elite) -> InsertOutcome:
        """Store the candidate iff its cell is empty or it strictly improves it."""
        if not math.isfinite(candidate.regret):
            raise ValueError(f"candidate regret must be finite, got {candidate.regret}")
        key = self.key_for(candidate)
        incumbent = self.cells.get(key)
        if incumbent is None:
            self.cells[key] = candidate
            return InsertOutcome(InsertStatus.NEW)
        if candidate.regret > incumbent.regret:
            self.cells[key] = candidate
            return InsertOutcome(InsertStatus.IMPROVED, incumbent.regret)
        return InsertOutcome(InsertStatus.REJECTED, incumbent.regret)

    def overwrite_insert(self, candidate: Elite) -> InsertOutcome:
        """Unconditional placement (no elitism); used by the random baseline."""
        if not math.isfinite(candidate.regret):
            raise ValueError(f"candidate regret must be finite, got {candidate.regret}")
        key = self.key_for(candidate)
        incumbent = self.cells.get(key)
        self.cells[key] = candidate
        if incumbent is None:
            return InsertOutcome(InsertStatus.NEW)
        if candidate.regret > incumbent.regret:
            return InsertOutcome(InsertStatus.IMPROVED, incumbent.regret)
        return InsertOutcome(InsertStatus.REJECTED, incumbent.regret)

    def sample_uniform(self, rng: np.random.Generator, policy_index: Optional[int] = None) -> Elite:
        """Uniform draw over occupied cells, optionally within one policy sub-grid.

        Keys are sorted before drawing so the result depends only on archive
        contents and rng state, not on insertion history.
        """
        if policy_index is None:
            keys = sorted(self.cells)
        else:
            keys = sorted(k for k in self.cells if k.policy == policy_index)
        if not keys:
            raise EmptyArchiveError("archive has no occupied cells to sample")
        return self.cells[keys[rng.integers(len(keys))]]

    def qd_score(self) -> float:
        """Sum over occupied cells of (regret - offset); 0 when empty."""
        return sum(e.regret - self.offset for e in self.cells.values())

    def coverage(self, policy_index: Optional[int] = None) -> float:
        """Occupied fraction, per policy sub-grid or across the whole archive."""
        if policy_index is None:
            return len(self.cells) / self.spec.total_cells
        n = sum(1 for k in self.cells if k.policy == policy_index)
        return n / self.spec.cells_per_policy

    def items_sorted(self) -> Iterator[tuple[CellKey, Elite]]:
        for key in sorted(self.cells):
            yield key, self.cells[key]

    def policy_regrets(self, policy_index: int) -> list[float]:
        return [e.regret for k, e in self.cells.items() if k.policy == policy_index]
