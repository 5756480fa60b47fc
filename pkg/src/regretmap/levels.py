"""Level genotypes: flat coordinate vectors for outfield players and the ball.

A level is the free parameter of the game: (x, y) pairs for the 2*(K-1)
outfield players (team A block first, then team B), followed by the ball.
Goalkeepers are placed by the engine and are not part of the genotype.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Field geometry (play area; also the clamp bounds after mutation).
FIELD_X = (-1.0, 1.0)
FIELD_Y = (-0.42, 0.42)

# Procedural generation samples from a slightly smaller box.
GEN_X = (-0.9, 0.9)
GEN_Y = (-0.4, 0.4)

DEFAULT_TEAM_SIZE = 5


@dataclass(frozen=True)
class FieldSpec:
    """Pitch geometry shared by the engine and the archive descriptor grid."""

    x_extent: tuple[float, float] = FIELD_X
    y_extent: tuple[float, float] = FIELD_Y
    goal_mouth_half_height: float = 0.10
    keeper_home_x: float = 0.95

    def __post_init__(self):
        if self.x_extent[0] >= self.x_extent[1] or self.y_extent[0] >= self.y_extent[1]:
            raise ValueError("degenerate field extents")
        if not 0.0 < self.goal_mouth_half_height < self.y_extent[1]:
            raise ValueError("goal mouth must fit inside the field")
        if not 0.0 < self.keeper_home_x < self.x_extent[1]:
            raise ValueError("keeper home must lie inside the field")


def genotype_length(team_size: int = DEFAULT_TEAM_SIZE) -> int:
    """Vector length: 2 coords for each outfield player plus the ball."""
    if team_size < 2:
        raise ValueError(f"team_size must be >= 2, got {team_size}")
    return 2 * (2 * (team_size - 1) + 1)


def random_level(rng: np.random.Generator, team_size: int = DEFAULT_TEAM_SIZE) -> np.ndarray:
    """Draw every coordinate uniformly from the generation ranges."""
    n_pairs = genotype_length(team_size) // 2
    out = np.empty(2 * n_pairs)
    out[0::2] = rng.uniform(GEN_X[0], GEN_X[1], n_pairs)
    out[1::2] = rng.uniform(GEN_Y[0], GEN_Y[1], n_pairs)
    return out


def clamp_level(level: np.ndarray) -> np.ndarray:
    """Clamp x coordinates to the field and y coordinates to the touchlines."""
    out = np.array(level, dtype=float)
    out[0::2] = np.clip(out[0::2], FIELD_X[0], FIELD_X[1])
    out[1::2] = np.clip(out[1::2], FIELD_Y[0], FIELD_Y[1])
    return out


def mutate_level(level: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Add independent Normal(0, sigma^2) noise to every coordinate, then clamp."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    level = np.asarray(level, dtype=float)
    if sigma == 0.0:
        return level.copy()
    return clamp_level(level + rng.normal(0.0, sigma, level.shape))


def level_descriptor(level: np.ndarray) -> tuple[float, float]:
    """The ball's (x, y): the final coordinate pair of the vector."""
    level = np.asarray(level)
    if level.ndim != 1 or level.size < 6 or (level.size - 2) % 4 != 0:
        raise ValueError(f"malformed genotype of length {level.size}")
    return float(level[-2]), float(level[-1])
