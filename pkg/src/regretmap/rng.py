"""Deterministic keyed random streams.

Every stochastic rule in an episode draws from a stream keyed by
(episode seed, step, rule id), so adding or removing agents never shuffles
the draws consumed by unrelated rules. Stream states are distinct affine
combinations of the keys; each draw advances a splitmix64-style counter and
avalanches it. Pure integer arithmetic, identical on every platform.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STEP_SALT = 0xA24BAED4963EE407
_RULE_SALT = 0x9FB21C651E98DF25
_INV53 = 1.0 / 9007199254740992.0


def _avalanche(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def mix64(*keys: int) -> int:
    """Collapse a key tuple into one well-mixed 64-bit value."""
    h = 0x9368E53C2F6AF274
    for k in keys:
        h = _avalanche((h + (k & _MASK)) * _GOLDEN & _MASK)
    return h


class StreamRng:
    """Stateful draw source for one (seed, step, rule) stream.

    A stream may take any number of draws without touching other streams.
    `reset` re-keys the object in place; the episode loop reuses one
    instance per agent instead of allocating every step.
    """

    __slots__ = ("_base", "_state")

    def __init__(self, seed: int, step: int = 0, rule: int = 0):
        self._base = _avalanche(seed * _GOLDEN & _MASK)
        self.reset(step, rule)

    def reset(self, step: int, rule: int) -> None:
        self._state = (self._base + step * _STEP_SALT + rule * _RULE_SALT) & _MASK

    def next_u64(self) -> int:
        self._state = s = (self._state + _GOLDEN) & _MASK
        s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
        s = (s ^ (s >> 27)) * 0x94D049BB133111EB & _MASK
        return s ^ (s >> 31)

    def uniform(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * _INV53

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n). Modulo bias is < 2**-50 for small n."""
        return self.next_u64() % n


class EpisodeRng:
    """Factory for the rule streams of one episode."""

    __slots__ = ("seed",)

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK

    def stream(self, step: int, rule: int) -> StreamRng:
        return StreamRng(self.seed, step, rule)
