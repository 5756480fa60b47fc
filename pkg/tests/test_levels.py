import numpy as np
import pytest

from regretmap.levels import (FIELD_X, FIELD_Y, GEN_X, GEN_Y, FieldSpec,
                              clamp_level, genotype_length, level_descriptor,
                              mutate_level, random_level)


def test_genotype_length_default_team():
    assert genotype_length(5) == 18
    assert genotype_length(2) == 6


def test_genotype_length_rejects_tiny_teams():
    with pytest.raises(ValueError):
        genotype_length(1)


def test_field_spec_validation():
    with pytest.raises(ValueError):
        FieldSpec(goal_mouth_half_height=0.5)
    with pytest.raises(ValueError):
        FieldSpec(x_extent=(1.0, -1.0))


class TestRandomLevel:
    def test_samples_stay_inside_generation_ranges(self):
        rng = np.random.default_rng(0)
        draws = np.stack([random_level(rng) for _ in range(10_000)])
        xs = draws[:, 0::2]
        ys = draws[:, 1::2]
        assert xs.min() >= GEN_X[0] and xs.max() <= GEN_X[1]
        assert ys.min() >= GEN_Y[0] and ys.max() <= GEN_Y[1]

    def test_different_seeds_differ(self):
        a = random_level(np.random.default_rng(1))
        b = random_level(np.random.default_rng(2))
        assert not np.array_equal(a, b)

    def test_coordinate_means_near_zero(self):
        # mean of U(-0.9, 0.9) is 0 with sd 0.9/sqrt(3); the sample mean over
        # n draws must land within 3 sigma of it
        rng = np.random.default_rng(7)
        n = 10_000
        draws = np.stack([random_level(rng) for _ in range(n)])
        for col in range(draws.shape[1]):
            half = GEN_X[1] if col % 2 == 0 else GEN_Y[1]
            sigma_mean = (half / np.sqrt(3.0)) / np.sqrt(n)
            assert abs(draws[:, col].mean()) < 3 * sigma_mean


class TestMutateLevel:
    def test_sigma_zero_is_identity(self):
        rng = np.random.default_rng(0)
        level = random_level(rng)
        out = mutate_level(level, 0.0, rng)
        assert np.array_equal(out, level)
        assert out is not level

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            mutate_level(np.zeros(18), -0.1, np.random.default_rng(0))

    def test_large_noise_clamps_to_field_bounds(self):
        rng = np.random.default_rng(3)
        level = np.full(18, 0.0)
        hit_x_edge = hit_y_edge = False
        for _ in range(200):
            out = mutate_level(level, 5.0, rng)
            assert out[0::2].min() >= FIELD_X[0] and out[0::2].max() <= FIELD_X[1]
            assert out[1::2].min() >= FIELD_Y[0] and out[1::2].max() <= FIELD_Y[1]
            hit_x_edge |= bool(np.any(np.abs(out[0::2]) == FIELD_X[1]))
            hit_y_edge |= bool(np.any(np.abs(out[1::2]) == FIELD_Y[1]))
        assert hit_x_edge and hit_y_edge

    def test_noise_std_matches_sigma(self):
        # un-clamped interior coordinate: sample std of the applied noise must
        # be within 3 sigma of 0.1, where sd(sample std) ~ sigma/sqrt(2n)
        rng = np.random.default_rng(11)
        level = np.zeros(18)
        n = 10_000
        deltas = np.array([mutate_level(level, 0.1, rng)[0] for _ in range(n)])
        tol = 3 * 0.1 / np.sqrt(2 * n)
        assert abs(deltas.std(ddof=1) - 0.1) < tol

    def test_output_length_matches_input(self):
        rng = np.random.default_rng(0)
        for team in (2, 3, 5):
            level = random_level(rng, team)
            assert mutate_level(level, 0.1, rng).shape == level.shape


class TestDescriptor:
    def test_ball_is_final_pair(self):
        level = np.zeros(18)
        level[-2:] = (0.3, -0.1)
        assert level_descriptor(level) == (0.3, -0.1)

    def test_descriptor_tracks_mutation(self):
        rng = np.random.default_rng(9)
        level = random_level(rng)
        moved = mutate_level(level, 0.2, rng)
        assert level_descriptor(moved) == (moved[-2], moved[-1])

    def test_malformed_length_rejected(self):
        with pytest.raises(ValueError, match="genotype"):
            level_descriptor(np.zeros(7))
        with pytest.raises(ValueError, match="genotype"):
            level_descriptor(np.zeros(16))


def test_clamp_level_clips_each_axis_to_its_bounds():
    raw = np.array([2.0, 2.0, -2.0, -2.0, 0.5, 0.1] + [0.0] * 12)
    out = clamp_level(raw)
    assert (out[0], out[1]) == (1.0, 0.42)
    assert (out[2], out[3]) == (-1.0, -0.42)
    assert (out[4], out[5]) == (0.5, 0.1)
