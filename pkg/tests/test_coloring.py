"""Colorings, trial budgets, and perfect hash families."""

from __future__ import annotations

import math

import pytest

from kex import (
    InvalidParameterError,
    PaletteTooLargeError,
    deterministic_family,
    random_coloring,
    read_family_cache,
    trial_count,
    verify_family,
    write_family_cache,
)
from kex.coloring import Coloring, HashFamily, _greedy_cover, _smallest_prime_above


class TestRandomColoring:
    def test_single_color(self):
        col = random_coloring(5, 1, seed=0)
        assert set(col.patient_colors.values()) == {1}

    def test_empty_universe(self):
        assert random_coloring(0, 3, seed=0).patient_colors == {}

    def test_determinism(self):
        assert random_coloring(50, 4, seed=7) == random_coloring(50, 4, seed=7)
        assert random_coloring(50, 4, seed=7) != random_coloring(50, 4, seed=8)

    def test_zero_palette_rejected_on_nonempty_universe(self):
        with pytest.raises(InvalidParameterError):
            random_coloring(3, 0, seed=0)

    @pytest.mark.parametrize("seed", [1, 2])
    def test_color_frequencies_near_uniform(self, seed):
        # 10^4 elements over 4 colors: each frequency within 4*sqrt(10^4) of 2500
        col = random_coloring(10_000, 4, seed=seed)
        counts = [0] * 5
        for c in col.patient_colors.values():
            counts[c] += 1
        for c in range(1, 5):
            assert abs(counts[c] - 2500) <= 400


class TestTrialCount:
    @pytest.mark.parametrize(
        ("k", "delta", "expect"),
        [
            (1, math.exp(-1), 3),
            (0, 0.5, 1),
            (4, 0.01, 252),
        ],
    )
    def test_frozen_values(self, k, delta, expect):
        assert trial_count(k, delta) == expect

    def test_delta_bounds(self):
        with pytest.raises(InvalidParameterError):
            trial_count(3, 0.0)
        with pytest.raises(InvalidParameterError):
            trial_count(3, 1.0)


class TestDeterministicFamily:
    def test_k1_is_single_constant(self):
        fam = deterministic_family(9, 1)
        assert len(fam) == 1
        assert set(fam.colorings[0].patient_colors.values()) == {1}

    def test_small_pairs_verify(self):
        assert verify_family(deterministic_family(6, 2)) is None

    def test_two_stage_size_bound(self):
        # n=10, k=3 goes through the linear-map stage; the emitted family
        # cannot exceed (#stage-1 maps) * (#stage-2 colorings)
        fam = deterministic_family(10, 3)
        assert verify_family(fam) is None
        p = _smallest_prime_above(max(10, 9))
        assert len(fam) <= p * (p - 1) * len(_greedy_cover(9, 3))

    @pytest.mark.parametrize(("n", "k"), [(8, 3), (7, 4), (12, 2), (5, 5), (9, 4)])
    def test_exhaustive_perfectness(self, n, k):
        assert verify_family(deterministic_family(n, k)) is None

    def test_identity_when_palette_matches_universe(self):
        fam = deterministic_family(7, 7)
        assert len(fam) == 1
        assert verify_family(fam) is None

    def test_direct_cover_allowed_past_kmax_when_enumerable(self):
        # (12, 8) has C(12,8)=495 subsets: fine even though 8 > default cap
        fam = deterministic_family(12, 8)
        assert verify_family(fam) is None

    def test_palette_too_large(self):
        with pytest.raises(PaletteTooLargeError):
            deterministic_family(100, 7)

    def test_construction_is_reproducible(self):
        a = deterministic_family(11, 3)
        b = deterministic_family(11, 3)
        assert a.tuples() == b.tuples()


class TestVerifyFamily:
    def test_all_colorings_family_passes(self):
        from itertools import product

        cols = tuple(
            Coloring(dict(enumerate(vec))) for vec in product((1, 2), repeat=3)
        )
        assert verify_family(HashFamily(cols, 3, 2)) is None

    def test_constant_family_fails_with_witness(self):
        fam = HashFamily((Coloring({0: 1, 1: 1}),), 2, 2)
        assert verify_family(fam) == (0, 1)

    def test_deterministic_family_output_passes(self):
        assert verify_family(deterministic_family(8, 3)) is None


class TestRainbowFraction:
    def test_planted_witness_fraction_matches_theory(self):
        # witness of size 4 in a 4-element universe: P(rainbow) = 4!/4^4
        k, trials = 4, 10_000
        hits = sum(
            1
            for seed in range(trials)
            if len(set(random_coloring(k, k, seed=seed).patient_colors.values())) == k
        )
        p = math.factorial(k) / k**k
        sigma = math.sqrt(p * (1 - p) / trials)
        assert hits / trials >= p - 3 * sigma


class TestFamilyCache:
    def test_round_trip_and_exact_format(self, tmp_path):
        fam = deterministic_family(6, 3)
        path = tmp_path / "fam.txt"
        write_family_cache(fam, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "6 3"
        assert all(len(line.split()) == 6 for line in lines[1:])
        back = read_family_cache(str(path))
        assert back.tuples() == fam.tuples()
        assert (back.universe_size, back.palette_size) == (6, 3)
