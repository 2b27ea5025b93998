"""Colorful cycle/chain detection against brute-force enumeration."""

from __future__ import annotations

from itertools import combinations

import pytest

from kex import (
    Coloring,
    ColorSetTooLargeError,
    ColorSetTooSmallError,
    DetectStats,
    Instance,
    bulk_color_sets,
    colorful_chain,
    colorful_cycle,
    random_instance,
    verify_solution,
    Solution,
)
from kex.oracle import enumerate_chains, enumerate_cycles

CHAIN_INST = Instance(3, frozenset({0}), {(0, 1), (1, 2)}, l_p=2, l_c=0, t=2)
CHAIN_COL = Coloring({1: 1, 2: 2})

TRI = Instance(3, frozenset(), {(0, 1), (1, 2), (2, 0)}, l_p=0, l_c=3, t=3)
TRI_COL = Coloring({0: 1, 1: 2, 2: 3})


class TestChain:
    def test_unique_candidate(self):
        ch = colorful_chain(CHAIN_INST, CHAIN_COL, {1, 2})
        assert (ch.start, ch.patients) == (0, (1, 2))

    def test_unreachable_color_set(self):
        assert colorful_chain(CHAIN_INST, CHAIN_COL, {2}) is None

    def test_color_set_too_large(self):
        with pytest.raises(ColorSetTooLargeError):
            colorful_chain(CHAIN_INST, CHAIN_COL, {1, 2, 3})

    def test_start_color_restriction(self):
        inst = Instance(4, frozenset({0, 1}), {(0, 2), (1, 3), (2, 3)}, 2, 0, 2)
        col = Coloring({2: 1, 3: 2}, {0: 1, 1: 2})
        hit = colorful_chain(inst, col, {2}, start_color=2)
        assert (hit.start, hit.patients) == (1, (3,))
        assert colorful_chain(inst, col, {1}, start_color=2) is None


class TestCycle:
    def test_triangle_found_canonical(self):
        cyc = colorful_cycle(TRI, TRI_COL, {1, 2, 3})
        assert cyc.patients == (0, 1, 2)

    def test_no_two_cycle_in_triangle(self):
        assert colorful_cycle(TRI, TRI_COL, {1, 2}) is None

    def test_four_cycle_with_two_colors_absent(self):
        inst = Instance(4, frozenset(), {(0, 1), (1, 2), (2, 3), (3, 0)}, 0, 4, 0)
        col = Coloring({0: 1, 1: 2, 2: 1, 3: 2})
        assert colorful_cycle(inst, col, {1, 2}) is None

    def test_size_bounds(self):
        with pytest.raises(ColorSetTooSmallError):
            colorful_cycle(TRI, TRI_COL, {1})
        with pytest.raises(ColorSetTooLargeError):
            colorful_cycle(Instance(3, frozenset(), TRI.arcs, 0, 2, 0), TRI_COL, {1, 2, 3})


def _brute_colorful(inst: Instance, coloring: Coloring, colors: frozenset[int]):
    """Reference: filter exhaustive enumerations by exact color set."""
    chi = coloring.patient_colors
    want = set(colors)
    cycles = [
        c
        for c in enumerate_cycles(inst)
        if len(c.patients) == len(want)
        and {chi[v] for v in c.patients} == want
        and len({chi[v] for v in c.patients}) == len(c.patients)
    ]
    chains = [
        c
        for c in enumerate_chains(inst)
        if len(c.patients) == len(want)
        and {chi[v] for v in c.patients} == want
        and len({chi[v] for v in c.patients}) == len(c.patients)
    ]
    return cycles, chains


class TestBruteForceEquivalence:
    @pytest.mark.parametrize("seed", range(12))
    def test_presence_matches_enumeration(self, seed):
        inst = random_instance(
            4 + seed % 6, seed % 3, 0.35, l_p=3, l_c=4, seed=1000 + seed
        )
        k = 4
        chi = {
            v: 1 + (v * 7 + seed) % k for v in inst.patients()
        }
        col = Coloring(chi)
        for size in range(1, k + 1):
            for combo in combinations(range(1, k + 1), size):
                want = frozenset(combo)
                ref_cycles, ref_chains = _brute_colorful(inst, col, want)
                if 2 <= size <= inst.l_c:
                    got = colorful_cycle(inst, col, want)
                    assert (got is not None) == bool(ref_cycles)
                    if got is not None:
                        assert {chi[v] for v in got.patients} == set(want)
                        assert len(set(got.patients)) == len(got.patients)
                        verify_solution(inst, Solution(cycles=(got,)))
                if 1 <= size <= inst.l_p:
                    got = colorful_chain(inst, col, want)
                    assert (got is not None) == bool(ref_chains)
                    if got is not None:
                        assert {chi[v] for v in got.patients} == set(want)
                        verify_solution(inst, Solution(chains=(got,)))

    @pytest.mark.parametrize("seed", range(8))
    def test_bulk_agrees_with_single_set(self, seed):
        inst = random_instance(8, 2, 0.4, l_p=3, l_c=3, seed=2000 + seed)
        k = 4
        chi = {v: 1 + (v * 5 + seed) % k for v in inst.patients()}
        cycle_masks, chains_by_a = bulk_color_sets(inst, chi, k)
        col = Coloring(chi)
        chain_any = set()
        for sets_a in chains_by_a.values():
            chain_any |= sets_a
        for size in range(1, k + 1):
            for combo in combinations(range(1, k + 1), size):
                mask = 0
                for c in combo:
                    mask |= 1 << (c - 1)
                if 2 <= size <= inst.l_c:
                    single = colorful_cycle(inst, col, combo)
                    assert (mask in cycle_masks) == (single is not None)
                if 1 <= size <= inst.l_p:
                    single = colorful_chain(inst, col, combo)
                    assert (mask in chain_any) == (single is not None)


class TestInstrumentation:
    def test_state_count_bound(self):
        inst = random_instance(9, 1, 0.5, l_p=4, l_c=4, seed=5)
        chi = {v: 1 + v % 4 for v in inst.patients()}
        col = Coloring(chi)
        stats = DetectStats()
        colorful_chain(inst, col, {1, 2, 3, 4}, stats=stats)
        assert stats.states_touched <= inst.n * 2**4
        stats = DetectStats()
        colorful_cycle(inst, col, {1, 2, 3}, stats=stats)
        # cycle detection re-runs the path DP per guessed arc
        assert stats.states_touched <= len(inst.arcs) * inst.n * 2**3

    def test_deterministic_witness(self):
        inst = random_instance(9, 1, 0.6, l_p=4, l_c=4, seed=6)
        chi = {v: 1 + v % 3 for v in inst.patients()}
        col = Coloring(chi)
        first = colorful_cycle(inst, col, {1, 2, 3})
        assert first == colorful_cycle(inst, col, {1, 2, 3})
