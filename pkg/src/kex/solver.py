"""FPT decision and optimization engine over color-coded instances.

Per coloring, a subset dynamic program asks whether the patient colors
1..k can be partitioned into blocks, each realized by a colorful cycle
or altruist-rooted chain.  Two variants exist:

* ``paper``: single palette, chains may start at any altruist.  The DP
  cannot see that two chains share a start vertex, so reconstructed
  collections are only candidate solutions (the documented soundness
  gap); the driver verifies and discards unverifiable positives.
* ``corrected``: a second palette on altruists, one color per chain, so
  chain starts are forced distinct and every positive reconstructs to a
  verified solution.  The chain count c is swept 0..min(|altruists|, k).

Deciding "exactly k" runs the DP over a deterministic k-perfect family
(deterministic mode) or seeded random colorings (randomized mode, one
sided error at most delta).  "At least t" sweeps the exact decision over
t..t+l_c-1: chains can always be truncated down to the target, and an
inclusion-minimal all-cycle cover overshoots by less than one cycle.
Maximization binary-searches the at-least decision.

The instrumented variants (:func:`solve_colorful_paper`,
:func:`solve_colorful_corrected`) always evaluate the complete
recurrence so their transition counters are exact; the drivers use an
equivalent forward-closure evaluation that skips unreachable table
entries (tested to agree with the instrumented form).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .coloring import (
    DEFAULT_K_MAX,
    Coloring,
    deterministic_family,
    trial_count,
)
from .detect import bulk_color_sets, colorful_chain, colorful_cycle
from .instance import (
    Instance,
    InvalidParameterError,
    KexError,
    Solution,
    SolutionError,
    verify_solution,
)


class PaletteMismatchError(KexError):
    """Coloring does not cover the vertices (or c > k) as required."""


class SolverTimeoutError(KexError):
    """Cooperative timeout hit between coloring evaluations."""


@dataclass(frozen=True)
class SolverConfig:
    """Solver knobs; immutable so runs are reproducible from the config."""

    mode: str = "deterministic"  # deterministic | randomized
    variant: str = "corrected"  # corrected | paper
    delta: float = 0.01
    seed: int | str | None = None
    k_max: int = DEFAULT_K_MAX
    b_max: int | None = None
    timeout_ms: int | None = None


@dataclass
class SolveStats:
    """Mutable run accounting shared across nested solver calls."""

    colorings_tried: int = 0
    dp_transitions: int = 0
    deadline: float | None = None  # time.monotonic() limit

    def start_timer(self, timeout_ms: int | None) -> None:
        if timeout_ms is not None:
            self.deadline = time.monotonic() + timeout_ms / 1000.0

    def check_deadline(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverTimeoutError("timed out between colorings")


def _mask_colors(mask: int) -> list[int]:
    return [c + 1 for c in range(mask.bit_length()) if mask >> c & 1]


def _patient_palette(inst: Instance, coloring: Coloring) -> tuple[list[int], int]:
    patients = inst.patients()
    chi = coloring.patient_colors
    missing = [v for v in patients if v not in chi]
    if missing:
        raise PaletteMismatchError(f"patients without a color: {missing}")
    k = max((chi[v] for v in patients), default=0)
    return patients, k


def solve_colorful_paper(
    inst: Instance, coloring: Coloring, stats: SolveStats | None = None
) -> Solution | None:
    """Single-palette subset DP; returns a candidate collection or None.

    The returned collection's chains may share altruist start vertices:
    route it through :func:`kex.instance.verify_solution` before use.
    The whole table is evaluated without short-circuiting, so the
    transition counter increases by exactly sum_i C(k,i) * (2**i - 1).
    """
    patients, k = _patient_palette(inst, coloring)
    if k == 0:
        return Solution()
    chi = {v: coloring.patient_colors[v] for v in patients}
    cycle_masks, chains_by_a = bulk_color_sets(inst, chi, k)
    chain_any: set[int] = set()
    for sets_a in chains_by_a.values():
        chain_any |= sets_a

    full = (1 << k) - 1
    dp = [False] * (full + 1)
    dp[0] = True
    choice: dict[int, tuple[int, str]] = {}
    transitions = 0
    for T in range(1, full + 1):
        best: tuple[tuple[int, int, int], int, str] | None = None
        S = T
        while S:
            transitions += 1
            if dp[T ^ S]:
                if S in cycle_masks:
                    cand = ((S.bit_count(), S, 0), S, "cycle")
                    if best is None or cand[0] < best[0]:
                        best = cand
                elif S in chain_any:
                    cand = ((S.bit_count(), S, 1), S, "chain")
                    if best is None or cand[0] < best[0]:
                        best = cand
            S = (S - 1) & T
        if best is not None:
            dp[T] = True
            choice[T] = (best[1], best[2])
    if stats is not None:
        stats.dp_transitions += transitions
    if not dp[full]:
        return None
    blocks = []
    T = full
    while T:
        S, kind = choice[T]
        blocks.append((S, kind, None))
        T ^= S
    return _extract(inst, coloring, blocks)


def solve_colorful_corrected(
    inst: Instance, coloring: Coloring, stats: SolveStats | None = None
) -> Solution | None:
    """Two-palette subset DP with distinct altruist colors per chain.

    State (T, A): patient colors T and altruist colors A are exactly
    consumed by disjoint colorful cycles and chains (a chain uses up the
    color of its start altruist).  Positive answers reconstruct to
    solutions that always verify.  Complete-table evaluation, like the
    paper variant.
    """
    patients, k = _patient_palette(inst, coloring)
    ac = dict(coloring.altruist_colors or {})
    c = max(ac.values(), default=0)
    if c > k:
        raise PaletteMismatchError(f"altruist palette {c} exceeds patient palette {k}")
    if ac:
        uncovered = [a for a in inst.altruists if a not in ac]
        if uncovered:
            raise PaletteMismatchError(f"altruists without a color: {uncovered}")
    if k == 0:
        return Solution()
    chi = {v: coloring.patient_colors[v] for v in patients}
    cycle_masks, chains_by_a = bulk_color_sets(inst, chi, k)
    chain_by_color: dict[int, set[int]] = {b: set() for b in range(1, c + 1)}
    for a, sets_a in chains_by_a.items():
        b = ac.get(a)
        if b is not None and b in chain_by_color:
            chain_by_color[b] |= sets_a

    full_t = (1 << k) - 1
    full_a = (1 << c) - 1
    dp = [[False] * (full_a + 1) for _ in range(full_t + 1)]
    dp[0][0] = True
    choice: dict[tuple[int, int], tuple[int, str, int | None]] = {}
    transitions = 0
    for T in range(1, full_t + 1):
        for A in range(full_a + 1):
            best: tuple[tuple[int, int, int, int], int, str, int | None] | None = None
            S = T
            while S:
                transitions += 1
                rest = T ^ S
                if S in cycle_masks and dp[rest][A]:
                    cand = ((S.bit_count(), S, 0, 0), S, "cycle", None)
                    if best is None or cand[0] < best[0]:
                        best = cand
                for b in range(1, c + 1):
                    if A >> (b - 1) & 1 and S in chain_by_color[b]:
                        if dp[rest][A ^ (1 << (b - 1))]:
                            cand = ((S.bit_count(), S, 1, b), S, "chain", b)
                            if best is None or cand[0] < best[0]:
                                best = cand
                S = (S - 1) & T
            if best is not None:
                dp[T][A] = True
                choice[(T, A)] = (best[1], best[2], best[3])
    if stats is not None:
        stats.dp_transitions += transitions
    if not dp[full_t][full_a]:
        return None
    blocks = []
    T, A = full_t, full_a
    while T:
        S, kind, b = choice[(T, A)]
        blocks.append((S, kind, b))
        T ^= S
        if b is not None:
            A ^= 1 << (b - 1)
    return _extract(inst, coloring, blocks)


def _extract(
    inst: Instance, coloring: Coloring, blocks: list[tuple[int, str, int | None]]
) -> Solution:
    """Materialize witness components for the chosen color blocks."""
    chains = []
    cycles = []
    for S, kind, b in blocks:
        colors = _mask_colors(S)
        if kind == "cycle":
            cyc = colorful_cycle(inst, coloring, colors)
            if cyc is None:
                raise KexError("internal: bulk and single-set detection disagree")
            cycles.append(cyc)
        else:
            ch = colorful_chain(inst, coloring, colors, start_color=b)
            if ch is None:
                raise KexError("internal: bulk and single-set detection disagree")
            chains.append(ch)
    return Solution(tuple(chains), tuple(cycles))


# --- forward-closure evaluation (drivers' fast path) ---


def _comp_list(
    cycle_masks: set[int], chain_sets: list[tuple[int | None, set[int]]]
) -> list[tuple[int, str, int | None]]:
    """Detected blocks, ordered smallest color set first, cycles first."""
    comps = [(m.bit_count(), m, 0, "cycle", None) for m in cycle_masks]
    for b, sets_b in chain_sets:
        comps.extend((m.bit_count(), m, 1, "chain", b) for m in sets_b)
    comps.sort(key=lambda it: (it[0], it[1], it[2], it[4] or 0))
    return [(m, kind, b) for _, m, _, kind, b in comps]


def _closure(
    k: int,
    c: int,
    comps: list[tuple[int, str, int | None]],
    stats: SolveStats | None,
) -> list[tuple[int, str, int | None]] | None:
    """Reach (all patient colors, all altruist colors) from the empty state.

    Same recurrence as the instrumented DPs, evaluated forward from
    reachable states only.  Returns the chosen blocks or None.
    """
    full_t = (1 << k) - 1
    full_a = (1 << c) - 1
    target = (full_t, full_a)
    parent: dict[tuple[int, int], tuple[tuple[int, int], int, str, int | None] | None]
    parent = {(0, 0): None}
    frontier = [(0, 0)]
    transitions = 0
    found = (0, 0) == target
    while frontier and not found:
        nxt = []
        for state in frontier:
            T, A = state
            for S, kind, b in comps:
                transitions += 1
                if T & S:
                    continue
                if b is None:
                    key = (T | S, A)
                else:
                    bit = 1 << (b - 1)
                    if A & bit:
                        continue
                    key = (T | S, A | bit)
                if key not in parent:
                    parent[key] = (state, S, kind, b)
                    if key == target:
                        found = True
                        break
                    nxt.append(key)
            if found:
                break
        frontier = nxt
    if stats is not None:
        stats.dp_transitions += transitions
    if not found:
        return None
    blocks = []
    cur = target
    while parent[cur] is not None:
        prev, S, kind, b = parent[cur]  # type: ignore[misc]
        blocks.append((S, kind, b))
        cur = prev
    blocks.reverse()
    return blocks


def _coverage_upper_bound(inst: Instance) -> int:
    """Cheap sound bound: covered patients need an in-arc; short l_c kills cycles."""
    heads = {v for _, v in inst.arcs if v not in inst.altruists}
    ub = len(heads)
    if inst.l_c < 2:
        ub = min(ub, len(inst.altruists) * max(inst.l_p, 0))
    if inst.l_p < 1 and inst.l_c < 2:
        ub = 0
    return ub


def _chain_sets_for(
    chains_by_a: dict[int, set[int]],
    alt: list[int],
    ac: dict[int, int],
    c: int,
) -> list[tuple[int | None, set[int]]]:
    by_color: dict[int, set[int]] = {b: set() for b in range(1, c + 1)}
    for a in alt:
        b = ac.get(a)
        if b is not None and b in by_color:
            by_color[b] |= chains_by_a.get(a, set())
    return [(b, sets_b) for b, sets_b in by_color.items()]


def decide_exact(
    inst: Instance, k: int, cfg: SolverConfig, stats: SolveStats | None = None
) -> Solution | None:
    """Is there a verified solution covering exactly k patients?

    Positive answers always carry a solution accepted by the verifier
    with coverage k (one-sided error).  Deterministic mode scans the
    full product of perfect hash families and its negatives are exact;
    randomized mode misses a yes-instance with probability at most
    delta.  The paper variant can additionally go negative on instances
    where only altruist-sharing collections exist.
    """
    if k < 0:
        raise InvalidParameterError("k must be non-negative")
    if stats is None:
        stats = SolveStats()
    if k == 0:
        return Solution()
    patients = inst.patients()
    if k > len(patients) or k > _coverage_upper_bound(inst):
        return None
    if cfg.mode == "deterministic":
        return _decide_exact_det(inst, k, cfg, stats, patients)
    if cfg.mode == "randomized":
        return _decide_exact_rand(inst, k, cfg, stats, patients)
    raise InvalidParameterError(f"unknown mode {cfg.mode!r}")


def _c_range(inst: Instance, k: int, cfg: SolverConfig) -> list[int]:
    hi = min(len(inst.altruists), k)
    if cfg.b_max is not None:
        hi = min(hi, cfg.b_max)
    return list(range(hi + 1))


def _verified(inst: Instance, sol: Solution, k: int, strict: bool) -> Solution | None:
    try:
        cov = verify_solution(inst, sol)
    except SolutionError:
        if strict:
            raise KexError("internal: corrected-variant witness failed verification")
        return None
    return sol if cov == k else None


def _decide_exact_det(
    inst: Instance,
    k: int,
    cfg: SolverConfig,
    stats: SolveStats,
    patients: list[int],
) -> Solution | None:
    fam_p = deterministic_family(len(patients), k, k_max=cfg.k_max)
    alt = sorted(inst.altruists)
    fam_a_tuples: dict[int, list[tuple[int, ...]]] = {}

    def alt_family(c: int) -> list[tuple[int, ...]]:
        if c not in fam_a_tuples:
            fam_a_tuples[c] = (
                [()] if c == 0 else deterministic_family(len(alt), c, k_max=cfg.k_max).tuples()
            )
        return fam_a_tuples[c]

    for pt in fam_p.tuples():
        stats.check_deadline()
        stats.colorings_tried += 1
        if len(set(pt)) < k:
            continue  # some color absent: the full palette is unreachable
        chi = {patients[i]: pt[i] for i in range(len(patients))}
        cycle_masks, chains_by_a = bulk_color_sets(inst, chi, k)
        chain_any: set[int] = set()
        for sets_a in chains_by_a.values():
            chain_any |= sets_a

        if cfg.variant == "paper":
            comps = _comp_list(cycle_masks, [(None, chain_any)])
            blocks = _closure(k, 0, comps, stats)
            if blocks is None:
                continue
            sol = _extract(inst, Coloring(chi), blocks)
            hit = _verified(inst, sol, k, strict=False)
            if hit is not None:
                return hit
            continue

        # corrected: prune with the relaxed (altruist-sharing) closure first
        relaxed = _comp_list(cycle_masks, [(None, chain_any)])
        if _closure(k, 0, relaxed, stats) is None:
            continue
        for c in _c_range(inst, k, cfg):
            for at in alt_family(c):
                stats.check_deadline()
                stats.colorings_tried += 1
                ac = {alt[i]: at[i] for i in range(len(alt))} if c else {}
                comps = _comp_list(
                    cycle_masks, _chain_sets_for(chains_by_a, alt, ac, c)
                )
                blocks = _closure(k, c, comps, stats)
                if blocks is None:
                    continue
                coloring = Coloring(chi, ac if c else {})
                sol = _extract(inst, coloring, blocks)
                hit = _verified(inst, sol, k, strict=True)
                if hit is not None:
                    return hit
    return None


def _decide_exact_rand(
    inst: Instance,
    k: int,
    cfg: SolverConfig,
    stats: SolveStats,
    patients: list[int],
) -> Solution | None:
    if cfg.seed is None:
        raise InvalidParameterError("randomized mode requires a seed")
    alt = sorted(inst.altruists)

    def trial(c: int, i: int) -> Solution | None:
        stats.check_deadline()
        stats.colorings_tried += 1
        rng_p = random.Random(f"{cfg.seed}|{c}|p|{i}")
        chi = {v: rng_p.randint(1, k) for v in patients}
        if len(set(chi.values())) < k:
            return None
        cycle_masks, chains_by_a = bulk_color_sets(inst, chi, k)
        if cfg.variant == "paper":
            chain_any: set[int] = set()
            for sets_a in chains_by_a.values():
                chain_any |= sets_a
            comps = _comp_list(cycle_masks, [(None, chain_any)])
            blocks = _closure(k, 0, comps, stats)
            if blocks is None:
                return None
            sol = _extract(inst, Coloring(chi), blocks)
            return _verified(inst, sol, k, strict=False)
        rng_a = random.Random(f"{cfg.seed}|{c}|a|{i}")
        ac = {a: rng_a.randint(1, c) for a in alt} if c else {}
        comps = _comp_list(cycle_masks, _chain_sets_for(chains_by_a, alt, ac, c))
        blocks = _closure(k, c, comps, stats)
        if blocks is None:
            return None
        sol = _extract(inst, Coloring(chi, ac), blocks)
        return _verified(inst, sol, k, strict=True)

    if cfg.variant == "paper":
        budget = trial_count(k, cfg.delta)
        for i in range(budget):
            hit = trial(0, i)
            if hit is not None:
                return hit
        return None

    c_values = _c_range(inst, k, cfg)
    budgets = {c: trial_count(k + c, cfg.delta) for c in c_values}
    # round-robin across chain counts: the winning c succeeds early without
    # first draining the full trial budget of the losing ones
    i = 0
    while any(i < budgets[c] for c in c_values):
        for c in c_values:
            if i < budgets[c]:
                hit = trial(c, i)
                if hit is not None:
                    return hit
        i += 1
    return None


def decide_at_least(
    inst: Instance,
    t: int,
    cfg: SolverConfig,
    stats: SolveStats | None = None,
    _cache: dict[int, Solution | None] | None = None,
) -> Solution | None:
    """Is there a verified solution covering at least t patients?

    Sweeps the exact decision over t..t+l_c-1 (only t when l_c < 2),
    skipping values above the patient count.
    """
    if stats is None:
        stats = SolveStats()
    if t <= 0:
        return Solution()
    cache = _cache if _cache is not None else {}
    hi = t + (inst.l_c - 1 if inst.l_c >= 2 else 0)
    for k in range(t, min(hi, inst.patient_count) + 1):
        if k not in cache:
            cache[k] = decide_exact(inst, k, cfg, stats)
        if cache[k] is not None:
            return cache[k]
    return None


def maximize(
    inst: Instance, cfg: SolverConfig, stats: SolveStats | None = None
) -> tuple[int, Solution]:
    """Maximum coverage and a witness, by binary search on the target.

    Valid because decide_at_least is monotone in t.
    """
    if stats is None:
        stats = SolveStats()
    cache: dict[int, Solution | None] = {}
    best_t, best = 0, Solution()
    lo, hi = 1, inst.patient_count
    while lo <= hi:
        mid = (lo + hi) // 2
        sol = decide_at_least(inst, mid, cfg, stats, _cache=cache)
        if sol is not None:
            cov = sol.coverage
            if cov > best_t:
                best_t, best = cov, sol
            lo = cov + 1
        else:
            hi = mid - 1
    return best_t, best
