"""Detection of a single colorful cycle or altruist-rooted chain.

Given a coloring and a prescribed color set S, find one cycle (or chain)
whose patient vertices carry pairwise-distinct colors exactly S.  The
dynamic program tracks states (end vertex, used color set); distinct
colors force distinct vertices, so no visited-set is needed and the
state space is at most ``n * 2**|S|``.

Witness-returning single-set detectors live next to a bulk existence
sweep (:func:`bulk_color_sets`) that computes achievable color sets for
every S at once; the solver drives the bulk form and reconstructs
witnesses through the single-set form only on success.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .coloring import Coloring
from .instance import (
    Chain,
    Cycle,
    Instance,
    InvalidParameterError,
    KexError,
    canonical_cycle,
)


class ColorSetTooLargeError(KexError):
    pass


class ColorSetTooSmallError(KexError):
    pass


@dataclass
class DetectStats:
    """Mutable instrumentation: distinct DP states touched."""

    states_touched: int = 0


def _color_set(colors: Iterable[int]) -> frozenset[int]:
    s = frozenset(colors)
    if any(c < 1 for c in s):
        raise InvalidParameterError("colors are numbered from 1")
    return s


def colorful_chain(
    inst: Instance,
    coloring: Coloring,
    colors: Iterable[int],
    start_color: int | None = None,
    stats: DetectStats | None = None,
) -> Chain | None:
    """One chain whose patients use exactly the given colors, or None.

    The chain starts at any altruist, or at an altruist of color
    ``start_color`` when given (requires an altruist palette on the
    coloring).  Deterministic: states are processed by increasing color
    set size then vertex id, and the seeding altruist is the smallest
    eligible one.
    """
    S = _color_set(colors)
    if not S:
        raise InvalidParameterError("color set must be non-empty")
    if len(S) > inst.l_p:
        raise ColorSetTooLargeError(f"|S|={len(S)} exceeds l_p={inst.l_p}")
    if start_color is not None and coloring.altruist_colors is None:
        raise InvalidParameterError("start_color given but no altruist palette")

    chi = coloring.patient_colors
    if start_color is None:
        roots = sorted(inst.altruists)
    else:
        ac = coloring.altruist_colors or {}
        roots = sorted(a for a in inst.altruists if ac.get(a) == start_color)
    adj = inst.out_adj()

    # parent[(v, used)] = (prev vertex or None, root altruist)
    parent: dict[tuple[int, frozenset[int]], tuple[int | None, int]] = {}
    frontier: list[tuple[int, frozenset[int]]] = []
    for a in roots:
        for v in adj[a]:
            c = chi.get(v)
            if c in S:
                key = (v, frozenset((c,)))
                if key not in parent:
                    parent[key] = (None, a)
                    frontier.append(key)
    for _ in range(1, len(S)):
        frontier.sort()
        nxt: list[tuple[int, frozenset[int]]] = []
        for v, used in frontier:
            for v2 in adj[v]:
                c2 = chi.get(v2)
                if c2 in S and c2 not in used:
                    key = (v2, used | {c2})
                    if key not in parent:
                        parent[key] = (v, used)  # type: ignore[assignment]
                        nxt.append(key)
        frontier = nxt
    if stats is not None:
        stats.states_touched += len(parent)

    accept = sorted(v for v, used in parent if used == S)
    if not accept:
        return None
    v = accept[0]
    path: list[int] = []
    used = S
    while True:
        path.append(v)
        prev, info = parent[(v, used)]
        if prev is None:
            root = info  # type: ignore[assignment]
            break
        v, used = prev, info  # type: ignore[assignment]
    path.reverse()
    return Chain(root, tuple(path))


def colorful_cycle(
    inst: Instance,
    coloring: Coloring,
    colors: Iterable[int],
    stats: DetectStats | None = None,
) -> Cycle | None:
    """One patient cycle using exactly the given colors, or None.

    Guesses an arc (u, w) of the cycle, then searches for a colorful path
    from w back to u; the guessed arc closes the cycle.  Arcs are tried
    in sorted order and the returned cycle starts at its minimum vertex.
    """
    S = _color_set(colors)
    if len(S) < 2:
        raise ColorSetTooSmallError("a cycle needs at least two colors")
    if len(S) > inst.l_c:
        raise ColorSetTooLargeError(f"|S|={len(S)} exceeds l_c={inst.l_c}")

    chi = coloring.patient_colors
    adj = inst.out_adj()
    for u, w in sorted(inst.arcs):
        cu, cw = chi.get(u), chi.get(w)
        if cu not in S or cw not in S or cu == cw:
            continue
        parent: dict[tuple[int, frozenset[int]], tuple[int, frozenset[int]] | None] = {
            (w, frozenset((cw,))): None
        }
        frontier = [(w, frozenset((cw,)))]
        for _ in range(1, len(S)):
            frontier.sort()
            nxt = []
            for v, used in frontier:
                for v2 in adj[v]:
                    c2 = chi.get(v2)
                    if c2 in S and c2 not in used:
                        key = (v2, used | {c2})
                        if key not in parent:
                            parent[key] = (v, used)
                            nxt.append(key)
            frontier = nxt
        if stats is not None:
            stats.states_touched += len(parent)
        if (u, S) in parent:
            path = []
            v, used = u, S
            while True:
                path.append(v)
                step = parent[(v, used)]
                if step is None:
                    break
                v, used = step
            path.reverse()  # now w .. u, closed by the guessed arc (u, w)
            return Cycle(canonical_cycle(path))
    return None


def bulk_color_sets(
    inst: Instance, patient_color: dict[int, int], k: int
) -> tuple[set[int], dict[int, set[int]]]:
    """Achievable color sets for every cycle and chain at once.

    Returns ``(cycle_masks, chain_masks_by_altruist)`` where a mask has
    bit ``c - 1`` set for color c.  ``cycle_masks`` holds the exact color
    sets of feasible cycles (length <= l_c); ``chain_masks_by_altruist``
    maps each altruist to the color sets of chains rooted there
    (length <= l_p).  Existence only; reconstruct witnesses with the
    single-set detectors.
    """
    bit = {v: 1 << (c - 1) for v, c in patient_color.items() if c <= k}
    adj = inst.out_adj()
    arcs = inst.arcs
    patient_adj: dict[int, list[tuple[int, int]]] = {}
    for v in bit:
        patient_adj[v] = [(v2, bit[v2]) for v2 in adj[v] if v2 in bit]

    cycle_masks: set[int] = set()
    lc = min(inst.l_c, k)
    if lc >= 2:
        for s in sorted(bit):
            bs = bit[s]
            seen = {(s, bs)}
            frontier = [(s, bs)]
            for _ in range(lc - 1):
                nxt = []
                for v, mask in frontier:
                    for v2, b2 in patient_adj[v]:
                        if v2 > s and not mask & b2:
                            st = (v2, mask | b2)
                            if st not in seen:
                                seen.add(st)
                                nxt.append(st)
                                if (v2, s) in arcs:
                                    cycle_masks.add(mask | b2)
                frontier = nxt

    chains: dict[int, set[int]] = {}
    lp = min(inst.l_p, k)
    for a in sorted(inst.altruists):
        sets_a: set[int] = set()
        if lp >= 1:
            seen = set()
            frontier = []
            for v in adj[a]:
                b = bit.get(v)
                if b is not None and (v, b) not in seen:
                    seen.add((v, b))
                    frontier.append((v, b))
                    sets_a.add(b)
            for _ in range(lp - 1):
                nxt = []
                for v, mask in frontier:
                    for v2, b2 in patient_adj[v]:
                        if not mask & b2:
                            st = (v2, mask | b2)
                            if st not in seen:
                                seen.add(st)
                                nxt.append(st)
                                sets_a.add(mask | b2)
                frontier = nxt
        chains[a] = sets_a
    return cycle_masks, chains
