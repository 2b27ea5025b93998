"""Exhaustive exact solver for desk-size instances.

Enumerates every feasible trading cycle and chain, then finds the best
vertex-disjoint packing by dynamic programming over the set of still
available vertices.  Exponential, but exact; this module is the ground
truth the FPT solver is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

from .instance import Chain, Cycle, Instance, KexError, Solution

DEFAULT_SIZE_CAP = 22
DEFAULT_POOL_BUDGET = 10**6


class SizeCapExceededError(KexError):
    """Instance (or component pool) too large for exhaustive solving."""


def enumerate_cycles(
    inst: Instance, size_cap: int = DEFAULT_SIZE_CAP, pool_budget: int = DEFAULT_POOL_BUDGET
) -> list[Cycle]:
    """All simple directed patient cycles with 2 <= length <= l_c.

    Each cycle is emitted exactly once, canonicalized to start at its
    minimum vertex id.  Ordered by (start vertex, discovery order).
    """
    _check_cap(inst, size_cap)
    out: list[Cycle] = []
    if inst.l_c < 2:
        return out
    adj = inst.out_adj()
    patients = set(inst.patients())

    def extend(start: int, path: list[int], on_path: set[int]) -> None:
        u = path[-1]
        for v in adj[u]:
            if v == start and len(path) >= 2:
                out.append(Cycle(tuple(path)))
                if len(out) > pool_budget:
                    raise SizeCapExceededError("cycle pool budget exceeded")
            elif v > start and v in patients and v not in on_path and len(path) < inst.l_c:
                on_path.add(v)
                path.append(v)
                extend(start, path, on_path)
                path.pop()
                on_path.remove(v)

    for start in sorted(patients):
        extend(start, [start], {start})
    return out


def enumerate_chains(
    inst: Instance, size_cap: int = DEFAULT_SIZE_CAP, pool_budget: int = DEFAULT_POOL_BUDGET
) -> list[Chain]:
    """All altruist-rooted simple paths covering 1..l_p patients."""
    _check_cap(inst, size_cap)
    out: list[Chain] = []
    if inst.l_p < 1:
        return out
    adj = inst.out_adj()
    altruists = sorted(inst.altruists)

    def extend(root: int, path: list[int], on_path: set[int]) -> None:
        u = path[-1] if path else root
        for v in adj[u]:
            if v in on_path or v in inst.altruists:
                continue
            path.append(v)
            on_path.add(v)
            out.append(Chain(root, tuple(path)))
            if len(out) > pool_budget:
                raise SizeCapExceededError("chain pool budget exceeded")
            if len(path) < inst.l_p:
                extend(root, path, on_path)
            path.pop()
            on_path.remove(v)

    for a in altruists:
        extend(a, [], set())
    return out


@dataclass(frozen=True)
class _Comp:
    mask: int
    patients: int
    chain: Chain | None = None
    cycle: Cycle | None = None


def oracle_max_coverage(
    inst: Instance, size_cap: int = DEFAULT_SIZE_CAP, pool_budget: int = DEFAULT_POOL_BUDGET
) -> tuple[int, Solution]:
    """Exact maximum patient coverage and a witness solution.

    DP over the set of available vertices: either the lowest available
    vertex stays unused, or some pool component through it is taken and
    its vertices removed.  Memoized on the availability bitmask.
    """
    _check_cap(inst, size_cap)
    pool: list[_Comp] = []
    for cy in enumerate_cycles(inst, size_cap, pool_budget):
        mask = 0
        for v in cy.patients:
            mask |= 1 << v
        pool.append(_Comp(mask, len(cy.patients), cycle=cy))
    for ch in enumerate_chains(inst, size_cap, pool_budget):
        mask = 1 << ch.start
        for v in ch.patients:
            mask |= 1 << v
        pool.append(_Comp(mask, len(ch.patients), chain=ch))
    if len(pool) > pool_budget:
        raise SizeCapExceededError("component pool budget exceeded")

    containing: list[list[int]] = [[] for _ in range(inst.n)]
    for i, comp in enumerate(pool):
        m = comp.mask
        while m:
            v = (m & -m).bit_length() - 1
            containing[v].append(i)
            m &= m - 1

    patient_mask = 0
    for v in inst.patients():
        patient_mask |= 1 << v

    memo: dict[int, tuple[int, int]] = {}  # avail -> (best, comp index or -1)

    def best(avail: int) -> int:
        if avail == 0:
            return 0
        hit = memo.get(avail)
        if hit is not None:
            return hit[0]
        v = (avail & -avail).bit_length() - 1
        score = best(avail & (avail - 1))
        action = -1
        bound = (avail & patient_mask).bit_count()
        if score < bound:
            for i in containing[v]:
                comp = pool[i]
                if comp.mask & avail == comp.mask:
                    cand = comp.patients + best(avail & ~comp.mask)
                    if cand > score:
                        score, action = cand, i
                        if score == bound:
                            break
        memo[avail] = (score, action)
        return score

    full = (1 << inst.n) - 1
    total = best(full)

    chains: list[Chain] = []
    cycles: list[Cycle] = []
    avail = full
    while avail:
        _, action = memo.get(avail, (0, -1))
        if action == -1:
            avail &= avail - 1
        else:
            comp = pool[action]
            if comp.chain is not None:
                chains.append(comp.chain)
            else:
                cycles.append(comp.cycle)  # type: ignore[arg-type]
            avail &= ~comp.mask
    return total, Solution(tuple(chains), tuple(cycles))


def _check_cap(inst: Instance, size_cap: int) -> None:
    if inst.n > size_cap:
        raise SizeCapExceededError(f"{inst.n} vertices exceeds cap {size_cap}")
