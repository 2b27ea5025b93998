"""Instance generators compiled from classical hard problems.

Each generator emits a kidney-exchange instance plus certificate
metadata mapping source objects (items, bins, triples, path vertices)
to graph gadgets, so known source witnesses can be replayed as
verifiable solutions and micro instances can be round-tripped against
the exhaustive oracle.

Length bounds follow the edge-count convention of the data model; where
the source construction states vertex counts instead, the emitted
values are adjusted and the raw ones recorded under ``paper_params``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .instance import (
    Arc,
    Chain,
    Cycle,
    Instance,
    InvalidParameterError,
    Solution,
)


@dataclass(frozen=True)
class ReductionOutput:
    instance: Instance
    expected: str | None  # "yes" | "no" | None when the source answer is unknown
    certificate_map: dict = field(default_factory=dict)
    paper_params: dict = field(default_factory=dict)


def _expected_str(source_answer: bool | None) -> str | None:
    if source_answer is None:
        return None
    return "yes" if source_answer else "no"


def from_directed_kpath(
    n: int, arcs: Iterable[Arc], k: int, source_answer: bool | None = None
) -> ReductionOutput:
    """Directed k-path source graph to a chains-only instance.

    One fresh altruist with arcs to every source vertex; a chain of k
    edges through the source graph is exactly a simple path on k
    vertices.  Yes iff the source has such a path.
    """
    arcs = sorted(set(map(tuple, arcs)))
    if any(u == v for u, v in arcs):
        raise InvalidParameterError("source digraph must have no self-loops")
    if not 1 <= k <= n:
        raise InvalidParameterError(f"need 1 <= k <= {n}")
    a = n
    inst = Instance(
        n + 1,
        frozenset({a}),
        frozenset(arcs) | {(a, v) for v in range(n)},
        l_p=k,
        l_c=0,
        t=k,
    )
    cert = {"altruist": a, "source_vertices": list(range(n)), "k": k}
    return ReductionOutput(
        inst, _expected_str(source_answer), cert, {"l_p": k + 1, "t": k + 1}
    )


def kpath_witness(out: ReductionOutput, path: Sequence[int]) -> Solution:
    """Wrap a simple source path on k vertices as the matching chain."""
    return Solution(chains=(Chain(out.certificate_map["altruist"], tuple(path)),))


def _binpack_gadget(
    weights: Sequence[int], k: int, scale_override: int | None
) -> tuple[list[int], int, list[list[int]], list[tuple[int, int]], set[Arc], int]:
    """Shared spine-and-item-path scaffolding for both bin packing variants.

    Returns (scaled weights, W, spine ids by bin, item (start, end) ids,
    arcs, scale factor).  Spine vertex (j, i) has id j*n + i; item paths
    follow.  The default scaling multiplies every weight by 3*k^2*n^2
    whenever any weight is below that bound.
    """
    weights = list(weights)
    n = len(weights)
    if n == 0 or any(w < 1 for w in weights):
        raise InvalidParameterError("weights must be positive integers")
    if k < 1:
        raise InvalidParameterError("need at least one bin")
    if sum(weights) % k:
        raise InvalidParameterError(f"total weight {sum(weights)} not divisible by {k}")
    if scale_override is not None:
        if scale_override < 1:
            raise InvalidParameterError("scale must be >= 1")
        factor = scale_override
    else:
        bound = 3 * k * k * n * n
        factor = bound if any(w < bound for w in weights) else 1
    scaled = [w * factor for w in weights]
    W = sum(scaled)

    spine = [[j * n + i for i in range(n)] for j in range(k)]
    items: list[tuple[int, int]] = []
    nxt = k * n
    for w in scaled:
        items.append((nxt, nxt + w - 1))
        nxt += w

    arcs: set[Arc] = set()
    for j in range(k):
        for i in range(n - 1):
            arcs.add((spine[j][i], spine[j][i + 1]))
    for start, end in items:
        for v in range(start, end):
            arcs.add((v, v + 1))
    for j in range(k):
        for i in range(n):
            arcs.add((spine[j][i], items[i][0]))
        for i in range(n - 1):
            arcs.add((items[i][1], spine[j][i + 1]))
    return scaled, W, spine, items, arcs, factor


def binpacking_to_paths(
    weights: Sequence[int],
    k: int,
    scale_override: int | None = None,
    source_answer: bool | None = None,
) -> ReductionOutput:
    """Bin packing to a chains-only DAG instance (bounded pathwidth gadget).

    Each item becomes a directed path of (scaled) weight many vertices;
    each bin a spine of n vertices rooted at an altruist, with hookup
    arcs into each item path and return arcs back to the next spine
    layer.  Covering every patient with k chains of at most
    W/k + n - 1 edges is exactly an even packing.
    """
    scaled, W, spine, items, arcs, factor = _binpack_gadget(weights, k, scale_override)
    n = len(scaled)
    inst = Instance(
        k * n + W,
        frozenset(spine[j][0] for j in range(k)),
        frozenset(arcs),
        l_p=W // k + n - 1,
        l_c=0,
        t=W + k * (n - 1),
    )
    cert = {
        "spines": spine,
        "items": [
            {"index": i, "weight": w, "scaled": s, "start": items[i][0], "end": items[i][1]}
            for i, (w, s) in enumerate(zip(weights, scaled))
        ],
        "scale_factor": factor,
        "decomposition_bags": _binpack_bags(spine, items),
    }
    return ReductionOutput(
        inst,
        _expected_str(source_answer),
        cert,
        {"l_p": W // k + n, "t": W + k * (n - 1)},
    )


def binpacking_to_cycles(
    weights: Sequence[int],
    k: int,
    scale_override: int | None = None,
    source_answer: bool | None = None,
) -> ReductionOutput:
    """Bin packing to a cycles-only instance (no altruistic vertices).

    Same gadget, closed up: arcs from the last item path's end to every
    spine head, plus from each spine tail to its own head so a bin whose
    cycle skips the last item can still close.  (Without the spine-tail
    arcs, only the cycle through the last item path could return to a
    spine head, leaving the other heads uncoverable for k >= 2.)  The
    length cap W/k + n still forces every cycle to take one spine vertex
    per layer and whole item paths, so equivalence is preserved.
    """
    scaled, W, spine, items, arcs, factor = _binpack_gadget(weights, k, scale_override)
    n = len(scaled)
    extra: list[Arc] = []
    for j in range(k):
        extra.append((items[n - 1][1], spine[j][0]))
        if n >= 2:  # with one layer the spine tail IS the head
            extra.append((spine[j][n - 1], spine[j][0]))
    arcs.update(extra)
    inst = Instance(
        k * n + W,
        frozenset(),
        frozenset(arcs),
        l_p=0,
        l_c=W // k + n,
        t=W + k * n,
    )
    cert = {
        "spines": spine,
        "items": [
            {"index": i, "weight": w, "scaled": s, "start": items[i][0], "end": items[i][1]}
            for i, (w, s) in enumerate(zip(weights, scaled))
        ],
        "scale_factor": factor,
        "extra_closing_arcs": sorted(extra),
        "decomposition_bags": _binpack_bags(spine, items),
    }
    return ReductionOutput(
        inst, _expected_str(source_answer), cert, {"l_c": W // k + n, "t": W + k * n}
    )


def _binpack_bags(spine: list[list[int]], items: list[tuple[int, int]]) -> list[list[int]]:
    """Path-decomposition-style bag sequence (inspection only, unvalidated)."""
    bags = []
    n = len(items)
    for i in range(n):
        bags.append([spine[j][i] for j in range(len(spine))])
        bags.append(list(range(items[i][0], items[i][1] + 1)))
    return bags


def binpacking_witness(out: ReductionOutput, assignment: Sequence[int]) -> Solution:
    """Replay a bin assignment (item index -> bin) as chains or cycles."""
    cert = out.certificate_map
    spine: list[list[int]] = cert["spines"]
    items = cert["items"]
    k, n = len(spine), len(items)
    if len(assignment) != n or any(not 0 <= j < k for j in assignment):
        raise InvalidParameterError("assignment must map every item to a bin")
    walks: list[list[int]] = []
    for j in range(k):
        walk = []
        for i in range(n):
            walk.append(spine[j][i])
            if assignment[i] == j:
                walk.extend(range(items[i]["start"], items[i]["end"] + 1))
        walks.append(walk)
    if out.instance.altruists:
        return Solution(
            chains=tuple(Chain(w[0], tuple(w[1:])) for w in walks)
        )
    return Solution(cycles=tuple(Cycle(tuple(w)) for w in walks))


@dataclass(frozen=True)
class ShiftResult:
    """Fixed-size-3-partition instance produced by the additive shift."""

    items: tuple[int, ...]
    target: int
    shift: int
    expected: str | None  # "no" when infeasibility is already syntactic


def three_partition_shift(
    items: Sequence[int], target: int, shift_c: int | None = None
) -> ShiftResult:
    """Shift a 3-partition instance so feasible groups have exactly 3 elements.

    Adds C to every item and sets the new target to 3C + target.  Any
    C > 2*target works: two shifted items sum below 3C, four exceed the
    new target.  The default C is 10*target; tests pass a smaller one to
    keep oracle-size instances reachable.
    """
    items = list(items)
    if len(items) % 3 or not items:
        raise InvalidParameterError("item count must be a positive multiple of 3")
    if any(a < 1 for a in items):
        raise InvalidParameterError("items must be positive integers")
    if target < 1:
        raise InvalidParameterError("target must be positive")
    c = 10 * target if shift_c is None else shift_c
    if c <= 2 * target:
        raise InvalidParameterError(f"shift C={c} must exceed twice the target {target}")
    m = len(items) // 3
    expected = None
    if any(a > target for a in items) or sum(items) != m * target:
        expected = "no"
    return ShiftResult(
        tuple(a + c for a in items), 3 * c + target, c, expected
    )


def fixed3_to_dag(
    items: Sequence[int],
    target: int,
    source_answer: bool | None = None,
) -> ReductionOutput:
    """Fixed-size-3-partition to a chains-only DAG instance.

    One directed element path per item, m altruists fanning into every
    path head, and concatenation arcs from each path tail to every
    later path head.  m chains of exactly ``target`` edges covering all
    patients pick out m index groups summing to the target each.
    """
    items = list(items)
    if len(items) % 3 or not items:
        raise InvalidParameterError("item count must be a positive multiple of 3")
    if any(a < 1 for a in items):
        raise InvalidParameterError("items must be positive integers")
    m = len(items) // 3
    if sum(items) != m * target:
        raise InvalidParameterError(
            f"items sum to {sum(items)}, need m * target = {m * target}"
        )
    paths: list[tuple[int, int]] = []
    nxt = m
    for a in items:
        paths.append((nxt, nxt + a - 1))
        nxt += a
    arcs: set[Arc] = set()
    for start, end in paths:
        for v in range(start, end):
            arcs.add((v, v + 1))
    for s in range(m):
        for start, _ in paths:
            arcs.add((s, start))
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            arcs.add((paths[i][1], paths[j][0]))
    inst = Instance(
        nxt,
        frozenset(range(m)),
        frozenset(arcs),
        l_p=target,
        l_c=0,
        t=sum(items),
    )
    cert = {
        "altruists": list(range(m)),
        "element_paths": [
            {"index": i, "value": a, "start": paths[i][0], "end": paths[i][1]}
            for i, a in enumerate(items)
        ],
    }
    return ReductionOutput(
        inst,
        _expected_str(source_answer),
        cert,
        {"l_p": target + 1, "t": sum(items) + m},
    )


def fixed3_witness(out: ReductionOutput, groups: Sequence[Sequence[int]]) -> Solution:
    """Replay a grouping (triples of item indices) as altruistic chains."""
    paths = out.certificate_map["element_paths"]
    chains = []
    for r, group in enumerate(groups):
        walk: list[int] = []
        for i in sorted(group):
            walk.extend(range(paths[i]["start"], paths[i]["end"] + 1))
        chains.append(Chain(r, tuple(walk)))
    return Solution(chains=tuple(chains))
