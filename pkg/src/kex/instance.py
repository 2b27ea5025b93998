"""Data model for kidney-exchange clearing instances and solutions.

An instance is a directed compatibility graph over vertices ``0..n-1``.
A subset of vertices are altruistic donors; the rest are patient-donor
pairs.  Arcs never point into an altruist and self-loops are forbidden.
A solution is a vertex-disjoint collection of trading cycles (patients
only, at most ``l_c`` edges) and trading chains (altruist-rooted paths,
at most ``l_p`` edges).  Lengths count edges throughout: a chain covering
p patients has p edges, a cycle on c patients has c edges.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

Arc = tuple[int, int]


class KexError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(KexError):
    """A generator or solver was called with out-of-contract parameters."""


@dataclass(frozen=True)
class Issue:
    """One violated invariant, identified by a stable code plus offenders."""

    code: str
    where: tuple[int, ...] = ()

    def __str__(self) -> str:
        if not self.where:
            return self.code
        return f"{self.code}{self.where!r}"


class SolutionError(KexError):
    """Raised by :func:`verify_solution`; carries every violated invariant."""

    def __init__(self, issues: Sequence[Issue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))

    def codes(self) -> set[str]:
        return {i.code for i in self.issues}


@dataclass(frozen=True)
class Instance:
    """A compatibility graph with altruist set, length bounds, and target.

    Immutable and hashable; safe to share across workers.  Construction
    does not validate (so malformed inputs can be diagnosed); call
    :func:`validate_instance` or :func:`require_valid`.
    """

    n: int
    altruists: frozenset[int]
    arcs: frozenset[Arc]
    l_p: int
    l_c: int
    t: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "altruists", frozenset(self.altruists))
        object.__setattr__(self, "arcs", frozenset(map(tuple, self.arcs)))

    def patients(self) -> list[int]:
        """Non-altruistic vertex ids, ascending."""
        return [v for v in range(self.n) if v not in self.altruists]

    @property
    def patient_count(self) -> int:
        return self.n - len(self.altruists)

    def sorted_arcs(self) -> list[Arc]:
        return sorted(self.arcs)

    def out_adj(self) -> list[list[int]]:
        """Adjacency lists (successors sorted ascending), index = vertex id."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in sorted(self.arcs):
            adj[u].append(v)
        return adj


@dataclass(frozen=True)
class Chain:
    """An altruist-rooted trading chain: ``start`` then covered patients."""

    start: int
    patients: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "patients", tuple(self.patients))

    @property
    def length(self) -> int:
        """Edge count, equal to the number of covered patients."""
        return len(self.patients)


@dataclass(frozen=True)
class Cycle:
    """A trading cycle among patients; the closing arc returns to the first."""

    patients: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "patients", tuple(self.patients))

    @property
    def length(self) -> int:
        return len(self.patients)


@dataclass(frozen=True)
class Solution:
    chains: tuple[Chain, ...] = ()
    cycles: tuple[Cycle, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "chains", tuple(self.chains))
        object.__setattr__(self, "cycles", tuple(self.cycles))

    @property
    def coverage(self) -> int:
        """Patients covered, assuming disjointness (verify first)."""
        return sum(len(c.patients) for c in self.chains) + sum(
            len(c.patients) for c in self.cycles
        )


def canonical_cycle(patients: Sequence[int]) -> tuple[int, ...]:
    """Rotate a cycle's vertex sequence so it starts at its minimum id."""
    seq = tuple(patients)
    i = seq.index(min(seq))
    return seq[i:] + seq[:i]


def validate_instance(inst: Instance) -> list[Issue]:
    """Return every violated instance invariant (empty list means valid).

    Codes: ``self_loop(u)``, ``arc_into_altruist(u, v)``,
    ``vertex_out_of_range(id)``, ``invalid_parameter``.
    """
    issues: list[Issue] = []
    if inst.n < 0 or inst.l_p < 0 or inst.l_c < 0 or inst.t < 0:
        issues.append(Issue("invalid_parameter"))
    for a in sorted(inst.altruists):
        if not 0 <= a < inst.n:
            issues.append(Issue("vertex_out_of_range", (a,)))
    seen_range: set[int] = set()
    for u, v in sorted(inst.arcs):
        for w in (u, v):
            if not 0 <= w < inst.n and w not in seen_range:
                issues.append(Issue("vertex_out_of_range", (w,)))
                seen_range.add(w)
        if u == v:
            issues.append(Issue("self_loop", (u,)))
        elif v in inst.altruists:
            issues.append(Issue("arc_into_altruist", (u, v)))
    return issues


def require_valid(inst: Instance) -> Instance:
    """Raise :class:`InvalidParameterError` unless the instance is valid."""
    issues = validate_instance(inst)
    if issues:
        raise InvalidParameterError("; ".join(map(str, issues)))
    return inst


def verify_solution(inst: Instance, sol: Solution) -> int:
    """Check a solution against an instance and return its patient coverage.

    Raises :class:`SolutionError` listing every violation when any chain,
    cycle, or disjointness invariant fails.  Coverage counts distinct
    patient vertices only; chain starts (altruists) are not counted.

    Issue codes: ``missing_arc(u, v)``, ``chain_too_long(idx)``,
    ``cycle_too_long(idx)``, ``cycle_too_short(idx)``,
    ``chain_start_not_altruist(idx)``, ``vertex_reused(v)``,
    ``empty_chain(idx)``, ``vertex_out_of_range(v)``.
    """
    issues: list[Issue] = []
    used: set[int] = set()
    reused: set[int] = set()

    def claim(v: int) -> None:
        if v in used and v not in reused:
            issues.append(Issue("vertex_reused", (v,)))
            reused.add(v)
        used.add(v)

    def check_range(v: int) -> bool:
        if not 0 <= v < inst.n:
            issues.append(Issue("vertex_out_of_range", (v,)))
            return False
        return True

    for idx, chain in enumerate(sol.chains):
        if check_range(chain.start) and chain.start not in inst.altruists:
            issues.append(Issue("chain_start_not_altruist", (idx,)))
        claim(chain.start)
        if not chain.patients:
            issues.append(Issue("empty_chain", (idx,)))
            continue
        if chain.length > inst.l_p:
            issues.append(Issue("chain_too_long", (idx,)))
        prev = chain.start
        for v in chain.patients:
            check_range(v)
            claim(v)
            if (prev, v) not in inst.arcs:
                issues.append(Issue("missing_arc", (prev, v)))
            prev = v

    for idx, cyc in enumerate(sol.cycles):
        if len(cyc.patients) < 2:
            issues.append(Issue("cycle_too_short", (idx,)))
        if cyc.length > inst.l_c:
            issues.append(Issue("cycle_too_long", (idx,)))
        for v in cyc.patients:
            check_range(v)
            claim(v)
        for u, v in zip(cyc.patients, cyc.patients[1:] + cyc.patients[:1]):
            if (u, v) not in inst.arcs:
                issues.append(Issue("missing_arc", (u, v)))

    if issues:
        raise SolutionError(issues)
    return sol.coverage


def admissible_pairs(n: int, altruists: Iterable[int]) -> list[Arc]:
    """All ordered pairs that may legally carry an arc, sorted."""
    alt = set(altruists)
    return [
        (u, v)
        for u in range(n)
        for v in range(n)
        if u != v and v not in alt
    ]


def random_instance(
    n: int,
    altruist_count: int,
    arc_prob: float,
    l_p: int,
    l_c: int,
    seed: int,
    t: int = 0,
) -> Instance:
    """Erdos-Renyi style instance: each admissible arc appears independently.

    Altruists are vertices ``0..altruist_count-1``.  Deterministic for a
    fixed seed.
    """
    if n < 0 or not 0 <= altruist_count <= n:
        raise InvalidParameterError(f"altruist_count {altruist_count} not in [0, {n}]")
    if not 0.0 <= arc_prob <= 1.0:
        raise InvalidParameterError(f"arc_prob {arc_prob} not a probability")
    if l_p < 0 or l_c < 0 or t < 0:
        raise InvalidParameterError("l_p, l_c, t must be non-negative")
    rng = random.Random(seed)
    altruists = frozenset(range(altruist_count))
    arcs = [
        pair for pair in admissible_pairs(n, altruists) if rng.random() < arc_prob
    ]
    return Instance(n, altruists, frozenset(arcs), l_p, l_c, t)


def planted_instance(
    k_patients: int,
    chain_lens: Sequence[int],
    cycle_lens: Sequence[int],
    noise_arcs: int,
    seed: int,
) -> tuple[Instance, Solution]:
    """Build an instance with a known optimal solution planted inside.

    One altruist is created per requested chain.  Patients are split into
    disjoint chains/cycles of the given sizes (sizes sum to
    ``k_patients``; cycles need >= 2).  ``l_p``/``l_c`` are set to the
    largest planted chain/cycle, the target to ``k_patients``, and then
    ``noise_arcs`` extra admissible arcs are added (capped at the number
    available).  Noise never lowers the optimum: the planted solution
    already covers every patient.
    """
    chain_lens = list(chain_lens)
    cycle_lens = list(cycle_lens)
    if any(c < 1 for c in chain_lens):
        raise InvalidParameterError("chains need at least one patient")
    if any(c < 2 for c in cycle_lens):
        raise InvalidParameterError("cycles need at least two patients")
    if sum(chain_lens) + sum(cycle_lens) != k_patients:
        raise InvalidParameterError("component sizes must sum to k_patients")
    if noise_arcs < 0:
        raise InvalidParameterError("noise_arcs must be non-negative")

    n_alt = len(chain_lens)
    n = n_alt + k_patients
    altruists = frozenset(range(n_alt))
    arcs: set[Arc] = set()
    chains: list[Chain] = []
    cycles: list[Cycle] = []
    nxt = n_alt
    for a, length in enumerate(chain_lens):
        block = list(range(nxt, nxt + length))
        nxt += length
        prev = a
        for v in block:
            arcs.add((prev, v))
            prev = v
        chains.append(Chain(a, tuple(block)))
    for length in cycle_lens:
        block = list(range(nxt, nxt + length))
        nxt += length
        for u, v in zip(block, block[1:] + block[:1]):
            arcs.add((u, v))
        cycles.append(Cycle(tuple(block)))

    rng = random.Random(seed)
    candidates = [p for p in admissible_pairs(n, altruists) if p not in arcs]
    take = min(noise_arcs, len(candidates))
    arcs.update(rng.sample(candidates, take))

    inst = Instance(
        n,
        altruists,
        frozenset(arcs),
        l_p=max(chain_lens, default=0),
        l_c=max(cycle_lens, default=0),
        t=k_patients,
    )
    return inst, Solution(tuple(chains), tuple(cycles))


# --- JSON codecs (field names are frozen: this is the on-disk format) ---

INSTANCE_FIELDS = ("n", "altruists", "arcs", "l_p", "l_c", "t")


def instance_to_dict(inst: Instance) -> dict:
    return {
        "n": inst.n,
        "altruists": sorted(inst.altruists),
        "arcs": [list(a) for a in sorted(inst.arcs)],
        "l_p": inst.l_p,
        "l_c": inst.l_c,
        "t": inst.t,
    }


def instance_from_dict(doc: dict) -> Instance:
    """Decode the instance JSON object; unknown or missing fields reject."""
    if not isinstance(doc, dict):
        raise InvalidParameterError("instance document must be a JSON object")
    extra = set(doc) - set(INSTANCE_FIELDS)
    missing = set(INSTANCE_FIELDS) - set(doc)
    if extra or missing:
        raise InvalidParameterError(
            f"bad instance fields: extra={sorted(extra)} missing={sorted(missing)}"
        )
    for key in ("n", "l_p", "l_c", "t"):
        if not isinstance(doc[key], int) or isinstance(doc[key], bool):
            raise InvalidParameterError(f"field {key!r} must be an integer")
    try:
        altruists = frozenset(int(a) for a in doc["altruists"])
        arcs = frozenset((int(u), int(v)) for u, v in doc["arcs"])
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(f"malformed altruists/arcs: {exc}") from exc
    return Instance(doc["n"], altruists, arcs, doc["l_p"], doc["l_c"], doc["t"])


def solution_to_dict(sol: Solution) -> dict:
    return {
        "chains": [[c.start, *c.patients] for c in sol.chains],
        "cycles": [list(c.patients) for c in sol.cycles],
    }


def solution_from_dict(doc: dict) -> Solution:
    if not isinstance(doc, dict) or set(doc) != {"chains", "cycles"}:
        raise InvalidParameterError('solution document needs exactly "chains" and "cycles"')
    chains = []
    for row in doc["chains"]:
        if len(row) < 2:
            raise InvalidParameterError("a chain lists its altruist then >=1 patient")
        chains.append(Chain(int(row[0]), tuple(int(v) for v in row[1:])))
    cycles = [Cycle(tuple(int(v) for v in row)) for row in doc["cycles"]]
    return Solution(tuple(chains), tuple(cycles))
