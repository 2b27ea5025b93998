"""Random colorings and deterministic k-perfect hash families.

A coloring assigns each universe element one of k colors.  A family of
colorings is (n, k)-perfect when every k-subset of the n-element universe
is colored injectively by at least one member; iterating such a family
derandomizes the color-coding step of the solver.

Construction here favors correctness and testability over asymptotics:

* universes with n <= k*k are covered directly by a greedy set cover
  (the identity embedding into the intermediate universe is already
  injective, so the first reduction stage is a single trivial map);
* larger universes are first squeezed through every linear map
  ``x -> ((a*x + b) mod p) mod k*k`` for a fixed prime p > max(n, k*k)
  (for any k-subset some pair (a, b) is injective into the k*k-element
  intermediate universe), then composed with a greedy-cover family over
  that intermediate universe.

Greedy cover rounds build one coloring at a time by the method of
conditional expectations with exact integer weights, so the output is
reproducible bit for bit; ties pick the lowest color.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

from .instance import InvalidParameterError, KexError

DEFAULT_K_MAX = 6
DEFAULT_COVER_BUDGET = 2_500_000
DEFAULT_VERIFY_BUDGET = 5_000_000


class PaletteTooLargeError(KexError):
    """Deterministic family construction would exceed its enumeration budget."""


class BudgetExceededError(KexError):
    """Exhaustive family verification would enumerate too many subsets."""


@dataclass(frozen=True)
class Coloring:
    """Color assignment: patients (and optionally altruists) to palettes.

    ``patient_colors`` maps each colored element to a color in 1..k.  For
    family members the universe is ``0..n-1``; solver-side colorings are
    keyed by actual vertex ids.  The altruist palette, when present, is
    independent of the patient palette.
    """

    patient_colors: dict[int, int]
    altruist_colors: dict[int, int] | None = None


@dataclass(frozen=True)
class HashFamily:
    colorings: tuple[Coloring, ...]
    universe_size: int
    palette_size: int

    def __len__(self) -> int:
        return len(self.colorings)

    def tuples(self) -> list[tuple[int, ...]]:
        """Members as plain color vectors over universe 0..n-1."""
        n = self.universe_size
        return [
            tuple(c.patient_colors[x] for x in range(n)) for c in self.colorings
        ]


def random_coloring(universe: int, k: int, seed) -> Coloring:
    """Uniform independent colors over {1..k} for elements 0..universe-1."""
    if universe < 0:
        raise InvalidParameterError("universe must be non-negative")
    if universe > 0 and k < 1:
        raise InvalidParameterError("need k >= 1 for a nonempty universe")
    rng = random.Random(seed)
    return Coloring({x: rng.randint(1, k) for x in range(universe)})


def trial_count(k: int, delta: float) -> int:
    """Colorings needed so a fixed k-vertex witness is missed w.p. <= delta.

    A uniformly random k-coloring makes the witness colorful with
    probability at least k!/k**k >= e**-k, so ceil(e**k * ln(1/delta))
    independent trials suffice.
    """
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError("delta must lie strictly between 0 and 1")
    if k < 0:
        raise InvalidParameterError("k must be non-negative")
    return math.ceil(math.exp(k) * math.log(1.0 / delta))


def _greedy_cover(m: int, k: int) -> list[tuple[int, ...]]:
    """Colorings of range(m) covering every k-subset injectively.

    Each round builds the coloring element by element, choosing the color
    that maximizes the expected number of still-uncovered subsets made
    rainbow (exact integer weights (k-a)! * k**a, lowest color on ties).
    """
    if k >= m:
        return [tuple(range(1, m + 1))] if k == m else [tuple(x + 1 for x in range(m))]
    if k == 1:
        return [(1,) * m]

    weight = [math.factorial(k - a) * k**a for a in range(k + 1)]
    uncovered: list[tuple[int, ...]] = list(combinations(range(m), k))
    family: list[tuple[int, ...]] = []
    while uncovered:
        by_elem: list[list[int]] = [[] for _ in range(m)]
        for idx, sub in enumerate(uncovered):
            for e in sub:
                by_elem[e].append(idx)
        assigned = [0] * len(uncovered)
        used = [0] * len(uncovered)
        alive = [True] * len(uncovered)
        coloring = [0] * m
        for e in range(m):
            gains = [0] * (k + 1)
            for idx in by_elem[e]:
                if not alive[idx]:
                    continue
                w = weight[assigned[idx] + 1]
                u = used[idx]
                for c in range(1, k + 1):
                    if not u >> c & 1:
                        gains[c] += w
            best_c = max(range(1, k + 1), key=lambda c: (gains[c], -c))
            coloring[e] = best_c
            bit = 1 << best_c
            for idx in by_elem[e]:
                if not alive[idx]:
                    continue
                if used[idx] & bit:
                    alive[idx] = False
                else:
                    used[idx] |= bit
                    assigned[idx] += 1
        remaining = [
            sub
            for idx, sub in enumerate(uncovered)
            if not (alive[idx] and assigned[idx] == k)
        ]
        if len(remaining) == len(uncovered):
            raise AssertionError("greedy cover round made no progress")
        uncovered = remaining
        family.append(tuple(coloring))
    return family


def _smallest_prime_above(x: int) -> int:
    p = x + 1
    while True:
        if p > 2 and p % 2 == 0:
            p += 1
            continue
        if all(p % d for d in range(3, int(math.isqrt(p)) + 1, 2)) and p >= 2:
            return p
        p += 1


def deterministic_family(
    n: int,
    k: int,
    k_max: int = DEFAULT_K_MAX,
    cover_budget: int = DEFAULT_COVER_BUDGET,
) -> HashFamily:
    """Deterministic (n, k)-perfect hash family.

    Direct greedy cover when the universe already fits the intermediate
    size (n <= k*k); otherwise the two-stage linear-map composition.  The
    ``k_max`` cap guards the k*k-universe cover (C(k*k, k) enumeration);
    a direct cover is allowed past the cap while C(n, k) stays within
    ``cover_budget``.
    """
    if k < 1:
        raise InvalidParameterError("palette size must be at least 1")
    if n < 0:
        raise InvalidParameterError("universe must be non-negative")
    if n == 0:
        return HashFamily((), 0, k)
    if k == 1:
        return HashFamily((Coloring({x: 1 for x in range(n)}),), n, 1)

    if n <= k * k:
        if k > k_max and math.comb(n, k) > cover_budget:
            raise PaletteTooLargeError(
                f"k={k} over cap {k_max} and C({n},{k}) over budget"
            )
        tuples = _greedy_cover(n, k)
    else:
        if k > k_max:
            raise PaletteTooLargeError(f"k={k} exceeds cap {k_max}")
        ksq = k * k
        p = _smallest_prime_above(max(n, ksq))
        stage1: list[tuple[int, ...]] = []
        seen1: set[tuple[int, ...]] = set()
        for a in range(1, p):
            for b in range(p):
                g = tuple((a * x + b) % p % ksq for x in range(n))
                if g not in seen1:
                    seen1.add(g)
                    stage1.append(g)
        stage2 = _greedy_cover(ksq, k)
        composed: dict[tuple[int, ...], None] = {}
        for g in stage1:
            for f in stage2:
                composed.setdefault(tuple(f[y] for y in g), None)
        tuples = list(composed)

    colorings = tuple(
        Coloring({x: t[x] for x in range(n)}) for t in tuples
    )
    return HashFamily(colorings, n, k)


def verify_family(
    fam: HashFamily, budget: int = DEFAULT_VERIFY_BUDGET
) -> tuple[int, ...] | None:
    """Exhaustively check k-perfectness; return an uncovered k-subset or None.

    Raises :class:`BudgetExceededError` when C(universe, k) exceeds the
    enumeration budget.
    """
    n, k = fam.universe_size, fam.palette_size
    if k > n:
        return None
    if math.comb(n, k) > budget:
        raise BudgetExceededError(f"C({n},{k}) exceeds verify budget {budget}")
    vectors = fam.tuples()
    for sub in combinations(range(n), k):
        for vec in vectors:
            if len({vec[x] for x in sub}) == k:
                break
        else:
            return sub
    return None


def write_family_cache(fam: HashFamily, path: str) -> None:
    """Persist a family: header line ``n k``, then one coloring per line."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{fam.universe_size} {fam.palette_size}\n")
        for vec in fam.tuples():
            fh.write(" ".join(map(str, vec)) + "\n")


def read_family_cache(path: str) -> HashFamily:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise InvalidParameterError("family cache header must be 'n k'")
        n, k = int(header[0]), int(header[1])
        colorings = []
        for line in fh:
            vec = [int(tok) for tok in line.split()]
            if len(vec) != n:
                raise InvalidParameterError("family cache line length mismatch")
            colorings.append(Coloring(dict(enumerate(vec))))
    return HashFamily(tuple(colorings), n, k)
