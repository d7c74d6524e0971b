"""The four matching algorithms and their parameter derivations.

All matchers share one convention: a proposed matching maps g2-vertices to
g1-vertices, stored as an int array with -1 for unassigned. Natural
logarithms are used in every derived formula; the source formulas are
base-consistent, so the choice only has to be uniform.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BudgetError, DerivationError, InputError
from .graph import Graph, gamma_k, n_k
from .metrics import qap_objective
from .model import SeedMap
from .flows import joint_path_count

# vertex status codes in MatchResult.status
UNMATCHED = 0
SEED_COPIED = 1
HIGH_DEGREE = 2
PROPAGATED = 3
FALLBACK = 4

_FLOOR_EPS = 1e-9  # guard against 2.9999999997-style float floors


@dataclass
class ParamSet:
    """Derived algorithm parameters with the formulas that produced them."""

    epsilon: float | None = None
    ell: int | None = None
    m: int | None = None
    tau: float | None = None
    d: int | None = None
    eta: float | None = None
    a: float | None = None
    b: float | None = None


@dataclass
class MatchResult:
    pi_hat: np.ndarray
    status: np.ndarray
    failed: bool = False
    conflicts: list[tuple] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.pi_hat)

    def assigned(self) -> np.ndarray:
        return np.flatnonzero(self.pi_hat >= 0)

    def is_total(self) -> bool:
        return bool(np.all(self.pi_hat >= 0))

    def is_injective(self) -> bool:
        vals = self.pi_hat[self.pi_hat >= 0]
        return len(np.unique(vals)) == len(vals)

    @classmethod
    def empty(cls, n: int) -> "MatchResult":
        return cls(
            pi_hat=np.full(n, -1, dtype=np.int64),
            status=np.zeros(n, dtype=np.int8),
        )


# -- parameter derivations -------------------------------------------------


def derive_params_alg1(n: int, p: float, s: float, epsilon: float) -> ParamSet:
    """Radius, multiplicity and degree threshold for the path-counting matcher."""
    if not 0 < epsilon < 0.5:
        raise InputError("epsilon must lie in (0, 1/2)")
    nps2 = n * p * s * s
    if nps2 <= 1:
        raise DerivationError("need n*p*s^2 > 1 for the radius formula")
    ell = math.floor((0.5 - epsilon) * math.log(n) / math.log(nps2) + _FLOOR_EPS)
    return ParamSet(
        epsilon=epsilon,
        ell=max(1, ell),
        m=math.ceil(2 / epsilon),
        tau=nps2 / math.log(nps2),
    )


def derive_d(n: int, p: float) -> int:
    """Diameter parameter for the dense regime: d = floor(1/a)+1, a = ln(np)/ln(n)."""
    np_ = n * p
    if np_ <= 1:
        raise DerivationError("need n*p > 1 to derive the diameter parameter")
    if np_ >= n:
        raise DerivationError("need n*p < n to derive the diameter parameter")
    a = math.log(np_) / math.log(n)
    return math.floor(1 / a + _FLOOR_EPS) + 1


def derive_params_alg3(n: int, p: float, alpha: float, epsilon: float) -> ParamSet:
    """Radius and witness threshold for the sparse pair-witness matcher."""
    if not 0 < epsilon < 0.5:
        raise InputError("epsilon must lie in (0, 1/2)")
    if not 0 <= alpha <= 1:
        raise InputError("alpha must lie in [0, 1]")
    np_ = n * p
    if np_ <= 1:
        raise DerivationError("need n*p > 1 for the radius formula")
    ell = math.floor((1 - epsilon) * math.log(n) / math.log(np_) + _FLOOR_EPS)
    ell = max(1, ell)
    eta = 4.0 ** (2 * ell + 2) * n ** (1 - 2 * epsilon) * alpha
    return ParamSet(epsilon=epsilon, ell=ell, eta=eta)


# -- shared assignment plumbing -------------------------------------------


def _detect_conflicts(
    candidates: list[tuple[int, int]]
) -> tuple[list[tuple[int, int]], list[tuple]]:
    """Split candidate (i1, i2) pairs into clean assignments and conflicts.

    Candidates are examined in sorted order so the outcome is independent of
    how they were produced. A vertex on either side appearing with two
    distinct partners is a conflict.
    """
    candidates = sorted(set(candidates))
    by_i1: dict[int, set[int]] = {}
    by_i2: dict[int, set[int]] = {}
    for i1, i2 in candidates:
        by_i1.setdefault(i1, set()).add(i2)
        by_i2.setdefault(i2, set()).add(i1)
    conflicts: list[tuple] = []
    clean: list[tuple[int, int]] = []
    for i1, i2 in candidates:
        if len(by_i1[i1]) > 1 or len(by_i2[i2]) > 1:
            conflicts.append(("conflict", i1, i2))
        else:
            clean.append((i1, i2))
    return clean, conflicts


def _copy_seeds(result: MatchResult, seeds: SeedMap) -> None:
    for i2 in seeds.seeded():
        result.pi_hat[i2] = seeds.pi0[i2]
        result.status[i2] = SEED_COPIED


def _random_completion(
    result: MatchResult, rng: np.random.Generator
) -> MatchResult:
    """Fill unassigned vertices with a uniformly random bijection onto the
    unused g1-vertices; on a conflicted result, keep only the seeded entries."""
    n = result.n
    if not result.is_injective():
        keep = result.status == SEED_COPIED
        result.pi_hat = np.where(keep, result.pi_hat, -1)
        result.status = np.where(keep, result.status, UNMATCHED).astype(np.int8)
    free2 = np.flatnonzero(result.pi_hat < 0)
    if free2.size:
        used = set(result.pi_hat[result.pi_hat >= 0].tolist())
        free1 = np.array([v for v in range(n) if v not in used], dtype=np.int64)
        result.pi_hat[free2] = rng.permutation(free1)
        result.status[free2] = FALLBACK
    return result


# -- Algorithm: counting independent ell-paths to seeded vertices ----------


def match_high_degree_alg1(
    g1: Graph, g2: Graph, seeds: SeedMap, ell: int, m: int
) -> MatchResult:
    """Assign pairs whose joint layered network carries at least m units of flow.

    Candidate pairs are prefiltered by counting common seeded layer-ell
    vertices (an upper bound on the flow), so the expensive max-flow runs
    only where it can possibly reach m.
    """
    if ell < 1 or m < 1:
        raise InputError("ell and m must be at least 1")
    n = g2.n
    result = MatchResult.empty(n)
    seeded = seeds.seeded()
    seeded_partners = set(int(seeds.pi0[j]) for j in seeded)
    unseeded1 = np.array(
        [v for v in range(g1.n) if v not in seeded_partners], dtype=np.int64
    )
    unseeded1_mask = np.zeros(g1.n, dtype=bool)
    unseeded1_mask[unseeded1] = True
    counts: dict[tuple[int, int], int] = {}
    for j in seeded:
        # distance is symmetric: BFS from the seed finds every root whose
        # layer-ell set contains it
        roots2 = np.flatnonzero(g2.distances_from(int(j), max_depth=ell) == ell)
        roots1 = np.flatnonzero(
            g1.distances_from(int(seeds.pi0[j]), max_depth=ell) == ell
        )
        roots2 = roots2[seeds.pi0[roots2] < 0]
        roots1 = roots1[unseeded1_mask[roots1]]
        for i2 in roots2:
            for i1 in roots1:
                key = (int(i1), int(i2))
                counts[key] = counts.get(key, 0) + 1
    candidates = []
    for (i1, i2), c in sorted(counts.items()):
        if c >= m and joint_path_count(g1, i1, g2, i2, ell, seeds) >= m:
            candidates.append((i1, i2))
    clean, conflicts = _detect_conflicts(candidates)
    for i1, i2 in clean:
        result.pi_hat[i2] = i1
        result.status[i2] = HIGH_DEGREE
    if conflicts:
        result.failed = True
        result.conflicts.extend(conflicts)
    return result


def propagate_low_degree(
    g1: Graph, g2: Graph, partial: MatchResult, seeds: SeedMap
) -> MatchResult:
    """Copy seeds, then repeatedly match unmatched pairs adjacent to a matched
    pair until a fixpoint; concurrent conflicting candidates declare failure."""
    if partial.failed:
        raise InputError("cannot propagate from a failed partial matching")
    result = MatchResult(
        pi_hat=partial.pi_hat.copy(),
        status=partial.status.copy(),
        conflicts=list(partial.conflicts),
    )
    _copy_seeds(result, seeds)
    if not result.is_injective():
        result.failed = True
        result.conflicts.append(("seed-overlap",))
        return result
    frontier = [int(i2) for i2 in result.assigned()]
    while frontier:
        used1 = set(result.pi_hat[result.pi_hat >= 0].tolist())
        candidates: list[tuple[int, int]] = []
        for j2 in frontier:
            j1 = int(result.pi_hat[j2])
            cand1 = [int(v) for v in g1.neighbors(j1) if v not in used1]
            cand2 = [int(v) for v in g2.neighbors(j2) if result.pi_hat[v] < 0]
            for i1 in cand1:
                for i2 in cand2:
                    candidates.append((i1, i2))
        if not candidates:
            break
        clean, conflicts = _detect_conflicts(candidates)
        if conflicts:
            result.failed = True
            result.conflicts.extend(conflicts)
            return result
        frontier = []
        for i1, i2 in clean:
            result.pi_hat[i2] = i1
            result.status[i2] = PROPAGATED
            frontier.append(i2)
    return result


def match_alg1(
    g1: Graph,
    g2: Graph,
    seeds: SeedMap,
    params: ParamSet,
    rng: np.random.Generator,
) -> MatchResult:
    """Full path-counting matcher: high-degree flow matching, low-degree
    propagation, and a random completion whenever anything is left over."""
    partial = match_high_degree_alg1(g1, g2, seeds, params.ell, params.m)
    if partial.failed:
        result = partial
        _copy_seeds(result, seeds)
    else:
        result = propagate_low_degree(g1, g2, partial, seeds)
    if result.failed or not result.is_total():
        result = _random_completion(result, rng)
    return result


# -- Algorithm: (d-1)-hop witness, dense regime ----------------------------


def compute_witness(
    g1: Graph, g2: Graph, seeds: SeedMap, r: int, i1: int, i2: int
) -> int:
    """Seeded vertices within distance r of i2 in g2 whose partners are
    within distance r of i1 in g1."""
    if r < 1:
        raise InputError("radius must be at least 1")
    ball1 = np.zeros(g1.n, dtype=bool)
    ball1[n_k(g1, i1, r)] = True
    ball2 = np.zeros(g2.n, dtype=bool)
    ball2[n_k(g2, i2, r)] = True
    seeded = seeds.seeded()
    return int(np.count_nonzero(ball1[seeds.pi0[seeded]] & ball2[seeded]))


def match_alg2(g1: Graph, g2: Graph, seeds: SeedMap, d: int) -> MatchResult:
    """Dense-regime matcher: every unseeded g2-vertex takes the unseeded
    g1-vertex maximizing the (d-1)-hop seeded witness count; ties go to the
    lowest id and are logged as ambiguities."""
    if d < 2:
        raise InputError("d must be at least 2")
    r = d - 1
    n = g2.n
    result = MatchResult.empty(n)
    _copy_seeds(result, seeds)
    seeded = seeds.seeded()
    partners = seeds.pi0[seeded]
    partner_mask = np.zeros(g1.n, dtype=bool)
    partner_mask[partners] = True
    unseeded1 = np.flatnonzero(~partner_mask)
    unseeded2 = np.flatnonzero(seeds.pi0 < 0)
    if unseeded2.size == 0:
        return result
    if unseeded1.size == 0:
        return result
    k = len(seeded)
    # membership matrices via one truncated BFS per seed
    a = np.zeros((len(unseeded1), k), dtype=np.float32)
    b = np.zeros((len(unseeded2), k), dtype=np.float32)
    pos1 = {int(v): i for i, v in enumerate(unseeded1)}
    pos2 = {int(v): i for i, v in enumerate(unseeded2)}
    for col, j in enumerate(seeded):
        ball = n_k(g1, int(seeds.pi0[j]), r)
        for v in ball:
            i = pos1.get(int(v))
            if i is not None:
                a[i, col] = 1.0
        ball = n_k(g2, int(j), r)
        for v in ball:
            i = pos2.get(int(v))
            if i is not None:
                b[i, col] = 1.0
    witness = a @ b.T  # rows: unseeded g1, cols: unseeded g2
    candidates: list[tuple[int, int]] = []
    for c, i2 in enumerate(unseeded2):
        col = witness[:, c]
        top = col.max()
        winners = np.flatnonzero(col == top)
        i1 = int(unseeded1[winners[0]])
        if len(winners) > 1:
            result.conflicts.append(
                ("ambiguous", int(i2), [int(unseeded1[w]) for w in winners])
            )
        candidates.append((i1, int(i2)))
    by_i1: dict[int, list[int]] = {}
    for i1, i2 in candidates:
        by_i1.setdefault(i1, []).append(i2)
    for i1, i2 in sorted(candidates, key=lambda t: (t[1], t[0])):
        result.pi_hat[i2] = i1
        result.status[i2] = HIGH_DEGREE
        if len(by_i1[i1]) > 1:
            result.failed = True
    for i1, i2s in sorted(by_i1.items()):
        if len(i2s) > 1:
            result.conflicts.append(("conflict", i1, sorted(i2s)))
    return result


# -- Algorithm: pair witness, sparse regime --------------------------------


def _seed_ball_sets(
    g1: Graph,
    g2: Graph,
    seeds: SeedMap,
    nbrs1: np.ndarray,
    nbrs2: np.ndarray,
    ell: int,
    blocked: tuple[int, ...],
) -> tuple[dict[int, frozenset], dict[int, frozenset]]:
    seeded = seeds.seeded()
    partner_of = {int(seeds.pi0[j]): int(j) for j in seeded}
    seeded_set = set(int(j) for j in seeded)
    s1 = {}
    for i in nbrs1:
        ball = n_k(g1, int(i), ell, blocked=tuple(set(blocked) - {int(i)}))
        s1[int(i)] = frozenset(
            partner_of[int(v)] for v in ball if int(v) in partner_of
        )
    s2 = {}
    for j in nbrs2:
        ball = n_k(g2, int(j), ell, blocked=tuple(set(blocked) - {int(j)}))
        s2[int(j)] = frozenset(int(v) for v in ball if int(v) in seeded_set)
    return s1, s2


def compute_pair_witness(
    g1: Graph,
    g2: Graph,
    seeds: SeedMap,
    u: int,
    v: int,
    i: int,
    j: int,
    ell: int,
    mode: str = "fast",
) -> int:
    """Witness count for neighbor pair (i, j) of candidate pair (u, v).

    exact mode minimizes over one extra removed vertex per side (x != i on
    the g1 side, y != j on the g2 side; removing the probe itself would
    trivialize the count). fast mode removes only {u, v} from both graphs
    (each side keeping its own probe), an upper bound on the exact value.
    """
    if not g1.has_edge(u, i):
        raise InputError("i must be a neighbor of u in g1")
    if not g2.has_edge(v, j):
        raise InputError("j must be a neighbor of v in g2")
    seeded = seeds.seeded()
    partner_of = {int(seeds.pi0[t]): int(t) for t in seeded}
    seeded_set = set(int(t) for t in seeded)

    def side1(blocked) -> frozenset:
        ball = n_k(g1, i, ell, blocked=blocked)
        return frozenset(partner_of[int(w)] for w in ball if int(w) in partner_of)

    def side2(blocked) -> frozenset:
        ball = n_k(g2, j, ell, blocked=blocked)
        return frozenset(int(w) for w in ball if int(w) in seeded_set)

    if mode == "fast":
        # never block a probe's own root: that collapses its ball and breaks
        # the fast >= exact guarantee when vertex ids coincide
        return len(side1(tuple({u, v} - {i})) & side2(tuple({u, v} - {j})))
    if mode != "exact":
        raise InputError(f"unknown mode {mode!r}")
    sets1 = [side1(tuple({u, x})) for x in range(g1.n) if x != i]
    sets2 = [side2(tuple({v, y})) for y in range(g2.n) if y != j]
    best = None
    for s1 in sets1:
        for s2 in sets2:
            c = len(s1 & s2)
            if best is None or c < best:
                best = c
                if best == 0:
                    return 0
    return best or 0


def match_high_degree_alg3(
    g1: Graph, g2: Graph, seeds: SeedMap, ell: int, eta: float, mode: str = "fast"
) -> MatchResult:
    """Assign unseeded pairs (u, v) whose count of neighbor pairs with
    pair-witness >= eta reaches ln(n)/ln(ln(n)) - 1."""
    n = g2.n
    result = MatchResult.empty(n)
    threshold = math.log(n) / math.log(math.log(n)) - 1 if n > 3 else math.inf
    seeded = seeds.seeded()
    partner_mask = np.zeros(g1.n, dtype=bool)
    partner_mask[seeds.pi0[seeded]] = True
    unseeded1 = np.flatnonzero(~partner_mask)
    unseeded2 = np.flatnonzero(seeds.pi0 < 0)
    candidates: list[tuple[int, int]] = []
    for u in unseeded1:
        nbrs1 = g1.neighbors(int(u))
        if nbrs1.size == 0:
            continue
        for v in unseeded2:
            nbrs2 = g2.neighbors(int(v))
            if nbrs2.size == 0:
                continue
            if mode == "fast":
                blocked = tuple({int(u), int(v)})
                s1, s2 = _seed_ball_sets(g1, g2, seeds, nbrs1, nbrs2, ell, blocked)
                z = sum(
                    1
                    for i in nbrs1
                    for j in nbrs2
                    if len(s1[int(i)] & s2[int(j)]) >= eta
                )
            else:
                z = sum(
                    1
                    for i in nbrs1
                    for j in nbrs2
                    if compute_pair_witness(
                        g1, g2, seeds, int(u), int(v), int(i), int(j), ell, mode
                    )
                    >= eta
                )
            if z >= threshold:
                candidates.append((int(u), int(v)))
    clean, conflicts = _detect_conflicts(candidates)
    for i1, i2 in clean:
        result.pi_hat[i2] = i1
        result.status[i2] = HIGH_DEGREE
    if conflicts:
        result.failed = True
        result.conflicts.extend(conflicts)
    return result


def match_alg3(
    g1: Graph,
    g2: Graph,
    seeds: SeedMap,
    params: ParamSet,
    mode: str = "fast",
    rng: np.random.Generator | None = None,
) -> MatchResult:
    """Sparse pair-witness matcher with the same tail steps as match_alg1."""
    rng = rng or np.random.default_rng(0)
    partial = match_high_degree_alg3(g1, g2, seeds, params.ell, params.eta, mode)
    if partial.failed:
        result = partial
        _copy_seeds(result, seeds)
    else:
        result = propagate_low_degree(g1, g2, partial, seeds)
    if result.failed or not result.is_total():
        result = _random_completion(result, rng)
    return result


# -- seedless matching via seed enumeration --------------------------------


def _best_completion(
    g1: Graph,
    g2: Graph,
    partial_pi: np.ndarray,
    completion_budget: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Extend an injective partial map to a total permutation.

    If the number of completions is within budget, take the one minimizing
    the edge-disagreement objective (ties lexicographic); otherwise random.
    """
    n = len(partial_pi)
    free2 = [i for i in range(n) if partial_pi[i] < 0]
    used = set(int(x) for x in partial_pi[partial_pi >= 0])
    free1 = [v for v in range(n) if v not in used]
    if not free2:
        return partial_pi
    if math.factorial(len(free2)) <= completion_budget:
        best_pi = None
        best_obj = None
        for images in itertools.permutations(free1):
            pi = partial_pi.copy()
            pi[free2] = images
            obj = qap_objective(g1, g2, pi)
            key = (obj, tuple(pi.tolist()))
            if best_obj is None or key < best_obj:
                best_obj = key
                best_pi = pi
        return best_pi
    pi = partial_pi.copy()
    pi[free2] = rng.permutation(np.asarray(free1, dtype=np.int64))
    return pi


def match_seedless(
    g1: Graph,
    g2: Graph,
    alpha: float,
    inner: Callable[[Graph, Graph, SeedMap], MatchResult],
    rng: np.random.Generator,
    budget: int = 10**6,
    completion_budget: int = 5040,
) -> MatchResult:
    """Enumerate seed hypotheses for a random probe set and keep the mapping
    with the fewest edge disagreements.

    The probe set holds each g1-vertex independently with probability alpha;
    every injective assignment of probes to g2-vertices is tried as a seed
    map for the inner matcher. When the non-probe remainder is small enough
    to enumerate, the bare hypothesis is also completed exhaustively, so at
    tiny scale the search covers every permutation. Raises BudgetError if
    the hypothesis count exceeds the budget.
    """
    if g1.n != g2.n:
        raise InputError("graphs must have the same vertex count")
    n = g1.n
    probes = sorted(int(v) for v in np.flatnonzero(rng.random(n) < alpha))
    k = len(probes)
    if math.perm(n, k) > budget:
        raise BudgetError(
            f"enumerating {math.perm(n, k)} seed hypotheses exceeds budget {budget}"
        )
    best_pi = None
    best_key = None
    for images in itertools.permutations(range(n), k):
        pi0 = np.full(n, -1, dtype=np.int64)
        for i1, i2 in zip(probes, images):
            pi0[i2] = i1
        seeds = SeedMap(pi0)
        inner_result = inner(g1, g2, seeds)
        partial = np.full(n, -1, dtype=np.int64)
        used: set[int] = set()
        for i2 in range(n):
            i1 = int(inner_result.pi_hat[i2])
            if i1 >= 0 and i1 not in used:
                partial[i2] = i1
                used.add(i1)
        proposals = [_best_completion(g1, g2, partial, completion_budget, rng)]
        if math.factorial(n - k) <= completion_budget:
            bare = np.full(n, -1, dtype=np.int64)
            for i1, i2 in zip(probes, images):
                bare[i2] = i1
            proposals.append(_best_completion(g1, g2, bare, completion_budget, rng))
        for pi in proposals:
            obj = qap_objective(g1, g2, pi)
            key = (obj, tuple(pi.tolist()))
            if best_key is None or key < best_key:
                best_key = key
                best_pi = pi
    result = MatchResult(
        pi_hat=best_pi,
        status=np.full(n, HIGH_DEGREE, dtype=np.int8),
        failed=False,
    )
    result.conflicts.append(("qap", int(best_key[0])))
    return result
