"""Objective functions, recovery metrics, and structural diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .flows import count_disjoint_paths_to_set
from .graph import Graph, gamma_k, graph_and, n_k
from .model import CorrelatedInstance, Permutation, SeedMap


def qap_objective(g1: Graph, g2: Graph, pi) -> int:
    """Number of unordered vertex pairs on which g1 under pi and g2 disagree.

    pi maps g2-vertices to g1-vertices and must be a total bijection.
    Equals half the squared Frobenius norm of the adjacency difference.
    """
    forward = pi.forward if isinstance(pi, Permutation) else np.asarray(pi)
    forward = Permutation(forward).forward  # validates bijectivity
    if g1.n != g2.n or len(forward) != g1.n:
        raise InputError("permutation length must match graph size")
    n = g1.n
    keys2 = g2.edge_keys()
    lo = forward[keys2 // n]
    hi = forward[keys2 % n]
    mapped = np.minimum(lo, hi) * n + np.maximum(lo, hi)
    mapped.sort()
    agree = len(np.intersect1d(g1.edge_keys(), mapped, assume_unique=True))
    return int(g1.num_edges + g2.num_edges - 2 * agree)


def accuracy(result, pi_star: Permutation) -> tuple[float, bool]:
    """Fraction of vertices whose proposed partner is the true one.

    Unassigned vertices count as wrong; exact recovery means fraction 1.
    """
    pi_hat = np.asarray(result.pi_hat)
    correct = int(np.count_nonzero((pi_hat >= 0) & (pi_hat == pi_star.forward)))
    frac = correct / len(pi_hat)
    return frac, frac == 1.0


def converse_certificate(inst: CorrelatedInstance, seeds: SeedMap) -> int:
    """Number of unseeded vertices isolated in the intersection graph.

    A count of at least 2 certifies that exact recovery fails with
    probability at least 1/2 for every estimator, conditional on this event.
    """
    inter = graph_and(inst.g1_star, inst.g2)
    isolated = inter.degrees() == 0
    unseeded = seeds.pi0 < 0
    return int(np.count_nonzero(isolated & unseeded))


@dataclass
class PropertyReport:
    no_isolated: bool
    isolated_witnesses: list[int]
    pair_neighborhood_ok: bool
    pair_witnesses: list[tuple[int, int]]
    high_degree_paths_ok: bool
    high_degree_witnesses: list[int]
    backtrack_paths_ok: bool | None
    backtrack_witnesses: list[int]

    def all_checked_ok(self) -> bool:
        checks = [self.no_isolated, self.pair_neighborhood_ok, self.high_degree_paths_ok]
        if self.backtrack_paths_ok is not None:
            checks.append(self.backtrack_paths_ok)
        return all(checks)


def _max_disjoint_fixed_length_paths(
    g: Graph, root: int, ell: int, targets: set[int], cap: int
) -> int:
    """Brute-force: largest family of length-ell paths from root to distinct
    targets, pairwise vertex-disjoint except at the root.

    Unlike the flow construction this admits non-geodesic paths, which the
    backtrack diagnostic needs. Exponential; only for small neighborhoods.
    Stops early once `cap` disjoint paths are found.
    """
    paths: list[list[int]] = []

    def extend(path: list[int]) -> None:
        if len(path) - 1 == ell:
            if path[-1] in targets:
                paths.append(path[1:])
            return
        for w in g.neighbors(path[-1]):
            if w not in path:
                extend(path + [int(w)])

    extend([root])
    best = 0

    def pack(i: int, used: set[int], count: int) -> int:
        nonlocal best
        if count > best:
            best = count
        if best >= cap or i >= len(paths):
            return best
        if count + (len(paths) - i) <= best:
            return best
        p = paths[i]
        # vertex-disjointness away from the root implies distinct endpoints
        if not used.intersection(p):
            pack(i + 1, used | set(p), count + 1)
        pack(i + 1, used, count)
        return best

    pack(0, set(), 0)
    return best


def check_graph_properties(
    g: Graph,
    tau: float,
    ell: int,
    m: int,
    seeds: SeedMap,
    check_backtrack: bool = False,
    backtrack_cap_vertices: int = 64,
) -> PropertyReport:
    """Diagnostics for the structural conditions the sparse matcher relies on.

    (a) no isolated vertex; (b) every adjacent pair has at least tau vertices
    adjacent to one of them; (c) every vertex of degree >= tau has at least
    2m independent ell-paths to seeded vertices; optionally (d) no vertex has
    m independent ell-paths ending within distance ell-1 of itself.
    """
    degs = g.degrees()
    isolated = [int(v) for v in np.flatnonzero(degs == 0)]
    pair_bad: list[tuple[int, int]] = []
    for u, v in g.edges():
        union = np.union1d(g.neighbors(u), g.neighbors(v))
        count = len(union) - int(v in g.neighbors(u)) - int(u in g.neighbors(v))
        if count < tau:
            pair_bad.append((u, v))
    seeded_set = seeds.seeded()
    hd_bad: list[int] = []
    for v in np.flatnonzero(degs >= tau):
        layer = gamma_k(g, int(v), ell)
        targets = np.intersect1d(layer, seeded_set, assume_unique=True)
        if count_disjoint_paths_to_set(g, int(v), ell, targets) < 2 * m:
            hd_bad.append(int(v))
    bt_ok: bool | None = None
    bt_bad: list[int] = []
    if check_backtrack and g.n <= backtrack_cap_vertices:
        bt_ok = True
        for v in range(g.n):
            inner = set(int(x) for x in n_k(g, v, ell - 1)) if ell >= 1 else set()
            found = _max_disjoint_fixed_length_paths(g, v, ell, inner, cap=m)
            if found >= m:
                bt_ok = False
                bt_bad.append(v)
    return PropertyReport(
        no_isolated=not isolated,
        isolated_witnesses=isolated,
        pair_neighborhood_ok=not pair_bad,
        pair_witnesses=pair_bad,
        high_degree_paths_ok=not hd_bad,
        high_degree_witnesses=hd_bad,
        backtrack_paths_ok=bt_ok,
        backtrack_witnesses=bt_bad,
    )


@dataclass
class ExpansionStats:
    """Empirical neighborhood-growth statistics against branching heuristics."""

    layer_ratios: dict[int, np.ndarray]
    pair_overlaps: np.ndarray
    pair_bound: float
    avg_degree: float


def expansion_stats(
    g: Graph,
    k_max: int,
    d: int | None = None,
    rng: np.random.Generator | None = None,
    vertex_sample: int = 500,
    pair_sample: int = 1000,
) -> ExpansionStats:
    """Sampled |layer|/(np)^k ratios and pairwise ball overlaps.

    The pairwise overlap is reported against the 8 n^(2d-3) p^(2d-2)
    heuristic with radius d-1; the caller interprets the observed ratios.
    """
    if k_max < 1:
        raise InputError("k_max must be at least 1")
    rng = rng or np.random.default_rng(0)
    avg_deg = 2 * g.num_edges / g.n if g.n else 0.0
    verts = np.arange(g.n)
    if g.n > vertex_sample:
        verts = np.sort(rng.choice(g.n, size=vertex_sample, replace=False))
    ratios: dict[int, list[float]] = {k: [] for k in range(1, k_max + 1)}
    for v in verts:
        dist = g.distances_from(int(v), max_depth=k_max)
        for k in range(1, k_max + 1):
            denom = avg_deg**k
            size = int(np.count_nonzero(dist == k))
            ratios[k].append(size / denom if denom > 0 else 0.0)
    if d is None:
        d = k_max + 1
    r = d - 1
    p_hat = avg_deg / g.n if g.n else 0.0
    bound = 8 * g.n ** (2 * d - 3) * p_hat ** (2 * d - 2)
    overlaps = []
    for _ in range(pair_sample):
        u, v = rng.choice(g.n, size=2, replace=False)
        bu = n_k(g, int(u), r)
        bv = n_k(g, int(v), r)
        overlaps.append(len(np.intersect1d(bu, bv, assume_unique=True)))
    return ExpansionStats(
        layer_ratios={k: np.asarray(vals) for k, vals in ratios.items()},
        pair_overlaps=np.asarray(overlaps),
        pair_bound=float(bound),
        avg_degree=float(avg_deg),
    )


@dataclass
class TrialReport:
    """One experiment trial flattened to a CSV row."""

    exact: bool
    fraction_correct: float
    qap: int | None
    certificate: int
    failed: bool
    runtime_ms: float
    params: dict = field(default_factory=dict)
    error: str = ""

    @property
    def obstructed(self) -> bool:
        """True when the converse certificate rules out exact recovery."""
        return self.certificate >= 2
