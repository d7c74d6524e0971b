"""Self-check suite: oracle equivalence, sampling distributions, identities.

The flow oracle here deliberately avoids the augmenting-path machinery: it
enumerates every source-sink path of the layered network and maximizes the
packing of internally vertex-disjoint paths by exhaustive branch and bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flows import FlowNetwork, build_joint_network, max_flow
from .graph import Graph, gamma_k, graph_and, graph_or, n_k
from .model import SeedMap, sample_instance, sample_seeds


def network_node_paths(net: FlowNetwork) -> list[list[int]]:
    """All source-to-sink paths of the unsplit (node-level) network."""
    src = net.source // 2
    snk = net.sink // 2
    succ: dict[int, list[int]] = {}
    for a, b in net.arcs:
        if a // 2 != b // 2:  # skip the in->out split arcs
            succ.setdefault(a // 2, []).append(b // 2)
    paths: list[list[int]] = []

    def walk(path: list[int]) -> None:
        v = path[-1]
        if v == snk:
            paths.append(list(path))
            return
        for w in succ.get(v, ()):
            if w not in path:
                walk(path + [w])

    walk([src])
    return paths


def brute_force_disjoint_paths(net: FlowNetwork) -> int:
    """Maximum number of source-sink paths sharing no internal node."""
    src = net.source // 2
    snk = net.sink // 2
    interiors = [frozenset(p[1:-1]) for p in network_node_paths(net)]
    best = 0

    def pack(i: int, used: frozenset, count: int) -> None:
        nonlocal best
        best = max(best, count)
        if i >= len(interiors) or count + len(interiors) - i <= best:
            return
        if not used & interiors[i]:
            pack(i + 1, used | interiors[i], count + 1)
        pack(i + 1, used, count)

    pack(0, frozenset(), 0)
    return best


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_tiny_pair(rng: np.random.Generator):
    """Random small (g1, g2, seeds, i1, i2, ell) probe for the flow oracle."""
    n = int(rng.integers(2, 9))
    p = float(rng.uniform(0.2, 0.8))
    g1 = _random_graph(n, p, rng)
    g2 = _random_graph(n, p, rng)
    pi0 = np.full(n, -1, dtype=np.int64)
    perm = rng.permutation(n)
    for v in range(n):
        if rng.random() < 0.5:
            pi0[v] = perm[v]
    seeds = SeedMap(pi0)
    i1 = int(rng.integers(n))
    i2 = int(rng.integers(n))
    ell = int(rng.integers(1, 4))
    return g1, g2, seeds, i1, i2, ell


def _random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    edges = [
        (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p
    ]
    return Graph.from_edges(n, edges)


def check_flow_oracle(trials: int = 2000, seed: int = 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    for t in range(trials):
        g1, g2, seeds, i1, i2, ell = random_tiny_pair(rng)
        net = build_joint_network(g1, i1, g2, i2, ell, seeds)
        got = max_flow(net)
        want = brute_force_disjoint_paths(net)
        if got != want:
            return CheckResult(
                "flow-oracle", False,
                f"trial {t}: max_flow={got}, brute={want}",
            )
    return CheckResult("flow-oracle", True, f"{trials} instances agree")


def check_model_distributions(
    samples: int = 50, n: int = 2000, p: float = 0.01, s: float = 0.5, seed: int = 2
) -> CheckResult:
    rng = np.random.default_rng(seed)
    pairs = n * (n - 1) / 2
    and_counts, or_counts = [], []
    cond_hits = cond_total = 0
    for _ in range(samples):
        inst = sample_instance(n, p, s, rng)
        and_counts.append(graph_and(inst.g1_star, inst.g2).num_edges)
        or_counts.append(graph_or(inst.g1_star, inst.g2).num_edges)
        cond_hits += and_counts[-1]
        cond_total += inst.g1_star.num_edges
    checks = []
    for counts, prob, label in (
        (and_counts, p * s * s, "and"),
        (or_counts, p * s * (2 - s), "or"),
    ):
        mu = pairs * prob
        sigma = np.sqrt(pairs * prob * (1 - prob))
        z = (np.mean(counts) - mu) / (sigma / np.sqrt(samples))
        checks.append((label, abs(z)))
    s_hat = cond_hits / cond_total if cond_total else 0.0
    ok = all(z <= 5 for _, z in checks) and abs(s_hat - s) <= 0.02
    detail = ", ".join(f"z_{lbl}={z:.2f}" for lbl, z in checks)
    return CheckResult(
        "model-distributions", ok, f"{detail}, s_hat={s_hat:.4f}"
    )


def check_layer_identities(trials: int = 200, seed: int = 3) -> CheckResult:
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(2, 20))
        g = _random_graph(n, float(rng.uniform(0, 0.5)), rng)
        u = int(rng.integers(n))
        seen = set()
        for k in range(n + 1):
            layer = set(int(x) for x in gamma_k(g, u, k))
            if seen & layer:
                return CheckResult(
                    "layer-identities", False, f"trial {t}: layers overlap"
                )
            seen |= layer
            ball = set(int(x) for x in n_k(g, u, k))
            if ball != seen:
                return CheckResult(
                    "layer-identities", False, f"trial {t}: ball != union of layers"
                )
    return CheckResult("layer-identities", True, f"{trials} graphs agree")


def check_and_or_containment(trials: int = 200, seed: int = 4) -> CheckResult:
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(2, 20))
        g1 = _random_graph(n, float(rng.uniform(0, 0.6)), rng)
        g2 = _random_graph(n, float(rng.uniform(0, 0.6)), rng)
        ka = set(graph_and(g1, g2).edge_keys().tolist())
        ko = set(graph_or(g1, g2).edge_keys().tolist())
        k1 = set(g1.edge_keys().tolist())
        k2 = set(g2.edge_keys().tolist())
        if not (ka <= k1 and ka <= k2 and k1 <= ko and k2 <= ko):
            return CheckResult(
                "and-or-containment", False, f"trial {t}: containment broken"
            )
    return CheckResult("and-or-containment", True, f"{trials} graphs agree")


def run_all_checks(quick: bool = False) -> list[CheckResult]:
    scale = 0.1 if quick else 1.0
    return [
        check_flow_oracle(trials=max(50, int(2000 * scale))),
        check_model_distributions(samples=max(5, int(50 * scale))),
        check_layer_identities(trials=max(20, int(200 * scale))),
        check_and_or_containment(trials=max(20, int(200 * scale))),
    ]
