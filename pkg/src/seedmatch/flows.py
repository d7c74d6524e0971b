"""Counting vertex-disjoint path families through layered unit-capacity networks.

The joint network for a candidate pair (i1, i2) takes the BFS ball of radius
ell around i1 in g1 (intra-layer edges dropped, remaining edges directed away
from i1) and the mirror construction around i2 in g2 (edges directed toward
i2), identifies each seeded layer-ell vertex u of the g2 side with its partner
pi0(u) on the g1 side when that partner also sits at layer ell, and then
splits every vertex into an in/out node joined by a unit arc. The max flow
from i1's out-node to i2's in-node equals the largest m for which m
independent ell-paths to a common seeded leaf set exist on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .graph import Graph
from .model import SeedMap


@dataclass
class FlowNetwork:
    """Directed unit-capacity network produced by vertex splitting.

    Node 2*k is the in-node and 2*k+1 the out-node of original node k;
    `origin` records (side, original-vertex) per original node, where side is
    "g1", "g2", or "both" for identified seeded leaves.
    """

    num_nodes: int
    arcs: list[tuple[int, int]]
    source: int
    sink: int
    origin: list[tuple[str, int]] = field(default_factory=list)


def _split(
    node_keys: list[tuple], node_arcs: list[tuple], source_key, sink_key
) -> FlowNetwork:
    order = sorted(set(node_keys))
    index = {key: i for i, key in enumerate(order)}
    arcs = [(2 * i, 2 * i + 1) for i in range(len(order))]
    for a, b in node_arcs:
        arcs.append((2 * index[a] + 1, 2 * index[b]))
    origin = [({"L": "g1", "R": "g2", "B": "both"}[k[0]], k[1]) for k in order]
    return FlowNetwork(
        num_nodes=2 * len(order),
        arcs=arcs,
        source=2 * index[source_key] + 1,
        sink=2 * index[sink_key],
        origin=origin,
    )


def build_joint_network(
    g1: Graph, i1: int, g2: Graph, i2: int, ell: int, seeds: SeedMap
) -> FlowNetwork:
    """Two-sided layered network for the candidate pair (i1, i2)."""
    if ell < 1:
        raise InputError("radius must be at least 1")
    if not (0 <= i1 < g1.n and 0 <= i2 < g2.n):
        raise InputError("root vertex out of range")
    dist1 = g1.distances_from(i1, max_depth=ell)
    dist2 = g2.distances_from(i2, max_depth=ell)

    identified: dict[int, tuple] = {}
    for u in np.flatnonzero(dist2 == ell):
        partner = seeds.pi0[u]
        if partner >= 0 and dist1[partner] == ell:
            identified[int(u)] = ("B", int(partner))
    merged_partners = set(identified.values())

    def key2(v: int) -> tuple:
        return identified.get(int(v), ("R", int(v)))

    node_keys: list[tuple] = []
    node_arcs: list[tuple] = []
    for v in np.flatnonzero(dist1 >= 0):
        k = ("B", int(v)) if ("B", int(v)) in merged_partners else ("L", int(v))
        node_keys.append(k)
    for u in np.flatnonzero(dist2 >= 0):
        node_keys.append(key2(u))

    def g1_key(v: int) -> tuple:
        k = ("B", int(v))
        return k if k in merged_partners else ("L", int(v))

    # g1 side: edges directed away from i1, one layer at a time
    for u in np.flatnonzero((dist1 >= 0) & (dist1 < ell)):
        du = dist1[u]
        for w in g1.neighbors(u):
            if dist1[w] == du + 1:
                node_arcs.append((g1_key(u), g1_key(w)))
    # g2 side: edges directed toward i2
    for u in np.flatnonzero(dist2 >= 1):
        du = dist2[u]
        for w in g2.neighbors(u):
            if 0 <= dist2[w] == du - 1:
                node_arcs.append((key2(u), key2(w)))
    return _split(node_keys, node_arcs, g1_key(i1), ("R", int(i2)))


def build_single_network(
    g: Graph, root: int, ell: int, targets: np.ndarray
) -> FlowNetwork:
    """One-sided layered network from root to a super-sink over targets."""
    if ell < 1:
        raise InputError("radius must be at least 1")
    dist = g.distances_from(root, max_depth=ell)
    targets = np.asarray(targets, dtype=np.int64)
    if targets.size and not np.all(dist[targets] == ell):
        raise InputError("targets must lie at distance exactly ell from root")
    node_keys: list[tuple] = [("R", -1)]  # super sink
    node_arcs: list[tuple] = []
    for v in np.flatnonzero(dist >= 0):
        node_keys.append(("L", int(v)))
    for u in np.flatnonzero((dist >= 0) & (dist < ell)):
        du = dist[u]
        for w in g.neighbors(u):
            if dist[w] == du + 1:
                node_arcs.append((("L", int(u)), ("L", int(w))))
    for t in targets:
        node_arcs.append((("L", int(t)), ("R", -1)))
    return _split(node_keys, node_arcs, ("L", int(root)), ("R", -1))


def max_flow(net: FlowNetwork) -> int:
    """Integral max flow via BFS-augmented Ford-Fulkerson (unit capacities)."""
    value, _ = max_flow_with_paths(net)
    return value


def max_flow_with_paths(net: FlowNetwork) -> tuple[int, list[list[int]]]:
    """Max flow plus a decomposition of one integral optimum into node paths.

    Returned paths are sequences of network node ids from source to sink.
    """
    adj: list[list[int]] = [[] for _ in range(net.num_nodes)]
    to: list[int] = []
    cap: list[int] = []
    for u, v in net.arcs:
        adj[u].append(len(to)); to.append(v); cap.append(1)
        adj[v].append(len(to)); to.append(u); cap.append(0)
    flow = 0
    src, snk = net.source, net.sink
    while True:
        prev = [-1] * net.num_nodes
        prev[src] = -2
        queue = [src]
        qi = 0
        while qi < len(queue) and prev[snk] == -1:
            u = queue[qi]; qi += 1
            for e in adj[u]:
                w = to[e]
                if cap[e] > 0 and prev[w] == -1:
                    prev[w] = e
                    queue.append(w)
        if prev[snk] == -1:
            break
        v = snk
        while v != src:
            e = prev[v]
            cap[e] -= 1
            cap[e ^ 1] += 1
            v = to[e ^ 1]
        flow += 1
    # decompose: follow saturated forward arcs (original arcs with cap 0
    # and positive reverse residual) from source
    used = [False] * len(to)
    paths: list[list[int]] = []
    for _ in range(flow):
        path = [src]
        v = src
        while v != snk:
            for e in adj[v]:
                if e % 2 == 0 and not used[e] and cap[e] == 0 and cap[e ^ 1] > 0:
                    used[e] = True
                    v = to[e]
                    path.append(v)
                    break
            else:  # pragma: no cover - decomposition of a valid flow always advances
                raise RuntimeError("flow decomposition stuck")
        paths.append(path)
    return flow, paths


def joint_path_count(
    g1: Graph, i1: int, g2: Graph, i2: int, ell: int, seeds: SeedMap
) -> int:
    """Max number of simultaneous independent ell-path families for (i1, i2)."""
    return max_flow(build_joint_network(g1, i1, g2, i2, ell, seeds))


def count_disjoint_paths_to_set(
    g: Graph, root: int, ell: int, targets: np.ndarray
) -> int:
    """Max number of length-ell paths from root to distinct targets,
    pairwise vertex-disjoint except at the root."""
    targets = np.asarray(targets, dtype=np.int64)
    if targets.size == 0:
        return 0
    return max_flow(build_single_network(g, root, ell, targets))
