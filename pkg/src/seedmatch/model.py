"""Samplers for the correlated Erdos-Renyi pair model and seed side information.

An instance bundles a parent graph g0 ~ G(n, p), two independent edge
subsamples g1_star and g2 (each edge of g0 kept with probability s), and
g1 = g1_star relabeled by a hidden uniform permutation pi_star. The true
correspondence maps vertex i of g2 to vertex pi_star[i] of g1.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .graph import Graph, read_edgelist, relabel, write_edgelist


@dataclass(frozen=True)
class Permutation:
    """Bijection on 0..n-1 stored as its forward image array."""

    forward: np.ndarray

    def __post_init__(self):
        fwd = np.asarray(self.forward, dtype=np.int64)
        object.__setattr__(self, "forward", fwd)
        if sorted(fwd.tolist()) != list(range(len(fwd))):
            raise InputError("permutation is not a bijection on 0..n-1")

    @property
    def n(self) -> int:
        return len(self.forward)

    def __call__(self, i: int) -> int:
        return int(self.forward[i])

    def inverse(self) -> "Permutation":
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.forward] = np.arange(self.n)
        return Permutation(inv)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n, dtype=np.int64))


UNSEEDED = -1


@dataclass(frozen=True)
class SeedMap:
    """Partial map from g2-vertices to g1-vertices; UNSEEDED (-1) when hidden."""

    pi0: np.ndarray
    alpha: float | None = None
    k: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.pi0, dtype=np.int64)
        object.__setattr__(self, "pi0", arr)
        seeded_vals = arr[arr >= 0]
        if len(np.unique(seeded_vals)) != len(seeded_vals):
            raise InputError("seed map is not injective on seeded vertices")
        if seeded_vals.size and seeded_vals.max() >= len(arr):
            raise InputError("seed target out of range")

    @property
    def n(self) -> int:
        return len(self.pi0)

    def seeded(self) -> np.ndarray:
        """Sorted array of seeded g2-vertices."""
        return np.flatnonzero(self.pi0 >= 0)

    def num_seeds(self) -> int:
        return int(np.count_nonzero(self.pi0 >= 0))

    def is_seeded(self, i: int) -> bool:
        return self.pi0[i] >= 0

    @classmethod
    def empty(cls, n: int) -> "SeedMap":
        return cls(np.full(n, UNSEEDED, dtype=np.int64))


@dataclass(frozen=True)
class CorrelatedInstance:
    g0: Graph
    g1_star: Graph
    g1: Graph
    g2: Graph
    pi_star: Permutation
    n: int
    p: float
    s: float
    rng_seed: int | None = field(default=None, compare=False)


def sample_gnp_keys(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted edge keys of a G(n, p) draw via geometric skipping.

    Runs in expected O(#edges) time: gaps between successive present pairs
    in the linear pair index are iid Geometric(p).
    """
    total = n * (n - 1) // 2
    if p <= 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        idx = np.arange(total, dtype=np.int64)
    else:
        chunks = []
        pos = -1
        mean = total * p
        batch = max(1024, int(mean + 10 * np.sqrt(mean) + 10))
        while pos < total:
            gaps = rng.geometric(p, size=batch)
            steps = np.cumsum(gaps) + pos
            chunks.append(steps[steps < total])
            pos = int(steps[-1])
        idx = np.concatenate(chunks)
    # decode linear pair index -> (u, v) with u < v, rows ordered by u
    us = np.arange(n, dtype=np.int64)
    row_starts = us * (2 * n - us - 1) // 2
    u = np.searchsorted(row_starts, idx, side="right") - 1
    v = idx - row_starts[u] + u + 1
    return u * n + v


def sample_instance(
    n: int, p: float, s: float, rng: np.random.Generator | int
) -> CorrelatedInstance:
    """Draw (g0, g1_star, g1, g2, pi_star) from the correlated model."""
    if n < 1:
        raise InputError("n must be at least 1")
    if not (0.0 <= p <= 1.0) or not (0.0 <= s <= 1.0):
        raise InputError("p and s must lie in [0, 1]")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    if seed is not None:
        rng = np.random.default_rng(seed)
    keys0 = sample_gnp_keys(n, p, rng)
    if s >= 1.0:
        keys1, keys2 = keys0, keys0
    else:
        keys1 = keys0[rng.random(len(keys0)) < s]
        keys2 = keys0[rng.random(len(keys0)) < s]
    pi_star = Permutation(rng.permutation(n).astype(np.int64))
    g0 = Graph._from_keys(n, keys0)
    g1_star = Graph._from_keys(n, keys1)
    g2 = Graph._from_keys(n, keys2)
    g1 = relabel(g1_star, pi_star.forward)
    return CorrelatedInstance(
        g0=g0, g1_star=g1_star, g1=g1, g2=g2, pi_star=pi_star,
        n=n, p=p, s=s, rng_seed=seed,
    )


def sample_seeds(
    inst: CorrelatedInstance, alpha: float, rng: np.random.Generator
) -> SeedMap:
    """Reveal each vertex's true partner independently with probability alpha."""
    if not (0.0 <= alpha <= 1.0):
        raise InputError("alpha must lie in [0, 1]")
    pi0 = np.full(inst.n, UNSEEDED, dtype=np.int64)
    mask = rng.random(inst.n) < alpha
    pi0[mask] = inst.pi_star.forward[mask]
    return SeedMap(pi0, alpha=alpha)


def sample_seeds_fixed(
    inst: CorrelatedInstance, k: int, rng: np.random.Generator
) -> SeedMap:
    """Reveal a uniformly random size-k seed set."""
    if not 0 <= k <= inst.n:
        raise InputError("seed count must lie in [0, n]")
    pi0 = np.full(inst.n, UNSEEDED, dtype=np.int64)
    chosen = rng.choice(inst.n, size=k, replace=False)
    pi0[chosen] = inst.pi_star.forward[chosen]
    return SeedMap(pi0, k=k)


# -- instance directory serialization -------------------------------------
#
# Layout: g0.edges / g1.edges / g2.edges in edge-list text format,
# pi_star.map and pi0.map as two-column "i value" text ("?" when unseeded),
# meta.txt as flat key=value lines.


def _write_map(path, values: np.ndarray) -> None:
    with open(path, "w") as f:
        for i, v in enumerate(values):
            f.write(f"{i} {'?' if v < 0 else int(v)}\n")


def _read_map(path) -> np.ndarray:
    rows = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            i, v = line.split()
            rows.append((int(i), UNSEEDED if v == "?" else int(v)))
    out = np.full(len(rows), UNSEEDED, dtype=np.int64)
    for i, v in rows:
        out[i] = v
    return out


def save_instance(path, inst: CorrelatedInstance, seeds: SeedMap) -> None:
    os.makedirs(path, exist_ok=True)
    write_edgelist(inst.g0, os.path.join(path, "g0.edges"))
    write_edgelist(inst.g1, os.path.join(path, "g1.edges"))
    write_edgelist(inst.g2, os.path.join(path, "g2.edges"))
    _write_map(os.path.join(path, "pi_star.map"), inst.pi_star.forward)
    _write_map(os.path.join(path, "pi0.map"), seeds.pi0)
    with open(os.path.join(path, "meta.txt"), "w") as f:
        f.write(f"n={inst.n}\n")
        f.write(f"p={inst.p!r}\n")
        f.write(f"s={inst.s!r}\n")
        if seeds.alpha is not None:
            f.write(f"alpha={seeds.alpha!r}\n")
        if seeds.k is not None:
            f.write(f"k={seeds.k}\n")
        if inst.rng_seed is not None:
            f.write(f"rng_seed={inst.rng_seed}\n")


def load_instance(path) -> tuple[CorrelatedInstance, SeedMap]:
    meta: dict[str, str] = {}
    with open(os.path.join(path, "meta.txt")) as f:
        for line in f:
            line = line.strip()
            if line:
                key, _, val = line.partition("=")
                meta[key] = val
    g0 = read_edgelist(os.path.join(path, "g0.edges"))
    g1 = read_edgelist(os.path.join(path, "g1.edges"))
    g2 = read_edgelist(os.path.join(path, "g2.edges"))
    pi_star = Permutation(_read_map(os.path.join(path, "pi_star.map")))
    pi0 = _read_map(os.path.join(path, "pi0.map"))
    g1_star = relabel(g1, pi_star.inverse().forward)
    inst = CorrelatedInstance(
        g0=g0, g1_star=g1_star, g1=g1, g2=g2, pi_star=pi_star,
        n=int(meta["n"]), p=float(meta["p"]), s=float(meta["s"]),
        rng_seed=int(meta["rng_seed"]) if "rng_seed" in meta else None,
    )
    alpha = float(meta["alpha"]) if "alpha" in meta else None
    k = int(meta["k"]) if "k" in meta else None
    return inst, SeedMap(pi0, alpha=alpha, k=k)
