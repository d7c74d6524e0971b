"""Experiment configuration: flat key=value text with repeated keys as grids.

Example::

    master_seed=42
    trials=5
    algorithm=alg2
    n=2000
    a=0.55
    b=1.0
    s=0.9
    alpha=0.05
    alpha=0.1
    alpha=0.2
    epsilon=0.1

Repeating a grid key (n, p, a, b, s, alpha, epsilon) adds a grid value.
Density is given either as explicit p values or as (a, b) exponent pairs
with n*p = b*n^a; when both a and b lists are present their cross product
forms the density axis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import ConfigError

ALGORITHMS = ("alg1", "alg2", "alg3-fast", "alg3-exact", "seedless")

CSV_COLUMNS = [
    "n", "p", "s", "alpha", "epsilon", "algorithm", "trial", "seed",
    "ell", "m", "tau", "d", "eta", "exact", "fraction_correct", "qap",
    "certificate", "failed", "error", "runtime_ms",
]

RUNTIME_COLUMNS = ("runtime_ms",)


@dataclass(frozen=True)
class GridPoint:
    index: int
    n: int
    p: float
    s: float
    alpha: float
    epsilon: float


@dataclass
class ExperimentConfig:
    master_seed: int = 0
    trials: int = 1
    algorithm: str = "alg2"
    n_values: list[int] = field(default_factory=list)
    p_values: list[float] = field(default_factory=list)
    a_values: list[float] = field(default_factory=list)
    b_values: list[float] = field(default_factory=list)
    s_values: list[float] = field(default_factory=list)
    alpha_values: list[float] = field(default_factory=list)
    epsilon_values: list[float] = field(default_factory=list)
    out: str | None = None
    jobs: int = 1
    budget: int = 10**6
    mode: str = "fast"

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.budget < 1:
            raise ConfigError("budget must be at least 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if not self.n_values:
            raise ConfigError("grid axis n is empty")
        if not self.p_values and not self.a_values:
            raise ConfigError("grid needs either p values or (a, b) values")
        if self.p_values and self.a_values:
            raise ConfigError("give either p values or (a, b) values, not both")
        for axis, vals in (
            ("s", self.s_values),
            ("alpha", self.alpha_values),
            ("epsilon", self.epsilon_values),
        ):
            if not vals:
                raise ConfigError(f"grid axis {axis} is empty")

    def density_axis(self) -> list[float | tuple[float, float]]:
        if self.p_values:
            return list(self.p_values)
        bs = self.b_values or [1.0]
        return list(itertools.product(self.a_values, bs))

    def grid_points(self) -> list[GridPoint]:
        """Deterministic product order: n, density, s, alpha, epsilon."""
        self.validate()
        points = []
        idx = 0
        for n in self.n_values:
            for dens in self.density_axis():
                if isinstance(dens, tuple):
                    a, b = dens
                    p = b * n**a / n
                else:
                    p = dens
                for s in self.s_values:
                    for alpha in self.alpha_values:
                        for eps in self.epsilon_values:
                            points.append(
                                GridPoint(idx, n, p, s, alpha, eps)
                            )
                            idx += 1
        return points


_GRID_KEYS = {"n", "p", "a", "b", "s", "alpha", "epsilon"}
_SCALAR_KEYS = {
    "master_seed", "trials", "algorithm", "out", "jobs", "budget", "mode",
}


def parse_config_text(text: str) -> ExperimentConfig:
    cfg = ExperimentConfig(
        epsilon_values=[], s_values=[], alpha_values=[],
    )
    seen_scalar: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        try:
            if key == "n":
                cfg.n_values.append(int(val))
            elif key == "p":
                cfg.p_values.append(float(val))
            elif key == "a":
                cfg.a_values.append(float(val))
            elif key == "b":
                cfg.b_values.append(float(val))
            elif key == "s":
                cfg.s_values.append(float(val))
            elif key == "alpha":
                cfg.alpha_values.append(float(val))
            elif key == "epsilon":
                cfg.epsilon_values.append(float(val))
            elif key in _SCALAR_KEYS:
                if key in seen_scalar:
                    raise ConfigError(f"line {lineno}: duplicate key {key}")
                seen_scalar.add(key)
                if key in ("master_seed", "trials", "jobs", "budget"):
                    setattr(cfg, key, int(val))
                else:
                    setattr(cfg, key, val)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path) as f:
        return parse_config_text(f.read())
