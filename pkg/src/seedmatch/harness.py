"""Reproducible experiment driver: trial execution, sweeps, CSV emission.

Every trial's random stream is keyed by a 64-bit mix of (master seed, grid
point index, trial index), so adding grid points or changing the level of
parallelism never perturbs existing trials, and CSV contents are stable
byte-for-byte apart from runtime columns.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import matchers, metrics
from .config import CSV_COLUMNS, ExperimentConfig, GridPoint
from .errors import BudgetError, DerivationError, InputError
from .model import (
    CorrelatedInstance,
    SeedMap,
    load_instance,
    sample_instance,
    sample_seeds,
    save_instance,
)

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def trial_seed(master_seed: int, point_index: int, trial_index: int) -> int:
    """Deterministic per-trial stream seed."""
    h = master_seed & _MASK
    h = _splitmix64(h ^ _splitmix64(point_index))
    h = _splitmix64(h ^ _splitmix64(trial_index))
    return h


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def run_match(
    inst: CorrelatedInstance,
    seeds: SeedMap,
    algorithm: str,
    epsilon: float,
    rng: np.random.Generator,
    mode: str = "fast",
    budget: int = 10**6,
    overrides: dict | None = None,
) -> dict:
    """Run one matcher on one instance and flatten the outcome to row fields."""
    overrides = overrides or {}
    row: dict = {c: "" for c in CSV_COLUMNS}
    row.update(
        n=inst.n, p=inst.p, s=inst.s, epsilon=epsilon, algorithm=algorithm,
        alpha=seeds.alpha if seeds.alpha is not None else "",
    )
    t0 = time.perf_counter()
    try:
        params = matchers.ParamSet(epsilon=epsilon)
        if algorithm == "alg1":
            params = matchers.derive_params_alg1(inst.n, inst.p, inst.s, epsilon)
            _apply_overrides(params, overrides)
            result = matchers.match_alg1(inst.g1, inst.g2, seeds, params, rng)
        elif algorithm == "alg2":
            d = int(overrides.get("d", matchers.derive_d(inst.n, inst.p)))
            params.d = d
            result = matchers.match_alg2(inst.g1, inst.g2, seeds, d)
        elif algorithm in ("alg3-fast", "alg3-exact"):
            run_mode = "exact" if algorithm.endswith("exact") else mode
            if algorithm == "alg3-exact":
                run_mode = "exact"
            params = matchers.derive_params_alg3(
                inst.n, inst.p, seeds.alpha or 0.0, epsilon
            )
            _apply_overrides(params, overrides)
            result = matchers.match_alg3(
                inst.g1, inst.g2, seeds, params, mode=run_mode, rng=rng
            )
        elif algorithm == "seedless":
            alpha = seeds.alpha if seeds.alpha is not None else 0.0
            d = matchers.derive_d(inst.n, inst.p)

            def inner(h1, h2, s):
                return matchers.match_alg2(h1, h2, s, d)

            params.d = d
            result = matchers.match_seedless(
                inst.g1, inst.g2, alpha, inner, rng, budget=budget
            )
        else:
            raise InputError(f"unknown algorithm {algorithm!r}")
        frac, exact = metrics.accuracy(result, inst.pi_star)
        row.update(
            ell=params.ell if params.ell is not None else "",
            m=params.m if params.m is not None else "",
            tau=params.tau if params.tau is not None else "",
            d=params.d if params.d is not None else "",
            eta=params.eta if params.eta is not None else "",
            exact=exact,
            fraction_correct=frac,
            failed=result.failed,
        )
        if result.is_total() and result.is_injective():
            row["qap"] = metrics.qap_objective(inst.g1, inst.g2, result.pi_hat)
        row["certificate"] = metrics.converse_certificate(inst, seeds)
    except (BudgetError, DerivationError, InputError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["runtime_ms"] = (time.perf_counter() - t0) * 1000.0
    return row


def _apply_overrides(params: matchers.ParamSet, overrides: dict) -> None:
    for key, val in overrides.items():
        if not hasattr(params, key):
            raise InputError(f"unknown parameter override {key!r}")
        cur = getattr(params, key)
        setattr(params, key, type(cur)(val) if cur is not None else val)


def run_trial(
    point: GridPoint,
    trial: int,
    master_seed: int,
    algorithm: str,
    mode: str = "fast",
    budget: int = 10**6,
    overrides: dict | None = None,
) -> dict:
    seed = trial_seed(master_seed, point.index, trial)
    rng = np.random.default_rng(seed)
    inst = sample_instance(point.n, point.p, point.s, rng)
    seeds = sample_seeds(inst, point.alpha, rng)
    row = run_match(
        inst, seeds, algorithm, point.epsilon, rng,
        mode=mode, budget=budget, overrides=overrides,
    )
    row["trial"] = trial
    row["seed"] = seed
    row["alpha"] = point.alpha
    return row


def _sweep_task(args) -> dict:
    point, trial, master_seed, algorithm, mode, budget = args
    return run_trial(point, trial, master_seed, algorithm, mode=mode, budget=budget)


def run_sweep(config: ExperimentConfig, jobs: int | None = None) -> list[dict]:
    """Run the full grid x trials; rows come back in (point, trial) order
    regardless of scheduling."""
    config.validate()
    jobs = jobs or config.jobs
    tasks = [
        (point, trial, config.master_seed, config.algorithm, config.mode, config.budget)
        for point in config.grid_points()
        for trial in range(config.trials)
    ]
    if jobs <= 1:
        return [_sweep_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_task, tasks, chunksize=1))


def write_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row.get(c, "")) for c in CSV_COLUMNS])


def append_csv_row(row: dict, path) -> None:
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as f:
        writer = csv.writer(f)
        if new:
            writer.writerow(CSV_COLUMNS)
        writer.writerow([_fmt(row.get(c, "")) for c in CSV_COLUMNS])


def generate_instances(config: ExperimentConfig, out_dir) -> list[str]:
    """Write one instance directory per (grid point, trial)."""
    config.validate()
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for point in config.grid_points():
        for trial in range(config.trials):
            seed = trial_seed(config.master_seed, point.index, trial)
            rng = np.random.default_rng(seed)
            inst = sample_instance(point.n, point.p, point.s, rng)
            inst = CorrelatedInstance(
                g0=inst.g0, g1_star=inst.g1_star, g1=inst.g1, g2=inst.g2,
                pi_star=inst.pi_star, n=inst.n, p=inst.p, s=inst.s,
                rng_seed=seed,
            )
            seeds = sample_seeds(inst, point.alpha, rng)
            path = os.path.join(
                out_dir, f"point{point.index:04d}_trial{trial:03d}"
            )
            save_instance(path, inst, seeds)
            paths.append(path)
    return paths


def match_instance_dir(
    path,
    algorithm: str,
    epsilon: float = 0.1,
    mode: str = "fast",
    budget: int = 10**6,
    overrides: dict | None = None,
    seed: int = 0,
) -> dict:
    inst, seeds = load_instance(path)
    rng = np.random.default_rng(
        inst.rng_seed if inst.rng_seed is not None else seed
    )
    row = run_match(
        inst, seeds, algorithm, epsilon, rng,
        mode=mode, budget=budget, overrides=overrides,
    )
    row["trial"] = 0
    row["seed"] = inst.rng_seed if inst.rng_seed is not None else seed
    return row
