"""Render figures from a sweep CSV next to the delimited output.

The CSV stays the machine contract; figures are a human-readable view of
the same rows (recovery vs seed fraction, failure rates, certificate
frequency).
"""

from __future__ import annotations

import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _read_rows(csv_path) -> list[dict]:
    with open(csv_path, newline="") as f:
        return [row for row in csv.DictReader(f)]


def _group_mean(rows, key_fields, value_field) -> dict:
    acc: dict[tuple, list[float]] = defaultdict(list)
    for row in rows:
        if row.get("error"):
            continue
        val = row.get(value_field, "")
        if val == "":
            continue
        key = tuple(row[k] for k in key_fields)
        acc[key].append(float(val))
    return {k: sum(v) / len(v) for k, v in acc.items()}


def render_report(csv_path, out_dir=None) -> list[str]:
    """Write PNG figures derived from a sweep CSV; returns the paths."""
    rows = _read_rows(csv_path)
    out_dir = out_dir or os.path.dirname(os.path.abspath(csv_path))
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []

    # accuracy and exact-recovery rate vs alpha, one curve per (algorithm, n)
    by_curve: dict[tuple, dict[float, float]] = defaultdict(dict)
    means = _group_mean(rows, ("algorithm", "n", "alpha"), "fraction_correct")
    for (algo, n, alpha), mean in means.items():
        by_curve[(algo, n)][float(alpha)] = mean
    if by_curve:
        fig, ax = plt.subplots(figsize=(6, 4))
        for (algo, n), pts in sorted(by_curve.items()):
            xs = sorted(pts)
            ax.plot(xs, [pts[x] for x in xs], marker="o", label=f"{algo}, n={n}")
        ax.set_xscale("log")
        ax.set_xlabel("seed fraction alpha")
        ax.set_ylabel("mean fraction correctly matched")
        ax.set_ylim(-0.02, 1.02)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, "accuracy_vs_alpha.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    exact_curves: dict[tuple, dict[float, float]] = defaultdict(dict)
    exact_means = _group_mean(rows, ("algorithm", "n", "alpha"), "exact")
    for (algo, n, alpha), mean in exact_means.items():
        exact_curves[(algo, n)][float(alpha)] = mean
    if exact_curves:
        fig, ax = plt.subplots(figsize=(6, 4))
        for (algo, n), pts in sorted(exact_curves.items()):
            xs = sorted(pts)
            ax.plot(xs, [pts[x] for x in xs], marker="s", label=f"{algo}, n={n}")
        ax.set_xscale("log")
        ax.set_xlabel("seed fraction alpha")
        ax.set_ylabel("exact recovery rate")
        ax.set_ylim(-0.02, 1.02)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, "exact_recovery_vs_alpha.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    certs = [
        float(row["certificate"])
        for row in rows
        if row.get("certificate") not in ("", None) and not row.get("error")
    ]
    if certs:
        fig, ax = plt.subplots(figsize=(6, 4))
        upper = int(max(certs))
        ax.hist(certs, bins=range(0, upper + 2), align="left", rwidth=0.8)
        ax.set_xlabel("unseeded isolated vertices in the intersection graph")
        ax.set_ylabel("trials")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = os.path.join(out_dir, "certificate_histogram.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
