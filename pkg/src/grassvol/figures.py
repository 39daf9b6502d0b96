"""Render experiment results to figure files.

One figure per experiment, written next to the delimited output. Uses the
Agg backend so rendering works headless; the figures are a reporting aid,
the CSV remains the normative record.
"""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiments import ExperimentResult  # noqa: E402

_DPI = 150


def _group_rows(rows, key_idx):
    groups = defaultdict(list)
    for row in rows:
        groups[row[key_idx]].append(row)
    return groups


def _fig1(result: ExperimentResult, ax):
    by_d = _group_rows(result.csv_rows, 1)
    for d in sorted(by_d):
        pts = sorted(by_d[d])
        ax.plot([p[0] for p in pts], [p[2] for p in pts],
                marker=".", label=f"d={d}")
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xlabel("measurements m")
    ax.set_ylabel("expected log volume ratio")
    ax.legend(fontsize=8, ncol=2)


def _lemma1(result: ExperimentResult, ax):
    by_m = _group_rows(result.csv_rows, 0)
    ms = sorted(by_m)
    rng = np.random.default_rng(0)  # jitter only, cosmetic
    for m in ms:
        vals = np.array([r[2] for r in by_m[m]])
        x = m * (1.0 + 0.02 * rng.standard_normal(len(vals)))
        ax.plot(x, vals, ".", ms=2, alpha=0.3, color="tab:blue")
    centers = [by_m[m][0][3] for m in ms]
    ax.plot(ms, centers, "r-", lw=1.5, label="analytic center")
    ax.set_xscale("log")
    ax.set_xlabel("measurements m")
    ax.set_ylabel("log volume ratio")
    ax.legend()


def _bartlett(result: ExperimentResult, ax):
    by_pipe = _group_rows(result.csv_rows, 0)
    for name, color in (("direct", "tab:blue"), ("bartlett", "tab:orange")):
        vals = [r[2] for r in by_pipe.get(name, [])]
        ax.hist(vals, bins=80, density=True, alpha=0.5, color=color, label=name)
    ax.set_xlabel("log Gram determinant sample")
    ax.set_ylabel("density")
    ax.legend()


def _theorem2(result: ExperimentResult, ax):
    by_m = _group_rows(result.csv_rows, 0)
    lo = min(r[3] for r in result.csv_rows)
    hi = max(r[3] for r in result.csv_rows)
    span = np.linspace(lo, hi, 2)
    for m in sorted(by_m):
        rows = by_m[m]
        ax.plot([r[3] for r in rows], [r[4] for r in rows], ".", ms=3,
                alpha=0.4, label=f"m={m}")
        ax.plot(span, span + rows[0][5], "--", lw=1.2, color="k")
    ax.set_xlabel("log sine product (original)")
    ax.set_ylabel("log sine product (compressed)")
    ax.legend()


def _perturbation(result: ExperimentResult, axes):
    rows = result.csv_rows
    trials = [r[0] for r in rows]
    top, bottom = axes
    top.plot(trials, [r[1] for r in rows], ".", ms=3, label="max singular gap")
    top.axhline(rows[0][2], color="r", lw=1.2, label="bound")
    top.set_ylabel("singular value gap")
    top.legend(fontsize=8)
    bottom.plot(trials, [r[4] for r in rows], ".", ms=3, label="volume")
    bottom.plot(trials, [r[3] for r in rows], "r.", ms=1.5, label="envelope lo")
    bottom.plot(trials, [r[5] for r in rows], "g.", ms=1.5, label="envelope hi")
    bottom.set_xlabel("trial")
    bottom.set_ylabel("volume")
    bottom.legend(fontsize=8)


def render(result: ExperimentResult, path) -> None:
    """Write the figure for `result` to `path` (format from the suffix)."""
    if result.experiment == "perturbation":
        fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
        _perturbation(result, axes)
    else:
        fig, ax = plt.subplots(figsize=(7, 5))
        {
            "fig1": _fig1,
            "lemma1": _lemma1,
            "bartlett": _bartlett,
            "theorem2": _theorem2,
        }[result.experiment](result, ax)
    fig.suptitle(f"{result.experiment} verification run")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
