"""Figure rendering for the CLI report path.

All plotting lives here so the benchmark library stays data-only.  Figures
are written without embedded timestamps, keeping report directories
reproducible byte for byte.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from noisimrl.evalbench import summarize_by_depth

_SAVE_KW = {"dpi": 120, "metadata": {"Date": None}}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_rb_decay(result, path) -> None:
    """Survival scatter, per-depth means and the fitted exponential."""
    fit = result.fit
    fig, ax = plt.subplots(figsize=(6, 4))
    for depth, vals in sorted(result.samples.items()):
        ax.plot([depth] * len(vals), vals, ".", color="0.7", markersize=3)
    ax.plot(fit.depths, fit.mean_survivals, "o", label="mean survival")
    xs = np.linspace(min(fit.depths), max(fit.depths), 200)
    ax.plot(xs, fit.a * fit.p**xs + fit.b, "-", label=f"fit: p = {fit.p:.4f}")
    ax.set_xlabel("sequence length")
    ax.set_ylabel("survival probability")
    ax.legend()
    _save(fig, path)


def plot_training_history(history, path) -> None:
    """Train/test fidelity bands over episodes."""
    episodes = [e.episode for e in history]
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, pick in (("train", lambda e: e.train), ("test", lambda e: e.test)):
        mean = np.array([pick(e).fidelity_mean for e in history])
        std = np.array([pick(e).fidelity_std for e in history])
        ax.plot(episodes, mean, "-o", markersize=3, label=label)
        ax.fill_between(episodes, mean - std, mean + std, alpha=0.2)
    ax.set_xlabel("episodes")
    ax.set_ylabel("fidelity")
    ax.legend()
    _save(fig, path)


def plot_depth_sweep(rows, path) -> None:
    """Mean fidelity against the target per model over circuit depth."""
    summary = summarize_by_depth(rows)
    models = sorted({m for m, _ in summary})
    fig, ax = plt.subplots(figsize=(6, 4))
    for model in models:
        depths = sorted(d for m, d in summary if m == model)
        ax.plot(depths, [summary[(model, d)] for d in depths], "-o",
                markersize=4, label=model)
    ax.set_xlabel("circuit depth (moments)")
    ax.set_ylabel("mean fidelity")
    ax.legend()
    _save(fig, path)


def plot_case_probabilities(study, path) -> None:
    """Grouped bars of computational-basis probabilities per model."""
    models = sorted(study.probabilities)
    dim = len(study.probabilities[models[0]])
    n_bits = int(np.log2(dim))
    width = 0.8 / len(models)
    xs = np.arange(dim)
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, model in enumerate(models):
        ax.bar(xs + i * width, study.probabilities[model], width, label=model)
    ax.set_xticks(xs + 0.4 - width / 2)
    ax.set_xticklabels([format(i, f"0{n_bits}b") for i in range(dim)])
    ax.set_xlabel("basis state")
    ax.set_ylabel("probability")
    ax.set_title(study.name)
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_case_heatmaps(study, path) -> None:
    """Entrywise |rho_model - rho_target| per model."""
    models = sorted(study.diff_matrices)
    fig, axes = plt.subplots(1, len(models), figsize=(3 * len(models), 3))
    axes = np.atleast_1d(axes)
    vmax = max(np.max(study.diff_matrices[m]) for m in models) or 1.0
    for ax, model in zip(axes, models):
        im = ax.imshow(np.asarray(study.diff_matrices[model]), vmin=0, vmax=vmax,
                       cmap="viridis")
        ax.set_title(model, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    fig.colorbar(im, ax=axes.tolist(), shrink=0.8)
    fig.suptitle(study.name)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
