"""Headless figure rendering for the command-line report paths."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_components(components: dict, path, title: str = "", ylabel: str = "sales"):
    """Line plot of named series sharing one calendar axis."""
    fig, ax = plt.subplots(figsize=(8, 5))
    for name, series in components.items():
        lw = 2.0 if name == "total" else 1.0
        ax.plot(series.times, series.values, label=name, linewidth=lw)
    ax.set_xlabel("year")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_fit(data, model, path, title: str = ""):
    """Observed points against the fitted curve."""
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(data.times, data.values, "o", markersize=3, label="data")
    ax.plot(model.times, model.values, "-", label="fit")
    ax.set_xlabel("year")
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_size_histogram(sizes, path, pdf_x=None, pdf_y=None, title: str = ""):
    """Log-size histogram with an optional analytic density overlay."""
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.hist(np.log(sizes), bins=80, density=True, alpha=0.6, label="simulated")
    if pdf_x is not None:
        ax.plot(pdf_x, pdf_y, "r-", label="analytic")
    ax.set_xlabel("log size")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_xy(x, y, path, xlabel: str, ylabel: str, title: str = ""):
    """Single-curve plot for volume profiles and share trajectories."""
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(x, y, "-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
