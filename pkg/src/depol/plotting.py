"""Figure rendering for the report-producing commands.

Figures are written straight to files (Agg backend, no display) next to the
delimited output; they are an opt-in convenience and never affect the CSV.
"""

from __future__ import annotations

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_rate_figure(report, path: str) -> None:
    """Two stacked panels: projected parameter p(t) and depolarization rates."""
    plt = _pyplot()
    fig, (ax_p, ax_rate) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 6.0))

    ax_p.plot(report.times, report.p_exact, "k-", label="exact")
    ax_p.plot(report.times, report.p_order2, "C1--", label="order 2")
    ax_p.set_ylabel("p(t)")
    ax_p.legend(frameon=False)
    ax_p.grid(True, alpha=0.3)

    total = report.order0 + report.order1 + report.order2
    ax_rate.plot(report.times, report.gamma_exact, "k-", label="exact rate")
    ax_rate.plot(report.times, total, "C1--", label="perturbative rate")
    ax_rate.set_xlabel("t")
    ax_rate.set_ylabel("depolarization rate")
    ax_rate.legend(frameon=False)
    ax_rate.grid(True, alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(lambdas, residuals, path: str) -> None:
    """Log-log residual against coupling with a cubic guide line."""
    plt = _pyplot()
    lambdas = np.asarray(lambdas, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    positive = (lambdas > 0) & (residuals > 0)
    ax.loglog(lambdas[positive], residuals[positive], "o-", label="residual")
    if positive.any():
        ref = residuals[positive][0] * (lambdas[positive] / lambdas[positive][0]) ** 3
        ax.loglog(lambdas[positive], ref, "k:", label=r"$\propto \lambda^3$")
    ax.set_xlabel(r"coupling $\lambda$")
    ax.set_ylabel("|exact rate - perturbative rate|")
    ax.legend(frameon=False)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_mc_figure(counts, distances, path: str) -> None:
    """Log-log Monte-Carlo twirl error against samples with an N**-1/2 guide."""
    plt = _pyplot()
    counts = np.asarray(counts, dtype=float)
    distances = np.asarray(distances, dtype=float)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.loglog(counts, distances, "o-", label="Frobenius distance")
    positive = distances > 0
    if positive.any():
        first = np.argmax(positive)
        ref = distances[first] * np.sqrt(counts[first] / counts)
        ax.loglog(counts, ref, "k:", label=r"$\propto N^{-1/2}$")
    ax.set_xlabel("samples N")
    ax.set_ylabel("distance to closed-form twirl")
    ax.legend(frameon=False)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
