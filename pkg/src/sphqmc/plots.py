"""Render decay figures to files alongside the delimited reports.

One figure style serves every study: log-log scatter of a value against N
per series, with the fitted power law drawn through it and the exponent in
the legend.  The Agg backend is forced so rendering works headless.
"""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

MARKERS = "os^vDPX*"


def save_decay_figure(path, series: dict, fits: dict | None = None,
                      title: str = "", ylabel: str = "value") -> None:
    """Write a log-log decay figure.

    ``series`` maps a label to a pair of sequences (sizes, values);
    ``fits`` optionally maps the same labels to objects with ``alpha``,
    ``beta`` and ``predict`` (a :class:`~sphqmc.experiments.FitReport`).
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for i, (label, (ns, values)) in enumerate(series.items()):
        marker = MARKERS[i % len(MARKERS)]
        fit = None if fits is None else fits.get(label)
        text = label
        if fit is not None and math.isfinite(fit.beta):
            text = f"{label} (N^-{fit.beta:.2f})"
        pts = ax.plot(ns, values, marker, ms=5, ls="none", label=text)
        if fit is not None:
            ax.plot(ns, fit.predict(ns), "-", lw=1.0,
                    color=pts[0].get_color(), alpha=0.7)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def rows_to_series(rows, value_key: str, group_key: str = "family"):
    """Regroup report rows into the mapping ``save_decay_figure`` expects."""
    series: dict = {}
    for row in rows:
        ns, vals = series.setdefault(row[group_key], ([], []))
        ns.append(row["n"])
        vals.append(row[value_key])
    return series
