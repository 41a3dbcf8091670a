"""Figure builders for per-site energy profiles and distance decay curves.

Rendering is deterministic: a fixed style, the object-oriented matplotlib
API with the Agg canvas, and pinned output metadata, so the same input
file always produces the same image bytes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .readers import ProfileSeries, read_decay, read_profile, read_report

#: profile entries with magnitude below this render as exact zeros
DISPLAY_FLOOR = 1e-12

_STYLE = {
    "step1_color": "#d95f02",
    "step3_color": "#1b9e77",
    "guide_color": "#7570b3",
    "zero_color": "#444444",
}

_PNG_METADATA = {"Software": "qetfigs"}


def _window(values, pick) -> tuple[int, ...]:
    """Longest contiguous run of entries selected by ``pick``."""
    best: tuple[int, ...] = ()
    run: list[int] = []
    for n, v in enumerate(list(values) + [0.0]):
        if abs(v) > DISPLAY_FLOOR and pick(v):
            run.append(n)
        else:
            if len(run) > len(best):
                best = tuple(run)
            run = []
    return best


def _save(fig: Figure, out_path: str | Path, dpi: int) -> None:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    FigureCanvasAgg(fig)
    fig.savefig(out_path, dpi=dpi, metadata=_PNG_METADATA)


def profile_figure(series: ProfileSeries, report: dict | None = None) -> Figure:
    """Two-step bar chart of per-site energy with annotated windows.

    The first bar group is the post-measurement profile, the second the
    post-feedback one.  The sender window (positive bump) and receiver
    window (negative well) are annotated with their summed weights, taken
    from the report when one is supplied and from the plotted data
    otherwise.
    """
    sites = np.asarray(series.sites)
    step1 = np.asarray(series.step1)
    step3 = np.asarray(series.step3)

    fig = Figure(figsize=(7.0, 4.0))
    ax = fig.add_subplot(111)
    width = 0.4
    ax.bar(
        sites - width / 2, step1, width=width, color=_STYLE["step1_color"],
        label="after measurement",
    )
    ax.bar(
        sites + width / 2, step3, width=width, color=_STYLE["step3_color"],
        label="after feedback",
    )
    ax.axhline(0.0, color=_STYLE["zero_color"], linewidth=0.8)

    results = (report or {}).get("results", {})
    bump = _window(step1, lambda v: v > 0)
    well = _window(step3, lambda v: v < 0)
    if bump:
        input_energy = results.get("e_a", float(step1[list(bump)].sum()))
        center = float(np.mean([sites[n] for n in bump]))
        top = float(max(step1[list(bump)]))
        ax.annotate(
            f"input {input_energy:.3g}",
            xy=(center, top),
            xytext=(center, top * 1.12 + 0.02),
            ha="center",
            fontsize=9,
        )
    if well:
        extracted = results.get("e_b", -float(step3[list(well)].sum()))
        center = float(np.mean([sites[n] for n in well]))
        bottom = float(min(step3[list(well)]))
        ax.annotate(
            f"extracted {extracted:.3g}",
            xy=(center, bottom),
            xytext=(center, bottom * 1.12 - 0.02),
            ha="center",
            fontsize=9,
        )

    ax.set_xlabel("site")
    ax.set_ylabel("local energy expectation")
    ax.set_xticks(sites)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    return fig


def decay_figure(series) -> Figure:
    """Log-scale magnitudes of the correlator and gain versus distance.

    A least-squares guide line is fitted to the nonzero correlator
    magnitudes; exactly-zero entries are left off the log axes.
    """
    distance = np.asarray(series.distance, dtype=float)
    eta = np.abs(np.asarray(series.eta, dtype=float))
    gain = np.abs(np.asarray(series.e_b, dtype=float))

    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.add_subplot(111)
    keep = eta > 0
    ax.semilogy(
        distance[keep], eta[keep], "o-", color=_STYLE["step1_color"],
        label="|correlator|",
    )
    gain_keep = gain > 0
    if gain_keep.any():
        ax.semilogy(
            distance[gain_keep], gain[gain_keep], "s-",
            color=_STYLE["step3_color"], label="extracted energy",
        )
    slope = None
    if keep.sum() >= 2:
        slope, intercept = np.polyfit(distance[keep], np.log10(eta[keep]), 1)
        guide = 10 ** (slope * distance[keep] + intercept)
        ax.semilogy(
            distance[keep], guide, "--", color=_STYLE["guide_color"],
            label=f"guide slope {slope:.3g}/site",
        )
    ax.set_xlabel("sender-receiver distance (sites)")
    ax.set_ylabel("magnitude")
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.guide_slope = slope
    return fig


def plot_profile(
    csv_path: str | Path,
    out_path: str | Path,
    dpi: int = 150,
    report_path: str | Path | None = None,
) -> Figure:
    series = read_profile(csv_path)
    report = read_report(report_path) if report_path else None
    fig = profile_figure(series, report)
    _save(fig, out_path, dpi)
    return fig


def plot_decay(
    csv_path: str | Path, out_path: str | Path, dpi: int = 150
) -> Figure:
    series = read_decay(csv_path)
    fig = decay_figure(series)
    _save(fig, out_path, dpi)
    return fig
