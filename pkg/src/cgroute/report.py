"""Figure rendering for comparison reports.

The delimited files written by `compare` stay the authoritative output;
these charts are a convenience view of the same data, written as PNGs
next to them."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .driver import CompareReport

_DPI = 150


def render_report(report: CompareReport, out_dir, label_a: str = "A", label_b: str = "B", time_axis: str = "wall_ms") -> list[Path]:
    """Draw the four standard charts into out_dir and return their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    written.append(_gap_convergence(report, out_dir / "gap_convergence.png", label_a, label_b, time_axis))
    written.append(_gap_hist(report, out_dir / "gap_hist.png", label_a, label_b))
    written.append(_speedup_hist(report, out_dir / "speedup_hist.png", label_a, label_b))
    written.append(_rc_vs_iter(report, out_dir / "rc_vs_iter.png", label_a, label_b))
    return written


def _axis_label(time_axis: str) -> str:
    return "iteration" if time_axis == "iter" else "wall time (ms)"


def _gap_convergence(report, path, label_a, label_b, time_axis):
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if report.gap_series:
        ts = [row[0] for row in report.gap_series]
        mean = [100.0 * row[1] for row in report.gap_series]
        sem = [100.0 * row[2] for row in report.gap_series]
        lo = [m - 1.96 * s for m, s in zip(mean, sem)]
        hi = [m + 1.96 * s for m, s in zip(mean, sem)]
        ax.plot(ts, mean, color="tab:blue", label=f"mean gap {label_a} vs {label_b}")
        ax.fill_between(ts, lo, hi, color="tab:blue", alpha=0.25, label="95% CI")
        ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel(_axis_label(time_axis))
    ax.set_ylabel("relative objective gap (%)")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def _gap_hist(report, path, label_a, label_b):
    gaps = [100.0 * row[3] for row in report.per_instance]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.hist(gaps, bins=min(20, max(5, len(gaps))), color="tab:blue", edgecolor="black")
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel(f"final objective gap of {label_a} vs {label_b} (%)")
    ax.set_ylabel("instances")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def _speedup_hist(report, path, label_a, label_b):
    from .metrics import time_to_reach

    ratios = []
    for ra, rb in zip(report.runs_a, report.runs_b):
        if ra.final_objective < rb.final_objective:
            ta, va = ra.series("wall_ms")
            tb, _ = rb.series("wall_ms")
            reach = time_to_reach(ta, va, rb.final_objective)
            if reach is not None and tb[-1] > 0:
                ratios.append(reach / tb[-1])
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if ratios:
        ax.hist(ratios, bins=min(20, max(5, len(ratios))), color="tab:green", edgecolor="black")
    ax.set_xlabel(f"time for {label_a} to reach {label_b}'s final objective / total {label_b} time")
    ax.set_ylabel("instances")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def _rc_vs_iter(report, path, label_a, label_b):
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for series, label, color in ((report.rc_series_a, label_a, "tab:blue"), (report.rc_series_b, label_b, "tab:orange")):
        if series:
            ax.plot([k for k, _, _ in series], [v for _, v, _ in series], label=label, color=color)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean best reduced cost")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
