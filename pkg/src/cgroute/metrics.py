"""Run-comparison metrics: relative objective gap, time-to-target ratios
with interpolation on iteration logs, and aggregated reduced-cost series."""

from __future__ import annotations

import math
from dataclasses import dataclass


def objective_gap(objs_a, objs_b) -> float:
    """Mean relative difference (obj_a - obj_b) / obj_b over paired runs."""
    if len(objs_a) != len(objs_b) or not objs_a:
        raise ValueError("need two equal-length, non-empty objective lists")
    return sum((oa - ob) / ob for oa, ob in zip(objs_a, objs_b)) / len(objs_a)


def time_to_reach(times, objectives, target: float) -> float | None:
    """First time the non-increasing objective series reaches `target`,
    linearly interpolated between logged points. None if it never does."""
    if len(times) != len(objectives) or not times:
        raise ValueError("need matching non-empty series")
    if objectives[0] <= target:
        return float(times[0])
    for k in range(1, len(times)):
        if objectives[k] <= target:
            o_prev, o_k = objectives[k - 1], objectives[k]
            if o_prev == o_k:
                return float(times[k])
            frac = (o_prev - target) / (o_prev - o_k)
            return float(times[k - 1] + frac * (times[k] - times[k - 1]))
    return None


@dataclass
class PairMetrics:
    """Eq.-style summary for one (a, b) pair of run collections."""

    n_instances: int
    obj_gap: float
    j_a_better: int
    j_b_better: int
    speedup_a_better: float | None  # t_a(reach obj_b) / t_b_total, averaged
    speedup_b_better: float | None  # t_b(reach obj_a) / t_a_total, averaged


def pair_metrics(runs_a, runs_b, time_axis: str = "wall_ms") -> PairMetrics:
    """Aggregate a-vs-b metrics over paired runs.

    For instances where a ends lower, the speed-up is the time a needs to
    reach b's final objective divided by b's total time (and vice versa),
    interpolated on the logs. Ties contribute to neither class.
    """
    if len(runs_a) != len(runs_b) or not runs_a:
        raise ValueError("need paired, non-empty run lists")
    gaps = []
    ratios_a, ratios_b = [], []
    j_a = j_b = 0
    for ra, rb in zip(runs_a, runs_b):
        oa, ob = ra.final_objective, rb.final_objective
        gaps.append((oa - ob) / ob)
        ta, va = ra.series(time_axis)
        tb, vb = rb.series(time_axis)
        if oa < ob:
            j_a += 1
            reach = time_to_reach(ta, va, ob)
            total_b = tb[-1]
            if reach is not None and total_b > 0:
                ratios_a.append(reach / total_b)
        elif ob < oa:
            j_b += 1
            reach = time_to_reach(tb, vb, oa)
            total_a = ta[-1]
            if reach is not None and total_a > 0:
                ratios_b.append(reach / total_a)
    return PairMetrics(
        n_instances=len(runs_a),
        obj_gap=sum(gaps) / len(gaps),
        j_a_better=j_a,
        j_b_better=j_b,
        speedup_a_better=(sum(ratios_a) / len(ratios_a)) if ratios_a else None,
        speedup_b_better=(sum(ratios_b) / len(ratios_b)) if ratios_b else None,
    )


def mean_rc_series(runs) -> list[tuple[int, float, int]]:
    """Per-iteration mean of best reduced cost across runs.

    Returns rows (iteration, mean over runs still active, active count);
    a run is active at iteration k while its log has a k-th entry."""
    longest = max(len(r.iterations) for r in runs)
    out = []
    for k in range(longest):
        vals = [r.iterations[k].best_rc for r in runs if len(r.iterations) > k]
        out.append((k, sum(vals) / len(vals), len(vals)))
    return out


def mean_gap_series(runs_a, runs_b, time_axis: str = "wall_ms", points: int = 50):
    """Relative-gap-vs-time curve: at each of `points` common time stamps,
    the mean over instances of (obj_a(t) - obj_b(t)) / obj_b(t), plus the
    standard error band. Objectives are step-interpolated on the logs."""

    def value_at(times, objs, t):
        v = objs[0]
        for tk, ok in zip(times, objs):
            if tk <= t:
                v = ok
            else:
                break
        return v

    horizon = 0.0
    series = []
    for ra, rb in zip(runs_a, runs_b):
        ta, va = ra.series(time_axis)
        tb, vb = rb.series(time_axis)
        series.append((ta, va, tb, vb))
        horizon = max(horizon, ta[-1], tb[-1])
    if horizon <= 0:
        return []
    out = []
    for j in range(1, points + 1):
        t = horizon * j / points
        gaps = []
        for ta, va, tb, vb in series:
            gb = value_at(tb, vb, t)
            gaps.append((value_at(ta, va, t) - gb) / gb)
        mean = sum(gaps) / len(gaps)
        var = sum((x - mean) ** 2 for x in gaps) / len(gaps)
        sem = math.sqrt(var / len(gaps)) if len(gaps) > 1 else 0.0
        out.append((t, mean, sem))
    return out
