"""The column-generation loop: greedy initialization, solve-price-admit
iterations under a pluggable reduction strategy, run logging, and the
two-configuration comparison report."""

from __future__ import annotations

import csv
import dataclasses
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import metrics
from .heatmap import HeatMapAdjusted, adjust, heat_from_T, load_T, surrogate_T
from .instance import Column, VrptwInstance, build_pricing, check_feasible, reduced_cost
from .localsearch import LsParams, ls_price
from .master import RmpState
from .pricing import DpParams, PricingResult, PricingStats, dp_price, exact_oracle
from .reduction import STRATEGY_BE2, STRATEGY_NONE, STRATEGY_ULGR, be2, no_reduction, ulgr_mask

ADMIT_TOL = 1e-9
STALL_IMPROVEMENT = 1e-9

REASON_PRICED_OUT = "priced-out"
REASON_TIME_LIMIT = "time-limit"  # any exhausted budget, wall-clock or iteration
REASON_STALLED = "stalled"

CSV_COLUMNS = ("iter", "wall_ms", "objective", "best_rc", "cols_added", "pricing_ms")


class DriverError(RuntimeError):
    pass


class StallGuard:
    """Cuts runs whose objective stops moving despite admitted columns.

    A defensive guard for degenerate pricing loops: `update` returns True
    once `limit` consecutive objectives fail to improve the best seen by
    more than the tolerance."""

    def __init__(self, limit: int, tolerance: float = STALL_IMPROVEMENT):
        self.limit = limit
        self.tolerance = tolerance
        self.best = float("inf")
        self.since_improvement = 0

    def update(self, objective: float) -> bool:
        if objective < self.best - self.tolerance:
            self.best = objective
            self.since_improvement = 0
            return False
        self.since_improvement += 1
        return self.since_improvement >= self.limit


@dataclass(frozen=True)
class CgConfig:
    """Everything one run needs; mirrors the config JSON field-for-field."""

    strategy: str = STRATEGY_NONE
    seed: int = 0
    time_limit_s: float | None = 3600.0
    iter_limit: int | None = None
    heatmap_dir: str | None = None
    surrogate_tau: float | None = None
    top_m: int = 10
    beta: float = 0.2
    pricer: str = "auto"  # auto | dp | oracle
    ls: LsParams = field(default_factory=LsParams)
    dp: DpParams = field(default_factory=DpParams)
    construction: DpParams = field(default_factory=DpParams.construction)
    stall_limit: int = 50

    def __post_init__(self):
        if self.strategy not in (STRATEGY_NONE, STRATEGY_BE2, STRATEGY_ULGR):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == STRATEGY_ULGR and self.heatmap_dir is None and self.surrogate_tau is None:
            raise ValueError("the heat-map strategy needs --heatmap or --surrogate")
        if self.pricer not in ("auto", "dp", "oracle"):
            raise ValueError(f"unknown pricer {self.pricer!r}")

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "CgConfig":
        data = dict(data)
        if "ls" in data and isinstance(data["ls"], dict):
            data["ls"] = LsParams(**data["ls"])
        if "dp" in data and isinstance(data["dp"], dict):
            data["dp"] = DpParams(**data["dp"])
        if "construction" in data and isinstance(data["construction"], dict):
            data["construction"] = DpParams(**data["construction"])
        return cls(**data)

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "CgConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class IterationLog:
    iter: int
    wall_ms: float
    objective: float
    best_rc: float
    cols_added: int
    pricing_ms: float


@dataclass
class CgRun:
    """Per-iteration trace of one column-generation run."""

    strategy: str
    seed: int
    n: int
    iterations: list = field(default_factory=list)
    final_objective: float = float("nan")
    termination_reason: str = ""

    def series(self, time_axis: str = "wall_ms"):
        """(times, objectives) along the chosen axis ('wall_ms' or 'iter')."""
        if time_axis == "iter":
            times = [float(it.iter) for it in self.iterations]
        else:
            times = [it.wall_ms for it in self.iterations]
        return times, [it.objective for it in self.iterations]

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "seed": self.seed,
            "n": self.n,
            "final_objective": self.final_objective,
            "termination_reason": self.termination_reason,
            "iterations": [dataclasses.asdict(it) for it in self.iterations],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CgRun":
        run = cls(strategy=data["strategy"], seed=data["seed"], n=data["n"])
        run.final_objective = data["final_objective"]
        run.termination_reason = data["termination_reason"]
        run.iterations = [IterationLog(**it) for it in data["iterations"]]
        return run

    def write_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for it in self.iterations:
                writer.writerow(
                    [it.iter, f"{it.wall_ms:.3f}", repr(it.objective), repr(it.best_rc), it.cols_added, f"{it.pricing_ms:.3f}"]
                )
        return path


def init_columns(instance: VrptwInstance, duals=None) -> list:
    """Greedy sweep: keep appending the nearest unvisited customer that
    still fits the open route, closing routes when nothing fits. The
    returned routes partition the customers."""
    if duals is None:
        duals = np.zeros(instance.n + 1)
    t = instance.travel
    unvisited = set(range(1, instance.n + 1))
    routes = []
    while unvisited:
        seq = [0]
        progressed = False
        while True:
            cur = seq[-1]
            candidates = sorted(unvisited, key=lambda y: (t[cur, y], y))
            chosen = None
            for y in candidates:
                ok, _ = check_feasible(seq + [y, 0], instance)
                if ok:
                    chosen = y
                    break
            if chosen is None:
                break
            seq.append(chosen)
            unvisited.discard(chosen)
            progressed = True
        if not progressed:
            bad = min(unvisited)
            ok, violation = check_feasible([0, bad, 0], instance)
            raise DriverError(f"customer {bad} cannot be served even alone: {violation}")
        routes.append(Column.build(instance, seq + [0], duals))
    return routes


def _heat_source(pricing, cfg: CgConfig, iteration: int) -> HeatMapAdjusted:
    T = None
    if cfg.heatmap_dir is not None:
        path = Path(cfg.heatmap_dir) / f"iter_{iteration:06d}.hmap"
        if path.exists():
            T = load_T(path, expected_n=pricing.n)
    if T is None:
        tau = cfg.surrogate_tau if cfg.surrogate_tau is not None else 0.25
        T = surrogate_T(pricing, tau)
    return adjust(heat_from_T(T), cfg.top_m)


def _mix_seed(seed: int, iteration: int) -> int:
    """Stable per-iteration stream id for the stochastic pricers."""
    return int(np.random.SeedSequence((int(seed), int(iteration))).generate_state(1, dtype=np.uint64)[0])


def _price(pricing, cfg: CgConfig, iteration: int):
    if cfg.strategy == STRATEGY_ULGR:
        hmap = _heat_source(pricing, cfg, iteration)
        mask = ulgr_mask(hmap)
        if cfg.pricer == "oracle":
            return _oracle_result(pricing, mask)
        if cfg.pricer == "dp":
            return dp_price(pricing, mask, cfg.dp, seed=cfg.seed)
        return ls_price(pricing, mask, hmap, cfg.ls, cfg.construction, seed=_mix_seed(cfg.seed, iteration))
    mask = be2(pricing, cfg.beta) if cfg.strategy == STRATEGY_BE2 else no_reduction(pricing)
    if cfg.pricer == "oracle":
        return _oracle_result(pricing, mask)
    return dp_price(pricing, mask, cfg.dp, seed=cfg.seed)


def _oracle_result(pricing, mask) -> PricingResult:
    column, optimum = exact_oracle(pricing, mask)
    columns = [column] if column is not None else []
    stats = PricingStats(workers_launched=1, best_rc=optimum)
    return PricingResult(columns=columns, stats=stats)


def run(instance: VrptwInstance, cfg: CgConfig, on_duals=None, on_admitted=None) -> CgRun:
    """Column generation to priced-out termination or budget exhaustion.

    Every logged record is one completed solve-price round; a run cut by
    its budget reports the last completed round. `on_duals(iteration,
    duals_per_node)` is called before each pricing round, e.g. to record
    the dual trail for an external heat-map producer; `on_admitted(
    iteration, duals_per_node, columns)` after each admission, e.g. to
    audit reduced costs."""
    t0 = time.monotonic()
    state = RmpState(instance.n)
    state.add_columns(init_columns(instance))
    log = CgRun(strategy=cfg.strategy, seed=cfg.seed, n=instance.n)
    stall = StallGuard(cfg.stall_limit)
    iteration = 0
    objective = None

    while True:
        if cfg.iter_limit is not None and iteration >= cfg.iter_limit:
            log.termination_reason = REASON_TIME_LIMIT
            break
        if cfg.time_limit_s is not None and (time.monotonic() - t0) > cfg.time_limit_s:
            log.termination_reason = REASON_TIME_LIMIT
            break

        objective, duals, _x = state.solve()
        duals_per_node = np.concatenate([[0.0], duals])
        if on_duals is not None:
            on_duals(iteration, duals_per_node)
        pricing = build_pricing(instance, duals_per_node)
        tp = time.monotonic()
        result = _price(pricing, cfg, iteration)
        pricing_ms = (time.monotonic() - tp) * 1000.0

        admitted = []
        for col in result.columns:
            rc = reduced_cost(instance, col.sequence, duals_per_node)
            if rc < -ADMIT_TOL:
                admitted.append(col.reprice(instance, duals_per_node))
        if on_admitted is not None:
            on_admitted(iteration, duals_per_node, admitted)
        log.iterations.append(
            IterationLog(
                iter=iteration,
                wall_ms=(time.monotonic() - t0) * 1000.0,
                objective=objective,
                best_rc=result.stats.best_rc,
                cols_added=len(admitted),
                pricing_ms=pricing_ms,
            )
        )
        iteration += 1
        if not admitted:
            log.termination_reason = REASON_PRICED_OUT
            break
        state.add_columns(admitted)

        if stall.update(objective):
            log.termination_reason = REASON_STALLED
            break

    if objective is None:
        # budget exhausted before the first round: still report the LP
        # value of the initialization columns
        objective, _duals, _x = state.solve()
        log.iterations.append(
            IterationLog(iter=0, wall_ms=(time.monotonic() - t0) * 1000.0, objective=objective, best_rc=0.0, cols_added=0, pricing_ms=0.0)
        )
    log.final_objective = objective
    return log


@dataclass
class CompareReport:
    """Everything `compare` emits: headline metrics plus raw per-instance
    and per-iteration material for tables and plots."""

    pair: metrics.PairMetrics
    per_instance: list
    rc_series_a: list
    rc_series_b: list
    gap_series: list
    avg_iters: tuple
    avg_iter_ms: tuple
    avg_pricing_ms: tuple
    runs_a: list
    runs_b: list

    def write_csvs(self, out_path) -> list[Path]:
        out_path = Path(out_path)
        stem = out_path.with_suffix("")
        paths = [out_path]
        with open(out_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["metric", "value"])
            w.writerow(["n_instances", self.pair.n_instances])
            w.writerow(["obj_gap", repr(self.pair.obj_gap)])
            w.writerow(["j_a_better", self.pair.j_a_better])
            w.writerow(["j_b_better", self.pair.j_b_better])
            w.writerow(["t_speedup_a_better", "" if self.pair.speedup_a_better is None else repr(self.pair.speedup_a_better)])
            w.writerow(["t_speedup_b_better", "" if self.pair.speedup_b_better is None else repr(self.pair.speedup_b_better)])
            w.writerow(["avg_iterations_a", repr(self.avg_iters[0])])
            w.writerow(["avg_iterations_b", repr(self.avg_iters[1])])
            w.writerow(["avg_iter_ms_a", repr(self.avg_iter_ms[0])])
            w.writerow(["avg_iter_ms_b", repr(self.avg_iter_ms[1])])
            w.writerow(["avg_pricing_ms_a", repr(self.avg_pricing_ms[0])])
            w.writerow(["avg_pricing_ms_b", repr(self.avg_pricing_ms[1])])

        per_inst = Path(str(stem) + "_instances.csv")
        paths.append(per_inst)
        with open(per_inst, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["instance", "objective_a", "objective_b", "rel_gap", "iterations_a", "iterations_b", "reason_a", "reason_b"])
            for row in self.per_instance:
                w.writerow(row)

        series = Path(str(stem) + "_rc_series.csv")
        paths.append(series)
        with open(series, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "mean_best_rc_a", "active_a", "mean_best_rc_b", "active_b"])
            la = {k: (v, c) for k, v, c in self.rc_series_a}
            lb = {k: (v, c) for k, v, c in self.rc_series_b}
            for k in range(max(len(la), len(lb))):
                va, ca = la.get(k, ("", ""))
                vb, cb = lb.get(k, ("", ""))
                w.writerow([k, va, ca, vb, cb])
        return paths


def compare(instances, cfg_a: CgConfig, cfg_b: CgConfig, names=None, time_axis: str = "wall_ms") -> CompareReport:
    """Run both configurations on every instance and aggregate."""
    instances = list(instances)
    if not instances:
        raise DriverError("no instances to compare")
    names = names if names is not None else [f"instance_{k}" for k in range(len(instances))]
    if len(names) != len(instances):
        raise DriverError("instance/name count mismatch")
    runs_a = [run(inst, cfg_a) for inst in instances]
    runs_b = [run(inst, cfg_b) for inst in instances]
    pair = metrics.pair_metrics(runs_a, runs_b, time_axis=time_axis)
    per_instance = [
        (
            name,
            ra.final_objective,
            rb.final_objective,
            (ra.final_objective - rb.final_objective) / rb.final_objective,
            len(ra.iterations),
            len(rb.iterations),
            ra.termination_reason,
            rb.termination_reason,
        )
        for name, ra, rb in zip(names, runs_a, runs_b)
    ]

    def averages(runs):
        iters = [len(r.iterations) for r in runs]
        iter_ms = [r.iterations[-1].wall_ms / max(1, len(r.iterations)) for r in runs]
        pricing_ms = [sum(it.pricing_ms for it in r.iterations) / max(1, len(r.iterations)) for r in runs]
        return (
            sum(iters) / len(runs),
            sum(iter_ms) / len(runs),
            sum(pricing_ms) / len(runs),
        )

    avg_a = averages(runs_a)
    avg_b = averages(runs_b)
    return CompareReport(
        pair=pair,
        per_instance=per_instance,
        rc_series_a=metrics.mean_rc_series(runs_a),
        rc_series_b=metrics.mean_rc_series(runs_b),
        gap_series=metrics.mean_gap_series(runs_a, runs_b, time_axis=time_axis),
        avg_iters=(avg_a[0], avg_b[0]),
        avg_iter_ms=(avg_a[1], avg_b[1]),
        avg_pricing_ms=(avg_a[2], avg_b[2]),
        runs_a=runs_a,
        runs_b=runs_b,
    )
