"""Pricing the ESPPRC: a depth-first heuristic with rollback pruning and
per-customer workers, plus an exhaustive oracle for small graphs.

Workers are scheduled deterministically in ascending order of the scaled
depot-arc length; each worker explores outgoing arcs ordered by scaled
length and stops on its own target/budget. Global counters emulate the
success/termination caps of a thread pool, and the merged result is
sorted, so output does not depend on scheduling."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .instance import Column, PricingInstance

ORACLE_MAX_N = 12
_TIME_CHECK_EVERY = 256


@dataclass(frozen=True)
class DpParams:
    """Knobs of the depth-first pricing heuristic.

    Reduced-cost thresholds are in the master problem's raw cost units.
    accept_max = 0 admits strictly negative columns only; any other value
    is inclusive ("reduced costs up to accept_max"). expansion_limit is a
    per-worker node-expansion budget that substitutes for wall-clock time
    in reproducible runs.
    """

    p_lb: float = -1.0
    time_limit_s: float | None = 30.0
    accept_max: float = 0.0
    rollback_enabled: bool = True
    rollback_fraction: float = 0.75
    rollback_rc_threshold: float = 0.1
    success_threads: int = 20
    max_threads: int = 100
    expansion_limit: int | None = None

    def __post_init__(self):
        if not 0 < self.rollback_fraction < 1:
            raise ValueError("rollback_fraction must be in (0, 1)")
        if not self.p_lb < self.accept_max:
            raise ValueError("p_lb must be below accept_max")

    def accepts(self, rc: float) -> bool:
        if self.accept_max == 0:
            return rc < 0
        return rc <= self.accept_max

    @classmethod
    def construction(cls, **overrides) -> "DpParams":
        """Looser variant used to seed the local search."""
        base = cls(p_lb=-0.1, time_limit_s=5.0, accept_max=0.5)
        return replace(base, **overrides) if overrides else base

    @classmethod
    def exhaustive(cls, **overrides) -> "DpParams":
        """No pruning, no budgets: the DFS enumerates everything."""
        base = cls(
            p_lb=-math.inf,
            time_limit_s=None,
            accept_max=math.inf,
            rollback_enabled=False,
            success_threads=10**9,
            max_threads=10**9,
        )
        return replace(base, **overrides) if overrides else base


@dataclass
class PricingStats:
    workers_launched: int = 0
    workers_hit_target: int = 0
    wall_time_s: float = 0.0
    expansions: int = 0
    best_rc: float = 0.0  # best closed-route rc found, capped at 0 (the empty route)


@dataclass
class PricingResult:
    columns: list
    stats: PricingStats

    def negative(self) -> list:
        return [c for c in self.columns if c.reduced_cost < 0]


def _keep_matrix(pricing: PricingInstance, mask) -> np.ndarray:
    N = pricing.n + 1
    if mask is None:
        keep = ~np.eye(N, dtype=bool)
    else:
        keep = np.asarray(getattr(mask, "keep", mask), dtype=bool).copy()
        np.fill_diagonal(keep, False)
    return keep


class _Graph:
    """Plain-list view of one (pricing, mask) pair for the DFS hot path."""

    def __init__(self, pricing: PricingInstance, mask):
        inst = pricing.raw
        keep = _keep_matrix(pricing, mask)
        self.n = inst.n
        self.t = inst.travel.tolist()
        self.a = inst.tw[:, 0].tolist()
        self.b = inst.tw[:, 1].tolist()
        self.s = inst.service.tolist()
        self.dem = inst.demand.tolist()
        self.duals = pricing.duals.tolist()
        self.cap = inst.capacity
        self.b0 = inst.b0
        self.close_ok = keep[:, 0].tolist()
        order = np.argsort(pricing.p, axis=1, kind="stable")
        self.succ = []
        for x in range(self.n + 1):
            row_keep = keep[x]
            self.succ.append([int(y) for y in order[x] if y != 0 and row_keep[y]])
        self.start_order = [int(i) for i in np.argsort(pricing.p[0, 1:], kind="stable") + 1]


class _StopWorker(Exception):
    pass


def _run_worker(g: _Graph, start: int, params: DpParams, found: dict):
    """Explore all extensions of depot->start; returns (success, expansions)."""
    expansions = 0
    success = False
    deadline = None if params.time_limit_s is None else time.monotonic() + params.time_limit_s
    limit = params.expansion_limit
    roll = params.rollback_enabled
    frac_cap = params.rollback_fraction * g.cap
    frac_time = params.rollback_fraction * g.b0
    rc_thresh = params.rollback_rc_threshold
    t, a, b, s, dem, duals = g.t, g.a, g.b, g.s, g.dem, g.duals
    cap, b0 = g.cap, g.b0
    path = [0, start]
    visited = {start}

    def explore(x, depart, load, rc):
        nonlocal expansions, success
        expansions += 1
        if limit is not None and expansions > limit:
            raise _StopWorker
        if deadline is not None and expansions % _TIME_CHECK_EVERY == 0 and time.monotonic() > deadline:
            raise _StopWorker
        if g.close_ok[x]:
            back = t[x][0]
            if depart + back <= b0:
                total = rc + back
                seq = tuple(path) + (0,)
                prev = found.get(seq)
                if prev is None or total < prev:
                    found[seq] = total
                if total <= params.p_lb:
                    success = True
                    raise _StopWorker
        for y in g.succ[x]:
            if y in visited:
                continue
            arrival = depart + t[x][y]
            if arrival > b[y]:
                continue
            nload = load + dem[y]
            if nload > cap + 1e-9:
                continue
            ndepart = (arrival if arrival > a[y] else a[y]) + s[y]
            nrc = rc + t[x][y] - duals[y]
            if roll and nrc > rc_thresh and (nload >= frac_cap or ndepart >= frac_time):
                continue
            visited.add(y)
            path.append(y)
            explore(y, ndepart, nload, nrc)
            path.pop()
            visited.discard(y)

    arrival0 = t[0][start]
    if arrival0 <= b[start] and dem[start] <= cap + 1e-9 and start in g.succ[0]:
        depart0 = (arrival0 if arrival0 > a[start] else a[start]) + s[start]
        try:
            explore(start, depart0, dem[start], t[0][start] - duals[start])
        except _StopWorker:
            pass
    return success, expansions


def dp_price(pricing: PricingInstance, mask, params: DpParams, seed: int = 0) -> PricingResult:
    """One worker per customer, most promising depot arcs first, until the
    success/termination caps of the pool are hit.

    The explorer itself is deterministic; `seed` is accepted for interface
    parity with the stochastic pricers.
    """
    t0 = time.monotonic()
    g = _Graph(pricing, mask)
    stats = PricingStats()
    found: dict[tuple, float] = {}
    success_cap = min(params.success_threads, g.n)
    termination_cap = min(params.max_threads, g.n)

    for start in g.start_order:
        if stats.workers_hit_target >= success_cap or stats.workers_launched >= termination_cap:
            break
        stats.workers_launched += 1
        success, expansions = _run_worker(g, start, params, found)
        stats.expansions += expansions
        if success:
            stats.workers_hit_target += 1

    inst = pricing.raw
    accepted = sorted(
        (seq for seq, rc in found.items() if params.accepts(rc)),
        key=lambda seq: (found[seq], seq),
    )
    columns = [Column.build(inst, seq, pricing.duals) for seq in accepted]
    stats.best_rc = min(0.0, min(found.values(), default=0.0))
    stats.wall_time_s = time.monotonic() - t0
    return PricingResult(columns=columns, stats=stats)


def construct_initial(pricing: PricingInstance, mask, seed: int = 0, params: DpParams | None = None) -> PricingResult:
    """Seed paths for the local search: the loose DFS settings, falling
    back to the best mask-respecting single-customer route so a seed
    exists whenever one is feasible (the fallback ignores accept_max)."""
    params = DpParams.construction() if params is None else params
    result = dp_price(pricing, mask, params, seed)
    if result.columns:
        return result

    g = _Graph(pricing, mask)
    best = None
    for i in range(1, g.n + 1):
        if i not in g.succ[0] or not g.close_ok[i]:
            continue
        arrival = g.t[0][i]
        if arrival > g.b[i] or g.dem[i] > g.cap + 1e-9:
            continue
        depart = max(arrival, g.a[i]) + g.s[i]
        if depart + g.t[i][0] > g.b0:
            continue
        rc = g.t[0][i] + g.t[i][0] - g.duals[i]
        if best is None or rc < best[0] or (rc == best[0] and i < best[1]):
            best = (rc, i)
    if best is not None:
        col = Column.build(pricing.raw, (0, best[1], 0), pricing.duals)
        result.columns = [col]
        result.stats.best_rc = min(result.stats.best_rc, col.reduced_cost, 0.0)
    return result


def exact_oracle(pricing: PricingInstance, mask=None):
    """Exhaustive enumeration of elementary feasible routes.

    Returns (best_column_or_None, optimum) where the optimum includes the
    empty depot-to-depot route at reduced cost 0, so it is never positive.
    Guarded to n <= 12.
    """
    if pricing.n > ORACLE_MAX_N:
        raise ValueError(f"exact oracle is limited to n <= {ORACLE_MAX_N}, got n={pricing.n}")
    g = _Graph(pricing, mask)
    best_rc = math.inf
    best_seq = None
    t, a, b, s, dem = g.t, g.a, g.b, g.s, g.dem
    cap, b0 = g.cap, g.b0
    path = [0]
    visited = set()

    def explore(x, depart, load, rc):
        nonlocal best_rc, best_seq
        if x != 0 and g.close_ok[x]:
            back = t[x][0]
            if depart + back <= b0:
                total = rc + back
                if total < best_rc:
                    best_rc = total
                    best_seq = tuple(path) + (0,)
        for y in g.succ[x]:
            if y in visited:
                continue
            arrival = depart + t[x][y]
            if arrival > b[y]:
                continue
            nload = load + dem[y]
            if nload > cap + 1e-9:
                continue
            visited.add(y)
            path.append(y)
            explore(y, (arrival if arrival > a[y] else a[y]) + s[y], nload, rc + t[x][y] - g.duals[y])
            path.pop()
            visited.discard(y)

    explore(0, 0.0, 0.0, 0.0)
    optimum = min(0.0, best_rc)
    column = None
    if best_seq is not None and best_rc < 0:
        column = Column.build(pricing.raw, best_seq, pricing.duals)
    return column, optimum
