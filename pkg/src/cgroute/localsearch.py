"""Heat-map-guided exchange local search over pricing routes.

Each exchange iteration samples a node u of the current route and a
neighbor v from the adjusted heat map row of u, then applies exactly one
of four moves: close the route right after u, insert v after u, drop u's
successor, or swap v with u's successor. A candidate replaces the
current route only if it is feasible and strictly cheaper; the best
feasible route seen is returned."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .heatmap import HeatMapAdjusted
from .instance import Column, PricingInstance, check_feasible, reduced_cost
from .pricing import DpParams, PricingResult, PricingStats, construct_initial

MOVE_CLOSE = "close"
MOVE_INSERT = "insert"
MOVE_REMOVE = "remove"
MOVE_SWAP = "swap"

_MAX_REDRAWS = 8


@dataclass(frozen=True)
class LsParams:
    exchanges: int = 20
    workers: int = 8
    candidates_per_exchange: int = 1

    def __post_init__(self):
        if self.exchanges < 1:
            raise ValueError("need at least one exchange iteration")
        if self.workers < 1 or self.candidates_per_exchange < 1:
            raise ValueError("workers and candidates_per_exchange must be >= 1")


def classify_move(path: tuple, u_pos: int, v: int) -> str:
    """Which of the four exchange moves a (u, v) draw triggers.

    u_pos indexes the current path excluding its final depot; v must
    differ from the node at u_pos. The cases are exhaustive and mutually
    exclusive: depot draw -> close, off-path -> insert, successor's
    successor -> remove, any other on-path node -> swap.
    """
    if v == path[u_pos]:
        raise ValueError("v must differ from u")
    if v == 0:
        return MOVE_CLOSE
    if v not in path:
        return MOVE_INSERT
    o_pos = u_pos + 1
    if o_pos + 1 < len(path) - 1 and path[o_pos + 1] == v:
        return MOVE_REMOVE
    return MOVE_SWAP


def apply_move(path: tuple, u_pos: int, v: int, move: str) -> tuple:
    """Build the candidate sequence; feasibility is checked separately."""
    if move == MOVE_CLOSE:
        return path[: u_pos + 1] + (0,)
    if move == MOVE_INSERT:
        return path[: u_pos + 1] + (v,) + path[u_pos + 1 :]
    if move == MOVE_REMOVE:
        return path[: u_pos + 1] + path[u_pos + 2 :]
    new = list(path)
    o_pos = u_pos + 1
    v_pos = path.index(v)
    new[o_pos], new[v_pos] = new[v_pos], new[o_pos]
    return tuple(new)


def ls_improve(
    initial: Column,
    pricing: PricingInstance,
    hmap: HeatMapAdjusted,
    params: LsParams,
    rng: np.random.Generator,
) -> Column:
    """Run the exchange iterations from one feasible seed route."""
    inst = pricing.raw
    duals = pricing.duals
    current = initial.sequence
    current_rc = initial.reduced_cost
    best = initial

    for _ in range(params.exchanges):
        best_candidate = None
        for _ in range(params.candidates_per_exchange):
            u_pos = int(rng.integers(0, len(current) - 1))
            u = current[u_pos]
            if hmap.zero_row[u]:
                continue
            v = hmap.sample(u, rng)
            redraws = 0
            while v == u and redraws < _MAX_REDRAWS:
                v = hmap.sample(u, rng)
                redraws += 1
            if v == u:
                continue
            candidate = apply_move(current, u_pos, v, classify_move(current, u_pos, v))
            ok, _violation = check_feasible(candidate, inst)
            if not ok:
                continue
            rc = reduced_cost(inst, candidate, duals)
            if best_candidate is None or rc < best_candidate[0]:
                best_candidate = (rc, candidate)
        if best_candidate is not None and best_candidate[0] < current_rc:
            current_rc, current = best_candidate
            if current_rc < best.reduced_cost:
                best = Column.build(inst, current, duals)
    return best


def ls_price(
    pricing: PricingInstance,
    mask,
    hmap: HeatMapAdjusted,
    ls_params: LsParams,
    construction_params: DpParams | None = None,
    seed: int = 0,
) -> PricingResult:
    """Multi-start local search: seed routes from the construction DFS,
    one independent sampler stream per worker, merged deterministically."""
    seeds = construct_initial(pricing, mask, seed=seed, params=construction_params)
    if not seeds.columns:
        return seeds
    found: dict[tuple, Column] = {}
    for worker in range(ls_params.workers):
        initial = seeds.columns[worker % len(seeds.columns)]
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((int(seed), worker))))
        improved = ls_improve(initial, pricing, hmap, ls_params, rng)
        kept = found.get(improved.sequence)
        if kept is None or improved.reduced_cost < kept.reduced_cost:
            found[improved.sequence] = improved
    columns = sorted(found.values(), key=lambda c: (c.reduced_cost, c.sequence))
    best_rc = min([seeds.stats.best_rc] + [c.reduced_cost for c in columns])
    stats = PricingStats(
        workers_launched=ls_params.workers,
        workers_hit_target=seeds.stats.workers_hit_target,
        wall_time_s=seeds.stats.wall_time_s,
        expansions=seeds.stats.expansions,
        best_rc=min(0.0, best_rc),
    )
    return PricingResult(columns=columns, stats=stats)
