"""Core data types: C-VRPTW instances, scaled views, pricing graphs, columns.

Node indexing convention used everywhere in this package: node 0 is the
depot, customers are 1..n, all per-node arrays have length n+1 with the
depot entry first. Travel times are Euclidean distances between the
coordinates and are computed once at construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

# Guidance weight assigned to arcs that can never be traversed under the
# time windows. Large relative to the [-1, 1] range of feasible arc lengths.
INFEASIBLE_ARC_WEIGHT = 2.0


class InstanceError(ValueError):
    """Instance data violates a structural invariant."""


@dataclass(frozen=True)
class Violation:
    """First constraint violated by a route, as found by check_feasible."""

    kind: str  # 'endpoints' | 'elementary' | 'time' | 'capacity'
    node: int
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} violation at node {self.node}: {self.detail}"


class InfeasibleRouteError(ValueError):
    """A Column was built from an infeasible or non-elementary sequence."""

    def __init__(self, violation: Violation):
        super().__init__(str(violation))
        self.violation = violation


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class VrptwInstance:
    """A capacitated VRP instance with time windows.

    coords:   (n+1, 2) positions, unit square for generated instances or
              raw benchmark units.
    demand:   (n+1,) integer-valued load units, demand[0] == 0.
    service:  (n+1,) service durations, service[0] == 0.
    tw:       (n+1, 2) time windows [a_i, b_i]; depot window is [0, b_0].
    capacity: vehicle capacity Q.
    travel:   (n+1, n+1) Euclidean travel times, derived from coords.
    """

    coords: np.ndarray
    demand: np.ndarray
    service: np.ndarray
    tw: np.ndarray
    capacity: float
    travel: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen_array(self.coords))
        object.__setattr__(self, "demand", _frozen_array(self.demand))
        object.__setattr__(self, "service", _frozen_array(self.service))
        object.__setattr__(self, "tw", _frozen_array(self.tw))
        object.__setattr__(self, "capacity", float(self.capacity))
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        object.__setattr__(self, "travel", _frozen_array(np.sqrt((diff**2).sum(axis=-1))))
        self._validate()

    def _validate(self) -> None:
        m = self.coords.shape[0]
        if self.coords.ndim != 2 or self.coords.shape[1] != 2:
            raise InstanceError("coords must have shape (n+1, 2)")
        for name, arr, shape in (
            ("demand", self.demand, (m,)),
            ("service", self.service, (m,)),
            ("tw", self.tw, (m, 2)),
        ):
            if arr.shape != shape:
                raise InstanceError(f"{name} has shape {arr.shape}, expected {shape}")
        if m < 1:
            raise InstanceError("instance needs at least the depot node")
        if self.demand[0] != 0 or self.service[0] != 0:
            raise InstanceError("depot must have zero demand and service")
        if self.tw[0, 0] != 0:
            raise InstanceError("depot window must open at 0")
        if np.any(self.tw[:, 0] > self.tw[:, 1]):
            bad = int(np.argmax(self.tw[:, 0] > self.tw[:, 1]))
            raise InstanceError(f"node {bad} has a_i > b_i")
        if np.any(self.demand < 0):
            raise InstanceError("negative demand")
        if np.any(self.demand > self.capacity):
            bad = int(np.argmax(self.demand > self.capacity))
            raise InstanceError(f"node {bad} demand exceeds capacity")

    @property
    def n(self) -> int:
        """Number of customers (nodes minus the depot)."""
        return self.coords.shape[0] - 1

    @property
    def b0(self) -> float:
        return float(self.tw[0, 1])

    @property
    def depot_tw(self) -> tuple[float, float]:
        return (0.0, self.b0)

    # -- JSON interchange --------------------------------------------------

    def to_dict(self) -> dict:
        nodes = [
            {
                "x": float(self.coords[i, 0]),
                "y": float(self.coords[i, 1]),
                "demand": float(self.demand[i]),
                "service": float(self.service[i]),
                "tw": [float(self.tw[i, 0]), float(self.tw[i, 1])],
            }
            for i in range(self.n + 1)
        ]
        return {
            "n": self.n,
            "capacity": float(self.capacity),
            "depot_tw": [0.0, self.b0],
            "nodes": nodes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VrptwInstance":
        nodes = data["nodes"]
        if len(nodes) != data["n"] + 1:
            raise InstanceError(f"expected {data['n'] + 1} node rows, got {len(nodes)}")
        coords = [[nd["x"], nd["y"]] for nd in nodes]
        tw = [list(nd["tw"]) for nd in nodes]
        inst = cls(
            coords=coords,
            demand=[nd["demand"] for nd in nodes],
            service=[nd["service"] for nd in nodes],
            tw=tw,
            capacity=data["capacity"],
        )
        if abs(inst.b0 - data["depot_tw"][1]) > 1e-12:
            raise InstanceError("depot_tw does not match node 0 window")
        return inst

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "VrptwInstance":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ScaledInstance:
    """Instance view with times divided by b_0 and demands by capacity.

    This is the parameterization fed to arc weights and model features;
    the LP side of column generation always works on the raw instance.
    """

    raw: VrptwInstance
    coords: np.ndarray
    demand: np.ndarray
    service: np.ndarray
    tw: np.ndarray
    travel: np.ndarray

    @classmethod
    def from_instance(cls, inst: VrptwInstance) -> "ScaledInstance":
        b0 = inst.b0
        if b0 <= 0:
            raise InstanceError("depot horizon must be positive")
        q = inst.capacity
        return cls(
            raw=inst,
            coords=inst.coords,
            demand=_frozen_array(inst.demand / q),
            service=_frozen_array(inst.service / b0),
            tw=_frozen_array(inst.tw / b0),
            travel=_frozen_array(inst.travel / b0),
        )

    @property
    def n(self) -> int:
        return self.raw.n

    def validate(self) -> None:
        """Check the scaled ranges: times in [0,1], customer demands in (0,1]."""
        if np.any(self.tw < -1e-12) or np.any(self.tw > 1 + 1e-12):
            raise InstanceError("scaled time windows outside [0, 1]")
        if np.any(self.service < 0) or np.any(self.service > 1 + 1e-12):
            raise InstanceError("scaled service times outside [0, 1]")
        if np.any(self.travel > 1 + 1e-12):
            raise InstanceError("scaled travel times outside [0, 1]")
        cust = self.demand[1:]
        if cust.size and (np.any(cust <= 0) or np.any(cust > 1 + 1e-12)):
            raise InstanceError("scaled customer demands outside (0, 1]")


@dataclass(frozen=True)
class PricingInstance:
    """One pricing graph: duals folded into scaled arc lengths plus weights.

    p:        (N, N) arc lengths t_ij - d_j (scaled units), divided by
              max(|min p|, |max p|) over *feasible* arcs so feasible
              entries land in [-1, 1]. Infeasible arcs share the divisor.
    feasible: (N, N) static time-window feasibility
              (a_i + s_i + t_ij <= b_j); diagonal is always False.
    u:        (N, N) minimum elapsed time to traverse the arc when
              leaving i at its earliest start.
    q:        (N, N) guidance weights; INFEASIBLE_ARC_WEIGHT on infeasible
              arcs, p*exp(-(u+dem_j)) for p<0 and p*exp(u+dem_j) for p>0.
    """

    base: ScaledInstance
    duals: np.ndarray  # raw units, duals[0] == 0
    duals_scaled: np.ndarray
    p: np.ndarray
    feasible: np.ndarray
    u: np.ndarray
    q: np.ndarray
    scale_divisor: float
    degenerate_scaling: bool

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def raw(self) -> VrptwInstance:
        return self.base.raw


def build_pricing(instance: VrptwInstance, duals) -> PricingInstance:
    """Fold a dual vector into the scaled pricing graph.

    `duals` holds one value per node (length n+1) with duals[0] == 0, or
    one value per customer (length n); entries must be nonnegative.
    """
    duals = np.asarray(duals, dtype=float)
    if duals.shape == (instance.n,):
        duals = np.concatenate([[0.0], duals])
    if duals.shape != (instance.n + 1,):
        raise InstanceError(f"duals length {duals.shape} does not match n={instance.n}")
    if duals[0] != 0:
        raise InstanceError("depot carries no dual value")
    if np.any(duals < 0):
        raise InstanceError("duals must be nonnegative")

    base = ScaledInstance.from_instance(instance)
    b0 = instance.b0
    d_scaled = duals / b0
    t = base.travel
    a = base.tw[:, 0]
    b = base.tw[:, 1]
    s = base.service

    p = t - d_scaled[None, :]
    feasible = (a[:, None] + s[:, None] + t) <= b[None, :] + 1e-12
    np.fill_diagonal(feasible, False)

    if feasible.any():
        pf = p[feasible]
        divisor = max(abs(pf.min()), abs(pf.max()))
    else:
        divisor = 0.0
    degenerate = divisor <= 0.0
    if degenerate:
        divisor = 1.0
    p = p / divisor

    u = np.maximum(a[None, :], a[:, None] + s[:, None] + t) - a[:, None]
    u = np.maximum(u, 0.0)

    growth = u + base.demand[None, :]
    q = np.where(p < 0, p * np.exp(-growth), p * np.exp(growth))
    q = np.where(feasible, q, INFEASIBLE_ARC_WEIGHT)

    out = PricingInstance(
        base=base,
        duals=_frozen_array(duals),
        duals_scaled=_frozen_array(d_scaled),
        p=_frozen_array(p),
        feasible=_frozen_array(feasible, dtype=bool),
        u=_frozen_array(u),
        q=_frozen_array(q),
        scale_divisor=float(divisor),
        degenerate_scaling=degenerate,
    )
    return out


def check_feasible(sequence: Sequence[int], instance: VrptwInstance):
    """Simulate a route and report the first violation, if any.

    Waiting before a window opens is allowed: service starts at
    max(a_i, arrival). Arrival exactly at b_i is feasible (closed window).
    Returns (True, None) or (False, Violation).
    """
    seq = list(sequence)
    if len(seq) < 2 or seq[0] != 0 or seq[-1] != 0:
        return False, Violation("endpoints", seq[0] if seq else -1, "route must start and end at the depot")

    t = instance.travel
    a = instance.tw[:, 0]
    b = instance.tw[:, 1]
    s = instance.service
    dem = instance.demand
    cap = instance.capacity

    seen = set()
    load = 0.0
    depart = 0.0
    prev = 0
    for pos, node in enumerate(seq[1:], start=1):
        last = pos == len(seq) - 1
        if node == 0 and not last:
            return False, Violation("elementary", 0, "depot revisited mid-route")
        if node != 0:
            if node in seen:
                return False, Violation("elementary", node, "customer visited twice")
            seen.add(node)
        arrival = depart + t[prev, node]
        if arrival > b[node]:
            return False, Violation("time", node, f"arrival {arrival:.6f} after window close {b[node]:.6f}")
        load += dem[node]
        if load > cap + 1e-9:
            return False, Violation("capacity", node, f"load {load:.6f} exceeds capacity {cap:.6f}")
        depart = max(arrival, a[node]) + s[node]
        prev = node
    return True, None


def route_cost(instance: VrptwInstance, sequence: Sequence[int]) -> float:
    """Sum of raw travel times along a sequence."""
    t = instance.travel
    seq = list(sequence)
    return float(sum(t[seq[k], seq[k + 1]] for k in range(len(seq) - 1)))


def reduced_cost(instance: VrptwInstance, sequence: Sequence[int], duals) -> float:
    """Route cost minus the duals of the customers it visits (raw units)."""
    duals = np.asarray(duals, dtype=float)
    return route_cost(instance, sequence) - float(sum(duals[i] for i in sequence if i != 0))


@dataclass(frozen=True)
class Column:
    """An elementary depot-to-depot route priced against some dual vector.

    cost is the raw travel time of the route; reduced_cost is cost minus
    the duals of the covered customers, in the same raw units the master
    problem works in.
    """

    sequence: tuple
    cost: float
    cover: frozenset
    reduced_cost: float

    @classmethod
    def build(cls, instance: VrptwInstance, sequence: Sequence[int], duals) -> "Column":
        ok, violation = check_feasible(sequence, instance)
        if not ok:
            raise InfeasibleRouteError(violation)
        seq = tuple(int(x) for x in sequence)
        cost = route_cost(instance, seq)
        return cls(
            sequence=seq,
            cost=cost,
            cover=frozenset(i for i in seq if i != 0),
            reduced_cost=cost - float(sum(np.asarray(duals, dtype=float)[i] for i in seq if i != 0)),
        )

    def recompute_reduced_cost(self, instance: VrptwInstance, duals) -> float:
        return reduced_cost(instance, self.sequence, duals)

    def reprice(self, instance: VrptwInstance, duals) -> "Column":
        """Same route, reduced cost recomputed against a new dual vector."""
        return Column(
            sequence=self.sequence,
            cost=self.cost,
            cover=self.cover,
            reduced_cost=self.recompute_reduced_cost(instance, duals),
        )
