"""Solomon / Gehring-Homberger benchmark files: parsing, serialization,
and conversion to instances plus the model-input scaling record."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .instance import VrptwInstance

_COLUMNS = ("id", "x", "y", "demand", "ready", "due", "service")


class BenchmarkFormatError(ValueError):
    """Malformed benchmark file; the message names what broke where."""


@dataclass(frozen=True)
class NodeRow:
    id: int
    x: float
    y: float
    demand: float
    ready: float
    due: float
    service: float


@dataclass(frozen=True)
class RawBenchmark:
    name: str
    vehicle_count: int  # parsed but unused: the root-node LP has no fleet bound
    capacity: float
    rows: tuple

    @property
    def n(self) -> int:
        return len(self.rows) - 1


def parse(path_or_text) -> RawBenchmark:
    """Read a Solomon-layout file: name line, VEHICLE section with
    NUMBER/CAPACITY, CUSTOMER section with 7-column rows, depot id 0."""
    if isinstance(path_or_text, (str, Path)) and "\n" not in str(path_or_text):
        text = Path(path_or_text).read_text()
    else:
        text = str(path_or_text)
    lines = text.splitlines()

    name = None
    vehicle_line = None
    in_vehicle = False
    in_customer = False
    rows = []
    for lineno, raw_line in enumerate(lines, start=1):
        line = raw_line.strip()
        if not line:
            continue
        upper = line.upper()
        if name is None:
            name = line.split()[0]
            continue
        if upper.startswith("VEHICLE"):
            in_vehicle, in_customer = True, False
            continue
        if upper.startswith("CUSTOMER"):
            in_vehicle, in_customer = False, True
            continue
        tokens = line.split()
        if in_vehicle:
            if not _is_number(tokens[0]):
                continue  # the NUMBER/CAPACITY header line
            if len(tokens) != 2 or not _is_number(tokens[1]):
                raise BenchmarkFormatError(f"line {lineno}: vehicle section expects 2 numeric fields")
            vehicle_line = (lineno, tokens)
            continue
        if in_customer:
            if not _is_number(tokens[0]):
                continue  # the column header line(s)
            if len(tokens) != len(_COLUMNS):
                missing = _COLUMNS[len(tokens)] if len(tokens) < len(_COLUMNS) else "extra field"
                raise BenchmarkFormatError(
                    f"line {lineno}: customer row has {len(tokens)} fields, expected {len(_COLUMNS)} (at column '{missing}')"
                )
            values = []
            for col, tok in zip(_COLUMNS, tokens):
                try:
                    values.append(float(tok))
                except ValueError:
                    raise BenchmarkFormatError(f"line {lineno}: non-numeric value {tok!r} in column '{col}'") from None
            rows.append(NodeRow(int(values[0]), *values[1:]))

    if name is None:
        raise BenchmarkFormatError("malformed header: no instance name line")
    if vehicle_line is None:
        raise BenchmarkFormatError("malformed header: missing VEHICLE number/capacity line")
    seen = {}
    for row in rows:
        if row.id in seen:
            raise BenchmarkFormatError(f"duplicate node id {row.id}")
        seen[row.id] = row
    if not rows:
        raise BenchmarkFormatError("no customer rows")
    ordered = sorted(rows, key=lambda r: r.id)
    if [r.id for r in ordered] != list(range(len(ordered))):
        raise BenchmarkFormatError("node ids are not contiguous from 0")

    return RawBenchmark(
        name=name,
        vehicle_count=int(float(vehicle_line[1][0])),
        capacity=float(vehicle_line[1][1]),
        rows=tuple(ordered),
    )


def serialize(raw: RawBenchmark) -> str:
    """Write back the Solomon layout; parse(serialize(x)) == x."""
    out = [raw.name, "", "VEHICLE", "NUMBER     CAPACITY"]
    out.append(f"  {raw.vehicle_count:<9d}{_fmt(raw.capacity)}")
    out.append("")
    out.append("CUSTOMER")
    out.append("CUST NO.   XCOORD.   YCOORD.    DEMAND   READY TIME   DUE DATE   SERVICE TIME")
    out.append("")
    for r in raw.rows:
        out.append(
            f"  {r.id:<8d}{_fmt(r.x):>9}{_fmt(r.y):>10}{_fmt(r.demand):>10}"
            f"{_fmt(r.ready):>12}{_fmt(r.due):>11}{_fmt(r.service):>12}"
        )
    return "\n".join(out) + "\n"


def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def to_instance(raw: RawBenchmark) -> VrptwInstance:
    rows = raw.rows
    return VrptwInstance(
        coords=[[r.x, r.y] for r in rows],
        demand=[r.demand for r in rows],
        service=[r.service for r in rows],
        tw=[[r.ready, r.due] for r in rows],
        capacity=raw.capacity,
    )


@dataclass(frozen=True)
class NormalizedBenchmark:
    """Instance in native units plus the extra model-input scaling.

    Benchmark geometry differs from the unit-square training data, so
    model features get coordinates divided by the largest coordinate
    rounded up to the nearest 100, and duals divided by b_0 / 2. The LP
    never sees these divisors.
    """

    instance: VrptwInstance
    coord_divisor: float
    dual_divisor: float

    @property
    def model_coords(self) -> np.ndarray:
        return self.instance.coords / self.coord_divisor


def normalize(raw: RawBenchmark) -> NormalizedBenchmark:
    inst = to_instance(raw)
    max_coord = float(np.max(np.abs(inst.coords)))
    if max_coord <= 0:
        raise BenchmarkFormatError("all coordinates are zero; cannot derive a coordinate divisor")
    divisor = math.ceil(max_coord / 100.0) * 100.0
    return NormalizedBenchmark(instance=inst, coord_divisor=divisor, dual_divisor=inst.b0 / 2.0)
