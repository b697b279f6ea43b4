from pathlib import Path

import numpy as np
import pytest

from cgroute import check_feasible
from cgroute.solomon import BenchmarkFormatError, NormalizedBenchmark, normalize, parse, serialize, to_instance

FIXTURE = Path(__file__).parent / "fixtures" / "gh_r1_2_fixture.txt"

SNIPPET = """toy5

VEHICLE
NUMBER     CAPACITY
  3          40

CUSTOMER
CUST NO.   XCOORD.   YCOORD.    DEMAND   READY TIME   DUE DATE   SERVICE TIME

  0          10        10         0          0        100          0
  1          15        12         7          5         30          2
  2           8        20         9          0         60          2
  3          20         5        12         10         80          2
  4           3         3         5          0         90          2
"""


class TestParse:
    def test_small_snippet(self):
        raw = parse(SNIPPET)
        assert raw.name == "toy5"
        assert raw.n == 4
        assert raw.vehicle_count == 3
        assert raw.capacity == 40
        assert raw.rows[0].id == 0 and raw.rows[0].due == 100
        assert raw.rows[3].x == 20 and raw.rows[3].ready == 10

    def test_missing_column_names_row_and_column(self):
        bad = SNIPPET.replace("  1          15        12         7          5         30          2",
                              "  1          15        12         7          5         30")
        with pytest.raises(BenchmarkFormatError, match="column 'service'"):
            parse(bad)

    def test_non_numeric_field_is_named(self):
        bad = SNIPPET.replace("  2           8        20         9          0         60          2",
                              "  2           8        20         9x         0         60          2")
        with pytest.raises(BenchmarkFormatError, match="column 'demand'"):
            parse(bad)

    def test_duplicate_id(self):
        bad = SNIPPET + "  4           3         3         5          0         90          2\n"
        with pytest.raises(BenchmarkFormatError, match="duplicate node id 4"):
            parse(bad)

    def test_missing_vehicle_header(self):
        with pytest.raises(BenchmarkFormatError, match="VEHICLE"):
            parse("toy\n\nCUSTOMER\n\n  0 0 0 0 0 10 0\n")

    def test_committed_fixture(self):
        raw = parse(FIXTURE)
        assert raw.n == 200
        assert raw.capacity == 200
        assert raw.vehicle_count == 50
        inst = to_instance(raw)
        assert inst.n == 200
        assert inst.capacity == 200
        assert inst.b0 == 240
        # every customer is reachable alone, so the file is usable end to end
        for i in (1, 57, 200):
            ok, violation = check_feasible([0, i, 0], inst)
            assert ok, violation

    def test_round_trip_identity(self):
        raw = parse(FIXTURE)
        again = parse(serialize(raw))
        assert again == raw
        toy = parse(SNIPPET)
        assert parse(serialize(toy)) == toy


class TestNormalize:
    def test_divisor_rounds_up_to_hundred(self):
        raw = parse(SNIPPET)
        # max coord 20 -> divisor 100
        assert normalize(raw).coord_divisor == 100

    def test_divisor_for_larger_grids(self):
        text = SNIPPET.replace("  3          20         5        12         10         80          2",
                               "  3         230         5        12         10         80          2")
        assert normalize(parse(text)).coord_divisor == 300
        text = SNIPPET.replace("  3          20         5        12         10         80          2",
                               "  3          93.4       5        12         10         80          2")
        assert normalize(parse(text)).coord_divisor == 100

    def test_dual_divisor_is_half_horizon(self):
        raw = parse(FIXTURE)
        norm = normalize(raw)
        assert norm.dual_divisor == 120.0

    def test_fixture_coords_scale_into_unit_square(self):
        norm = normalize(parse(FIXTURE))
        assert norm.coord_divisor == 200
        coords = norm.model_coords
        assert coords.min() >= 0 and coords.max() <= 1

    def test_normalization_keeps_lp_side_untouched(self):
        raw = parse(FIXTURE)
        plain = to_instance(raw)
        norm = normalize(raw)
        assert np.array_equal(plain.travel, norm.instance.travel)
        assert np.array_equal(plain.tw, norm.instance.tw)
        # feasibility of sampled routes is identical before/after
        rng = np.random.default_rng(0)
        for _ in range(25):
            inner = rng.choice(np.arange(1, 201), size=int(rng.integers(1, 5)), replace=False)
            seq = [0, *map(int, inner), 0]
            assert check_feasible(seq, plain)[0] == check_feasible(seq, norm.instance)[0]

    def test_zero_coordinates_rejected(self):
        text = """z

VEHICLE
NUMBER     CAPACITY
  1          10

CUSTOMER
CUST NO.   XCOORD.   YCOORD.    DEMAND   READY TIME   DUE DATE   SERVICE TIME

  0           0         0         0          0         10          0
  1           0         0         1          0         10          0
"""
        with pytest.raises(BenchmarkFormatError, match="coordinate"):
            normalize(parse(text))
