import pytest

from cgroute.driver import CgRun, IterationLog
from cgroute.metrics import mean_rc_series, objective_gap, pair_metrics, time_to_reach


def fake_run(objs, times=None, best_rcs=None, reason="priced-out"):
    times = times if times is not None else [100.0 * (k + 1) for k in range(len(objs))]
    best_rcs = best_rcs if best_rcs is not None else [0.0] * len(objs)
    run = CgRun(strategy="none", seed=0, n=3)
    run.iterations = [
        IterationLog(iter=k, wall_ms=t, objective=o, best_rc=rc, cols_added=1, pricing_ms=1.0)
        for k, (t, o, rc) in enumerate(zip(times, objs, best_rcs))
    ]
    run.final_objective = objs[-1]
    run.termination_reason = reason
    return run


class TestObjectiveGap:
    def test_zero_for_identical(self):
        assert objective_gap([5.0, 7.0], [5.0, 7.0]) == 0.0

    def test_hand_value(self):
        # ((4-5)/5 + (6-5)/5) / 2 = 0
        assert objective_gap([4.0, 6.0], [5.0, 5.0]) == pytest.approx(0.0, abs=1e-15)
        # single pair: (9-10)/10 = -0.1
        assert objective_gap([9.0], [10.0]) == pytest.approx(-0.1, abs=1e-15)


class TestTimeToReach:
    def test_exact_log_point(self):
        assert time_to_reach([10, 20, 30], [8.0, 6.0, 5.0], 6.0) == 20

    def test_hand_interpolation(self):
        # target 5.5 crossed between (20, 6.0) and (30, 5.0):
        # fraction (6.0-5.5)/(6.0-5.0) = 0.5 -> t = 25
        assert time_to_reach([10, 20, 30], [8.0, 6.0, 5.0], 5.5) == pytest.approx(25.0, abs=1e-12)

    def test_initial_value_already_below(self):
        assert time_to_reach([10, 20], [4.0, 3.0], 5.0) == 10

    def test_unreachable_target(self):
        assert time_to_reach([10, 20], [8.0, 6.0], 1.0) is None


class TestPairMetrics:
    def test_self_comparison(self):
        runs = [fake_run([10.0, 8.0, 6.0]), fake_run([12.0, 9.0])]
        pm = pair_metrics(runs, runs)
        assert pm.obj_gap == 0.0
        assert pm.j_a_better == 0 and pm.j_b_better == 0
        assert pm.speedup_a_better is None and pm.speedup_b_better is None

    def test_hand_crossing_point(self):
        # a reaches b's final objective (6.0) halfway between its 2nd and
        # 3rd log points: t = 150; b's total time is 300 -> ratio 0.5
        run_a = fake_run([8.0, 7.0, 5.0], times=[50.0, 100.0, 200.0])
        run_b = fake_run([9.0, 7.5, 6.0], times=[100.0, 200.0, 300.0])
        pm = pair_metrics([run_a], [run_b])
        assert pm.j_a_better == 1
        assert pm.speedup_a_better == pytest.approx(150.0 / 300.0, abs=1e-12)
        assert pm.speedup_b_better is None
        assert pm.obj_gap == pytest.approx((5.0 - 6.0) / 6.0, abs=1e-12)

    def test_b_better_direction(self):
        run_a = fake_run([8.0, 7.0], times=[100.0, 200.0])
        run_b = fake_run([8.0, 6.5, 6.0], times=[100.0, 200.0, 400.0])
        pm = pair_metrics([run_a], [run_b])
        assert pm.j_b_better == 1
        # b reaches 7.0 between (100, 8.0) and (200, 6.5): t = 166.66..
        assert pm.speedup_b_better == pytest.approx((100 + 100 * (1.0 / 1.5)) / 200.0, abs=1e-9)

    def test_iteration_axis(self):
        run_a = fake_run([8.0, 5.0])
        run_b = fake_run([8.0, 6.0])
        pm = pair_metrics([run_a], [run_b], time_axis="iter")
        # a crosses 6.0 at iter 0 + (8-6)/(8-5) = 2/3; b's total "time" is 1
        assert pm.speedup_a_better == pytest.approx(2.0 / 3.0, abs=1e-12)


class TestRcSeries:
    def test_mean_over_active_runs(self):
        r1 = fake_run([9.0, 8.0, 7.0], best_rcs=[-3.0, -2.0, 0.0])
        r2 = fake_run([9.0, 8.5], best_rcs=[-1.0, 0.0])
        series = mean_rc_series([r1, r2])
        assert series[0] == (0, -2.0, 2)
        assert series[1] == (1, -1.0, 2)
        assert series[2] == (2, 0.0, 1)
