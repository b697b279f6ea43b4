import csv
import json

import numpy as np
import pytest

from cgroute import (
    CgConfig,
    Column,
    DpParams,
    GenConfig,
    LsParams,
    RmpState,
    VrptwInstance,
    check_feasible,
    compare,
    generate_instance,
    init_columns,
    run,
)
from cgroute.driver import CgRun, DriverError, IterationLog
from cgroute.master import RmpState as _RmpState

from test_master import enumerate_routes, scipy_covering


def fast_dp(**overrides):
    base = dict(time_limit_s=None, expansion_limit=1500, success_threads=8, max_threads=24)
    base.update(overrides)
    return DpParams(**base)


def fast_construction(**overrides):
    base = dict(time_limit_s=None, expansion_limit=600, success_threads=8, max_threads=24)
    base.update(overrides)
    return DpParams.construction(**base)


class TestInitColumns:
    def test_single_customer(self):
        inst = generate_instance(GenConfig(n=1, seed=0))
        cols = init_columns(inst)
        assert len(cols) == 1
        assert cols[0].sequence == (0, 1, 0)

    def test_capacity_forces_two_routes_hand_trace(self):
        # three customers, capacity fits two of them; nearest-first greedy:
        # depot at origin, customers at 1, 2 and 10 on the x axis
        inst = VrptwInstance(
            coords=[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [10.0, 0.0]],
            demand=[0, 4, 4, 4],
            service=[0.0, 0.0, 0.0, 0.0],
            tw=[[0.0, 100.0]] * 4,
            capacity=8,
        )
        cols = init_columns(inst)
        assert [c.sequence for c in cols] == [(0, 1, 2, 0), (0, 3, 0)]

    def test_routes_partition_customers(self):
        for seed in range(6):
            inst = generate_instance(GenConfig(n=25, seed=seed))
            cols = init_columns(inst)
            covered = [i for c in cols for i in c.cover]
            assert sorted(covered) == list(range(1, 26))
            for col in cols:
                ok, violation = check_feasible(col.sequence, inst)
                assert ok, violation

    def test_unservable_customer_is_named(self):
        inst = VrptwInstance(
            coords=[[0.0, 0.0], [50.0, 0.0]],
            demand=[0, 1],
            service=[0.0, 0.0],
            tw=[[0.0, 20.0], [0.0, 20.0]],  # travel alone takes 50
            capacity=5,
        )
        with pytest.raises(DriverError, match="customer 1"):
            init_columns(inst)


class TestRunWithOraclePricing:
    @pytest.mark.parametrize("seed", range(4))
    def test_reaches_full_enumeration_lp_optimum(self, seed):
        inst = generate_instance(GenConfig(n=6, seed=700 + seed))
        cfg = CgConfig(strategy="none", pricer="oracle", seed=seed, time_limit_s=None)
        log = run(inst, cfg)
        assert log.termination_reason == "priced-out"

        routes = enumerate_routes(inst)
        cols = [Column.build(inst, seq, np.zeros(inst.n + 1)) for seq in routes]
        ref_obj, _ = scipy_covering([c.cost for c in cols], [c.cover for c in cols], inst.n)
        assert log.final_objective == pytest.approx(ref_obj, abs=1e-6)

    def test_priced_out_with_zero_duals_iff_no_negative_column(self):
        inst = generate_instance(GenConfig(n=5, seed=900))
        cfg = CgConfig(strategy="none", pricer="oracle", time_limit_s=None)
        log = run(inst, cfg)
        # travel costs are nonnegative, so the optimum is >= 0 and the last
        # pricing round must report nothing negative
        assert log.iterations[-1].best_rc >= -1e-9


class TestRunMechanics:
    def test_objective_series_non_increasing(self):
        inst = generate_instance(GenConfig(n=20, seed=5))
        cfg = CgConfig(strategy="none", seed=1, time_limit_s=None, iter_limit=100, dp=fast_dp())
        log = run(inst, cfg)
        objs = [it.objective for it in log.iterations]
        assert all(b <= a + 1e-9 for a, b in zip(objs, objs[1:]))

    def test_admitted_columns_reprice_negative(self):
        inst = generate_instance(GenConfig(n=15, seed=3))
        cfg = CgConfig(strategy="none", seed=0, time_limit_s=None, iter_limit=60, dp=fast_dp())
        audits = []

        def audit(iteration, duals, admitted):
            for col in admitted:
                brute = sum(inst.travel[col.sequence[k], col.sequence[k + 1]] for k in range(len(col.sequence) - 1))
                brute -= sum(duals[i] for i in col.sequence if i != 0)
                audits.append(brute)

        run(inst, cfg, on_admitted=audit)
        assert audits and all(rc < 0 for rc in audits)

    def test_iter_limit_reason(self):
        inst = generate_instance(GenConfig(n=15, seed=8))
        cfg = CgConfig(strategy="none", seed=0, time_limit_s=None, iter_limit=2, dp=fast_dp())
        log = run(inst, cfg)
        assert log.termination_reason == "time-limit"
        assert len(log.iterations) == 2

    def test_run_is_deterministic_under_iteration_budgets(self):
        inst = generate_instance(GenConfig(n=12, seed=4))
        cfg = CgConfig(
            strategy="ulgr",
            seed=7,
            time_limit_s=None,
            iter_limit=30,
            surrogate_tau=0.3,
            dp=fast_dp(),
            construction=fast_construction(),
            ls=LsParams(exchanges=15, workers=6),
        )
        a = run(inst, cfg)
        b = run(inst, cfg)
        assert [it.objective for it in a.iterations] == [it.objective for it in b.iterations]
        assert a.final_objective == b.final_objective

    def test_saturated_heat_map_equals_no_reduction(self):
        # with M = n every arc survives the adjustment, so the dp pricer
        # sees identical graphs and the runs coincide
        n = 30
        for seed in (0, 1):
            inst = generate_instance(GenConfig(n=n, seed=seed))
            shared = dict(seed=seed, time_limit_s=None, iter_limit=200, dp=fast_dp(), pricer="dp")
            log_none = run(inst, CgConfig(strategy="none", **shared))
            log_sat = run(inst, CgConfig(strategy="ulgr", surrogate_tau=0.25, top_m=n, **shared))
            assert log_none.termination_reason == "priced-out"
            assert log_sat.termination_reason == "priced-out"
            assert abs(log_sat.final_objective - log_none.final_objective) <= 1e-4

    def test_heatmap_dir_source_with_surrogate_fallback(self, tmp_path):
        from cgroute import build_pricing, save_T, surrogate_T

        inst = generate_instance(GenConfig(n=8, seed=2))
        # pre-render one heat map for iteration 0 from zero duals
        pricing0 = build_pricing(inst, np.zeros(9))
        save_T(tmp_path / "iter_000000.hmap", surrogate_T(pricing0, 0.4))
        cfg = CgConfig(
            strategy="ulgr",
            seed=1,
            time_limit_s=None,
            iter_limit=10,
            heatmap_dir=str(tmp_path),
            surrogate_tau=0.4,
            dp=fast_dp(),
            construction=fast_construction(),
            ls=LsParams(exchanges=10, workers=4),
        )
        log = run(inst, cfg)
        assert log.termination_reason in ("priced-out", "time-limit")

    def test_stall_guard_fires_on_flat_objectives(self):
        from cgroute.driver import StallGuard

        guard = StallGuard(limit=5)
        assert not guard.update(10.0)  # first value counts as an improvement
        fired = [guard.update(10.0) for _ in range(5)]
        assert fired == [False, False, False, False, True]

    def test_stall_guard_resets_on_improvement(self):
        from cgroute.driver import StallGuard

        guard = StallGuard(limit=3)
        guard.update(10.0)
        assert not guard.update(10.0)
        assert not guard.update(9.0)  # real progress resets the counter
        assert not guard.update(9.0)
        assert not guard.update(9.0)
        assert guard.update(9.0)

    def test_stall_guard_ignores_sub_tolerance_wiggle(self):
        from cgroute.driver import StallGuard

        guard = StallGuard(limit=2)
        guard.update(5.0)
        assert not guard.update(5.0 - 1e-12)
        assert guard.update(5.0 - 2e-12)


class TestCgConfig:
    def test_json_round_trip(self, tmp_path):
        cfg = CgConfig(
            strategy="ulgr",
            seed=3,
            time_limit_s=None,
            iter_limit=50,
            surrogate_tau=0.3,
            top_m=7,
            beta=0.25,
            dp=fast_dp(),
            construction=fast_construction(),
            ls=LsParams(exchanges=12, workers=5),
        )
        path = cfg.save(tmp_path / "cfg.json")
        again = CgConfig.load(path)
        assert again == cfg

    def test_ulgr_requires_heat_source(self):
        with pytest.raises(ValueError):
            CgConfig(strategy="ulgr")

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ValueError):
            CgConfig(strategy="both")


class TestCgRunSerialization:
    def test_round_trip(self):
        log = CgRun(strategy="be2", seed=2, n=9)
        log.iterations = [IterationLog(iter=0, wall_ms=5.0, objective=12.5, best_rc=-1.25, cols_added=3, pricing_ms=4.0)]
        log.final_objective = 12.5
        log.termination_reason = "priced-out"
        again = CgRun.from_dict(json.loads(json.dumps(log.to_dict())))
        assert again == log

    def test_csv_columns_contract(self, tmp_path):
        log = CgRun(strategy="none", seed=0, n=4)
        log.iterations = [IterationLog(iter=0, wall_ms=1.0, objective=3.25, best_rc=-0.5, cols_added=2, pricing_ms=0.5)]
        log.final_objective = 3.25
        log.termination_reason = "priced-out"
        path = log.write_csv(tmp_path / "run.csv")
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iter", "wall_ms", "objective", "best_rc", "cols_added", "pricing_ms"]
        assert rows[1][0] == "0" and float(rows[1][2]) == 3.25


class TestCompare:
    def _instances(self, count=3, n=10):
        return [generate_instance(GenConfig(n=n, seed=50 + k)) for k in range(count)]

    def test_self_comparison_is_flat(self, tmp_path):
        instances = self._instances()
        cfg = CgConfig(strategy="none", seed=1, time_limit_s=None, iter_limit=40, dp=fast_dp())
        report = compare(instances, cfg, cfg, time_axis="iter")
        assert report.pair.obj_gap == 0.0
        assert report.pair.j_a_better == 0 and report.pair.j_b_better == 0
        paths = report.write_csvs(tmp_path / "cmp.csv")
        assert [p.name for p in paths] == ["cmp.csv", "cmp_instances.csv", "cmp_rc_series.csv"]
        with open(paths[0]) as fh:
            rows = {row[0]: row[1] for row in csv.reader(fh)}
        assert float(rows["obj_gap"]) == 0.0
        assert rows["t_speedup_a_better"] == ""

    def test_two_strategy_report(self, tmp_path):
        instances = self._instances(count=2, n=12)
        cfg_a = CgConfig(
            strategy="ulgr",
            seed=2,
            time_limit_s=None,
            iter_limit=40,
            surrogate_tau=0.3,
            dp=fast_dp(),
            construction=fast_construction(),
            ls=LsParams(exchanges=10, workers=4),
        )
        cfg_b = CgConfig(strategy="be2", seed=2, time_limit_s=None, iter_limit=40, dp=fast_dp())
        report = compare(instances, cfg_a, cfg_b, names=["i0", "i1"], time_axis="iter")
        assert report.pair.n_instances == 2
        assert len(report.per_instance) == 2
        report.write_csvs(tmp_path / "out.csv")
        with open(tmp_path / "out_instances.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "instance" and rows[1][0] == "i0"

    def test_mismatched_inputs_rejected(self):
        cfg = CgConfig(strategy="none", time_limit_s=None, iter_limit=5, dp=fast_dp())
        with pytest.raises(DriverError):
            compare([], cfg, cfg)
        with pytest.raises(DriverError):
            compare(self._instances(2), cfg, cfg, names=["only-one"])


class TestReport:
    def test_figures_written(self, tmp_path):
        from cgroute.report import render_report

        instances = [generate_instance(GenConfig(n=8, seed=80 + k)) for k in range(2)]
        cfg_a = CgConfig(strategy="none", seed=0, time_limit_s=None, iter_limit=25, dp=fast_dp())
        cfg_b = CgConfig(strategy="be2", seed=0, time_limit_s=None, iter_limit=25, dp=fast_dp())
        report = compare(instances, cfg_a, cfg_b, time_axis="iter")
        paths = render_report(report, tmp_path / "figs", label_a="none", label_b="be2")
        names = sorted(p.name for p in paths)
        assert names == ["gap_convergence.png", "gap_hist.png", "rc_vs_iter.png", "speedup_hist.png"]
        for p in paths:
            assert p.stat().st_size > 0
