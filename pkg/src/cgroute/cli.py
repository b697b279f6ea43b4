"""Command-line entry points: instance generation, benchmark import,
solving one root node, comparing two configurations, and the
pricing-vs-oracle self check."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .driver import CgConfig, CgRun, compare, run
from .generate import GenConfig, export_training_set, generate_instance, sample_duals
from .instance import VrptwInstance, build_pricing
from .pricing import DpParams, dp_price, exact_oracle
from . import solomon


def _cmd_generate(args) -> int:
    cfg = GenConfig(n=args.n, capacity=args.capacity if args.capacity else (80 if args.n >= 1000 else 50), seed=args.seed)
    out = Path(args.out)
    if args.count is not None:
        samples = export_training_set(cfg, args.count, out)
        print(f"wrote {len(samples)} samples under {out}")
    else:
        inst = generate_instance(cfg)
        inst.save(out)
        print(f"wrote {out} (n={inst.n}, capacity={inst.capacity})")
    return 0


def _cmd_import_benchmark(args) -> int:
    raw = solomon.parse(args.path)
    normalized = solomon.normalize(raw)
    out = Path(args.out)
    normalized.instance.save(out)
    scaling = {
        "name": raw.name,
        "coord_divisor": normalized.coord_divisor,
        "dual_divisor": normalized.dual_divisor,
    }
    scaling_path = Path(args.scaling_out) if args.scaling_out else out.with_suffix(".scaling.json")
    scaling_path.write_text(json.dumps(scaling, sort_keys=True, indent=2) + "\n")
    print(f"wrote {out} (n={normalized.instance.n}) and {scaling_path}")
    return 0


def _config_from_args(args) -> CgConfig:
    if args.config:
        cfg = CgConfig.load(args.config)
        return replace(cfg, strategy=args.strategy or cfg.strategy, seed=args.seed if args.seed is not None else cfg.seed)
    dp = DpParams()
    if args.expansions is not None:
        dp = replace(dp, expansion_limit=args.expansions, time_limit_s=None)
    construction = DpParams.construction()
    if args.expansions is not None:
        construction = replace(construction, expansion_limit=max(1, args.expansions // 4), time_limit_s=None)
    return CgConfig(
        strategy=args.strategy,
        seed=args.seed if args.seed is not None else 0,
        time_limit_s=args.time_limit,
        iter_limit=args.iter_limit,
        heatmap_dir=args.heatmap,
        surrogate_tau=args.surrogate,
        top_m=args.top_m,
        beta=args.beta,
        dp=dp,
        construction=construction,
    )


def _cmd_solve(args) -> int:
    instance = VrptwInstance.load(args.instance)
    cfg = _config_from_args(args)
    duals_rows = []
    on_duals = None
    if args.dump_duals:
        on_duals = lambda _iteration, duals: duals_rows.append([float(v) for v in np.asarray(duals)])
    log = run(instance, cfg, on_duals=on_duals)
    if args.dump_duals:
        Path(args.dump_duals).write_text("\n".join(json.dumps(row) for row in duals_rows) + "\n")
    if args.log:
        log.write_csv(args.log)
    print(
        f"strategy={log.strategy} n={log.n} iterations={len(log.iterations)} "
        f"objective={log.final_objective:.6f} reason={log.termination_reason}"
    )
    return 0


def _cmd_compare(args) -> int:
    inst_dir = Path(args.instances)
    paths = sorted(inst_dir.rglob("instance.json")) or sorted(inst_dir.glob("*.json"))
    if not paths:
        print(f"no instance JSON files under {inst_dir}", file=sys.stderr)
        return 2
    instances = [VrptwInstance.load(p) for p in paths]
    names = [str(p.relative_to(inst_dir)) for p in paths]
    cfg_a = CgConfig.load(args.a)
    cfg_b = CgConfig.load(args.b)
    report = compare(instances, cfg_a, cfg_b, names=names, time_axis=args.time_axis)
    written = report.write_csvs(args.out)
    if args.plots:
        from .report import render_report

        written += render_report(report, args.plots, label_a=cfg_a.strategy, label_b=cfg_b.strategy, time_axis=args.time_axis)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_oracle_check(args) -> int:
    from .generate import GenConfig

    violations = 0
    for trial in range(args.trials):
        cfg = GenConfig(n=args.n, capacity=50, seed=args.seed + trial)
        inst = generate_instance(cfg)
        duals = sample_duals(inst, seed=args.seed + 10_000 + trial)
        pricing = build_pricing(inst, duals)
        params = DpParams(time_limit_s=None, expansion_limit=args.expansions)
        result = dp_price(pricing, None, params)
        _col, optimum = exact_oracle(pricing, None)
        ok = result.stats.best_rc >= optimum - 1e-9
        if not ok:
            violations += 1
        print(f"trial {trial}: dp_best={result.stats.best_rc:.6f} oracle={optimum:.6f} {'ok' if ok else 'VIOLATION'}")
    print(f"{args.trials - violations}/{args.trials} trials dominated by the heuristic")
    return 0 if violations == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgroute", description="Column-generation root-node solver for C-VRPTW")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample random instances / training sets")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--count", type=int, default=None, help="export a training set of this many samples")
    g.add_argument("--capacity", type=float, default=None)
    g.set_defaults(func=_cmd_generate)

    imp = sub.add_parser("import-benchmark", help="convert a Solomon-layout file to instance JSON")
    imp.add_argument("path")
    imp.add_argument("--out", required=True)
    imp.add_argument("--scaling-out", default=None)
    imp.set_defaults(func=_cmd_import_benchmark)

    s = sub.add_parser("solve", help="solve one root node by column generation")
    s.add_argument("--instance", required=True)
    s.add_argument("--strategy", choices=["ulgr", "be2", "none"], default=None)
    s.add_argument("--heatmap", default=None, help="directory of per-iteration .hmap files")
    s.add_argument("--surrogate", type=float, default=None, help="softmax temperature of the model-free heat map")
    s.add_argument("--time-limit", type=float, default=3600.0)
    s.add_argument("--iter-limit", type=int, default=None)
    s.add_argument("--expansions", type=int, default=None, help="per-worker pricing budget replacing wall-clock limits")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--top-m", type=int, default=10)
    s.add_argument("--beta", type=float, default=0.2)
    s.add_argument("--log", default=None, help="write the per-iteration CSV here")
    s.add_argument("--config", default=None, help="load a full config JSON instead of flags")
    s.add_argument("--dump-duals", default=None, help="write per-iteration dual vectors (JSONL)")
    s.set_defaults(func=_cmd_solve)

    c = sub.add_parser("compare", help="run two configurations over an instance directory")
    c.add_argument("--instances", required=True)
    c.add_argument("--a", required=True, help="config JSON for the first method")
    c.add_argument("--b", required=True, help="config JSON for the second method")
    c.add_argument("--out", required=True, help="summary CSV path (siblings get _instances/_rc_series suffixes)")
    c.add_argument("--plots", default=None, help="also render PNG charts into this directory")
    c.add_argument("--time-axis", choices=["wall_ms", "iter"], default="wall_ms")
    c.set_defaults(func=_cmd_compare)

    o = sub.add_parser("oracle-check", help="dp pricing vs exhaustive oracle on random instances")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--trials", type=int, required=True)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--expansions", type=int, default=200_000)
    o.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "oracle-check" and args.n > 12:
        parser.error("oracle-check is limited to n <= 12")
    if getattr(args, "command", None) == "solve" and args.strategy is None and not args.config:
        parser.error("solve needs --strategy or --config")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
