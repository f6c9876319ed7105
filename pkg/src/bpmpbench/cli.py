"""Command-line surface: generate, emit, solve, and benchmark.

Exit codes: 0 success, 1 user error (bad flags, bad files), 2 internal
error.  All subcommands are deterministic given their flags and input
files, except the cpu/wall fields of bench and evaluate.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import instance as inst_mod
from . import model as model_mod
from . import oracle as oracle_mod
from .benchcim import (
    ApproachConfig,
    WeightScheme,
    evaluate_technique,
    measure_external,
    measurements_csv,
    render_csv,
    render_markdown,
    report_from_json,
    report_to_json,
    sequential_evaluation,
    speedups,
    composite_report,
)
from .formulations import NODE_ARC, TRIPLES, TechniqueSet, apply_preset, build
from .solver import cutting_plane_solve, solve_mip


class UserError(Exception):
    """Invalid input that should exit with code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        raise UserError(message)


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UserError(f"--sizes must be a comma list of integers: {exc}")
    if not sizes or any(s < 3 for s in sizes):
        raise UserError("--sizes entries must be integers >= 3")
    return sizes


_CUT_NAMES = {"cover": "cover", "pairwise": "pairwise_demand", "pairwise_demand": "pairwise_demand"}


def _parse_cuts(text: str) -> tuple[str, ...]:
    fams = []
    for raw in text.split(","):
        raw = raw.strip()
        if not raw:
            continue
        if raw not in _CUT_NAMES:
            raise UserError(f"unknown cut family {raw!r} (expected cover, pairwise)")
        fams.append(_CUT_NAMES[raw])
    return tuple(fams)


def _resolve_config(args) -> ApproachConfig:
    if getattr(args, "preset", None):
        config = ApproachConfig.from_preset(args.preset)
        if getattr(args, "formulation", None) and args.formulation != config.formulation:
            raise UserError(
                f"--formulation {args.formulation} conflicts with preset {args.preset}"
            )
        return config
    if not getattr(args, "formulation", None):
        raise UserError("either --preset or --formulation is required")
    ts = TechniqueSet.from_list(args.techniques) if getattr(args, "techniques", None) else TechniqueSet()
    try:
        ts.check(args.formulation)
    except ValueError as exc:
        raise UserError(str(exc))
    return ApproachConfig(formulation=args.formulation, techniques=ts)


def _gen_instances(sizes: list[int], per_size: int, density: float, slack: float):
    """Deterministic bench instances: seed = 1000 * size + index."""
    params = inst_mod.GenParams(density=density, slack_factor=slack)
    out: dict[int, list[tuple[str, inst_mod.Instance]]] = {}
    for size in sizes:
        rows = []
        for idx in range(per_size):
            seed = 1000 * size + idx
            rows.append((f"n{size}-s{seed}", inst_mod.generate(size, seed, params)))
        out[size] = rows
    return out


def _load_weights(path: str | None, sizes: list[int]) -> WeightScheme:
    if path:
        try:
            return WeightScheme.from_json(Path(path).read_text())
        except (OSError, ValueError, KeyError) as exc:
            raise UserError(f"cannot read weight scheme {path}: {exc}")
    scheme = WeightScheme.node_arc_default()
    if all(s in scheme.size_weights for s in sizes):
        return scheme
    return scheme.with_uniform_sizes(sizes)


def _cmd_gen(args) -> int:
    params = inst_mod.GenParams(density=args.density, slack_factor=args.slack)
    try:
        inst = inst_mod.generate(args.n, args.seed, params)
    except ValueError as exc:
        raise UserError(str(exc))
    text = inst_mod.to_json(inst)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _load_instance(path: str) -> inst_mod.Instance:
    try:
        return inst_mod.load(path)
    except inst_mod.InstanceError as exc:
        raise UserError(str(exc))


def _cmd_model(args) -> int:
    inst = _load_instance(args.instance)
    config = _resolve_config(args)
    mip = build(inst, config.formulation, config.techniques)
    text = model_mod.emit_lp(mip) if args.emit == "lp" else model_mod.emit_mps(mip)
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"wrote {args.out} ({args.emit}, {len(mip.variables)} variables, {len(mip.constraints)} constraints)")
    return 0


def _cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    config = _resolve_config(args)
    mip = build(inst, config.formulation, config.techniques)
    families = _parse_cuts(args.cuts) if args.cuts else config.techniques.cut_families()
    if families:
        sol, log = cutting_plane_solve(mip, inst, families)
        cut_info = {"cuts_added": len(log.cuts), "separation_rounds": log.rounds}
    else:
        sol = solve_mip(mip)
        cut_info = {}
    if args.json:
        doc = sol.to_json_dict()
        doc.update(cut_info)
        print(json.dumps(doc, indent=2))
    else:
        print(f"status {sol.status}")
        if sol.objective is not None:
            print(f"objective {sol.objective:.6f}")
        print(f"nodes {sol.nodes} pivots {sol.pivots} ticks {sol.ticks}")
        if cut_info:
            print(f"cuts {cut_info['cuts_added']} rounds {cut_info['separation_rounds']}")
    return 0


def _cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    try:
        sol = oracle_mod.solve_exact(inst)
    except oracle_mod.SizeGuardError as exc:
        raise UserError(str(exc))
    if args.json:
        print(json.dumps(sol.to_json_dict(), indent=2))
    else:
        print(f"objective {sol.objective:.6f}")
        print(f"route {'-'.join(str(v) for v in sol.route)}")
        print(f"accepted {sorted(sol.accepted)}")
    return 0


def _measure_external_config(config, instances_by_size, args, outdir):
    models_dir = outdir / "models"
    models_dir.mkdir(parents=True, exist_ok=True)
    out = {}
    for size, rows in instances_by_size.items():
        runs = []
        for iid, inst in rows:
            mip = build(inst, config.formulation, config.techniques)
            path = models_dir / f"{config.describe()}_{iid}.lp"
            path.write_text(model_mod.emit_lp(mip), encoding="utf-8")
            runs.append(measure_external(args.external, str(path), args.trials, instance_id=iid))
        out[size] = runs
    return out


def _cmd_bench(args) -> int:
    baseline = ApproachConfig.from_preset(args.baseline)
    challenger = ApproachConfig.from_preset(args.challenger)
    sizes = _parse_sizes(args.sizes)
    weights = _load_weights(args.weights, sizes)
    instances = _gen_instances(sizes, args.per_size, args.density, args.slack)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    if args.external:
        base_runs = _measure_external_config(baseline, instances, args, outdir)
        chal_runs = _measure_external_config(challenger, instances, args, outdir)
        stats_by_size = {size: speedups(base_runs[size], chal_runs[size]) for size in instances}
        report = composite_report(stats_by_size, weights, baseline.describe(), challenger.describe())
        report.measurements = {
            size: {"baseline": base_runs[size], "challenger": chal_runs[size]} for size in instances
        }
    else:
        report = evaluate_technique(baseline, challenger, instances, weights, trials=args.trials)

    (outdir / "report.json").write_text(report_to_json(report), encoding="utf-8")
    (outdir / "report.md").write_text(render_markdown(report), encoding="utf-8")
    (outdir / "report.csv").write_text(render_csv(report), encoding="utf-8")
    (outdir / "measurements.csv").write_text(measurements_csv(report), encoding="utf-8")
    print(f"GCI {report.gci:.2f} decision {report.decision}")
    print(f"wrote {outdir}/report.json, report.md, report.csv, measurements.csv")
    return 0


def _cmd_evaluate(args) -> int:
    if args.formulation not in (NODE_ARC, TRIPLES):
        raise UserError(f"unknown formulation {args.formulation!r}")
    order = [t.strip() for t in args.techniques.split(",") if t.strip()]
    if not order:
        raise UserError("--techniques must list at least one technique")
    sizes = _parse_sizes(args.sizes)
    weights = _load_weights(args.weights, sizes)
    instances = _gen_instances(sizes, args.per_size, args.density, args.slack)
    initial = ApproachConfig(
        formulation=args.formulation,
        techniques=TechniqueSet(),
        label=f"original_{args.formulation.replace('-', '_')}",
    )
    try:
        reports, final = sequential_evaluation(initial, order, instances, weights, trials=args.trials)
    except ValueError as exc:
        raise UserError(str(exc))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    decisions = []
    for tag, report in zip(order, reports):
        (outdir / f"report_{tag}.json").write_text(report_to_json(report), encoding="utf-8")
        (outdir / f"report_{tag}.md").write_text(render_markdown(report), encoding="utf-8")
        decisions.append({"technique": tag, "gci": report.gci, "decision": report.decision})
        print(f"{tag}: GCI {report.gci:.2f} -> {report.decision}")
    summary = {
        "formulation": args.formulation,
        "order": order,
        "decisions": decisions,
        "final_techniques": final.techniques.to_list(),
    }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"final technique set: [{final.techniques.to_list()}]")
    return 0


def _cmd_report(args) -> int:
    indir = Path(args.in_dir)
    paths = sorted(indir.glob("report*.json"))
    if not paths:
        raise UserError(f"no report JSON files found in {indir}")
    reports = []
    for p in paths:
        try:
            reports.append(report_from_json(p.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, KeyError) as exc:
            raise UserError(f"cannot parse {p}: {exc}")
    text = render_markdown(reports) if args.format == "md" else render_csv(reports)
    sys.stdout.write(text)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="bpmpbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--density", type=float, default=0.7)
    p.add_argument("--slack", type=float, default=3.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("model", help="build a model and emit LP or MPS text")
    p.add_argument("--instance", required=True)
    p.add_argument("--formulation", choices=[NODE_ARC, TRIPLES])
    p.add_argument("--techniques")
    p.add_argument("--preset")
    p.add_argument("--emit", choices=["lp", "mps"], required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_model)

    p = sub.add_parser("solve", help="solve an instance with the built-in engine")
    p.add_argument("--instance", required=True)
    p.add_argument("--formulation", choices=[NODE_ARC, TRIPLES])
    p.add_argument("--techniques")
    p.add_argument("--preset")
    p.add_argument("--cuts", help="comma list: cover,pairwise")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="solve exactly by enumeration (small n)")
    p.add_argument("--instance", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("bench", help="compare two presets with the composite index method")
    p.add_argument("--baseline", required=True)
    p.add_argument("--challenger", required=True)
    p.add_argument("--sizes", required=True)
    p.add_argument("--per-size", type=int, default=3)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--weights")
    p.add_argument("--external", help="command template run per trial; {model} expands to the LP file")
    p.add_argument("--density", type=float, default=0.7)
    p.add_argument("--slack", type=float, default=3.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("evaluate", help="sequentially evaluate an ordered technique list")
    p.add_argument("--formulation", required=True)
    p.add_argument("--techniques", required=True)
    p.add_argument("--sizes", required=True)
    p.add_argument("--per-size", type=int, default=10)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--weights")
    p.add_argument("--density", type=float, default=0.7)
    p.add_argument("--slack", type=float, default=3.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("report", help="re-render stored reports")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--format", choices=["md", "csv"], default="md")
    p.set_defaults(func=_cmd_report)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
