"""Command-line interface.

Subcommands: run, gen-env, steer, smooth, aggregate. Exit codes: 0 on
success, 1 for configuration/validation errors, 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bench import (
    BenchmarkConfig,
    ConfigError,
    SchemaVersionError,
    aggregate,
    aggregate_to_csv,
    aggregate_to_markdown,
    read_results,
    run_experiment,
    write_results,
)
from .collision import CollisionModel, ValidityChecker
from .env import GridEnv, gen_corridor_env, gen_density_env, load_polygon_env
from .geom import Pose
from .smoothing import SmootherParams, get_smoother
from .steer import PathSample, SteerConfig, SteeredPath, get_steer_function


def _parse_pose(text: str) -> Pose:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("pose must be x,y,theta")
    return Pose(*parts)


def _path_to_json(path: SteeredPath) -> dict:
    return {
        "length": path.length,
        "poses": [[s.pose.x, s.pose.y, s.pose.theta] for s in path.samples],
        "arc_lengths": [s.arc_length for s in path.samples],
        "directions": [s.direction for s in path.samples],
    }


def _path_from_json(doc: dict) -> SteeredPath:
    samples = [
        PathSample(Pose(*pose), arc, int(direction))
        for pose, arc, direction in zip(
            doc["poses"], doc["arc_lengths"], doc["directions"]
        )
    ]
    return SteeredPath.from_integrated(samples)


def _load_env(path: str):
    text = open(path).read()
    head = text.lstrip()[:1]
    if head == "{":
        doc = json.loads(text)
        if "bounds" in doc:
            env, _ = load_polygon_env(text)
            return env
        env, _, _ = GridEnv.from_json(text)
        return env
    from .env import parse_movingai_map

    return parse_movingai_map(text)


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
        if args.workers is not None:
            doc["workers"] = args.workers
        if args.seed is not None:
            doc["base_seed"] = args.seed
        cfg = BenchmarkConfig.from_dict(doc)
    except (OSError, json.JSONDecodeError, ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        rs = run_experiment(cfg)
        write_results(rs, args.out)
    except Exception as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    counts = {}
    for run in rs.runs:
        counts[run.status] = counts.get(run.status, 0) + 1
    print(f"wrote {len(rs.runs)} runs to {args.out} ({counts})")
    return 0


def _cmd_gen_env(args) -> int:
    try:
        width, height = (int(v) for v in args.size.lower().split("x"))
        if args.generator == "corridor":
            if args.radius is None:
                raise ConfigError("corridor generator requires --radius")
            env, start, goal = gen_corridor_env(
                args.seed, width, height, args.radius, iterations=args.iterations
            )
            params = {"radius": args.radius, "iterations": args.iterations}
        else:
            if args.density is None:
                raise ConfigError("density generator requires --density")
            env = gen_density_env(args.seed, width, height, args.density)
            start = goal = None
            params = {"density": args.density}
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        with open(args.out, "w") as fh:
            fh.write(env.to_json(start=start, goal=goal, seed=args.seed, params=params))
            fh.write("\n")
    except OSError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.generator} environment ({width}x{height}) to {args.out}")
    return 0


def _cmd_steer(args) -> int:
    try:
        steer_fn = get_steer_function(args.steer)
        cfg = SteerConfig(
            turning_radius=args.radius, sample_resolution=args.resolution
        )
    except (KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        path = steer_fn(args.from_pose, args.to_pose, cfg)
        with open(args.out, "w") as fh:
            json.dump(_path_to_json(path), fh)
            fh.write("\n")
    except Exception as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    print(f"{args.steer}: length {path.length:.6f} m, {len(path.samples)} samples")
    return 0


def _cmd_smooth(args) -> int:
    try:
        smoother = get_smoother(args.method)
        env = _load_env(args.env)
        with open(args.path) as fh:
            path = _path_from_json(json.load(fh))
        steer_fn = get_steer_function(args.steer)
        cfg = SteerConfig(turning_radius=args.radius)
        params = SmootherParams()
    except (KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        checker = ValidityChecker(env, CollisionModel.point())
        result = smoother(path, checker, steer_fn, cfg, params)
        with open(args.out, "w") as fh:
            json.dump(_path_to_json(result.path), fh)
            fh.write("\n")
    except Exception as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    print(
        f"{args.method}: length {result.length_before:.3f} -> {result.length_after:.3f} m"
        + (" (input invalid, returned unchanged)" if result.input_invalid else "")
    )
    return 0


def _cmd_aggregate(args) -> int:
    try:
        rs = read_results(args.results)
    except (OSError, json.JSONDecodeError, SchemaVersionError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        rows = aggregate(rs)
        text = aggregate_to_csv(rows) if args.format == "csv" else aggregate_to_markdown(rows)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except Exception as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wheelbench",
        description="Motion-planning benchmark for nonholonomic wheeled robots",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a benchmark configuration")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.set_defaults(fn=_cmd_run)

    p_gen = sub.add_parser("gen-env", help="generate a procedural grid environment")
    p_gen.add_argument("generator", choices=("corridor", "density"))
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--size", required=True, help="WxH in cells, e.g. 100x100")
    p_gen.add_argument("--radius", type=int, default=None)
    p_gen.add_argument("--iterations", type=int, default=30)
    p_gen.add_argument("--density", type=float, default=None)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(fn=_cmd_gen_env)

    p_steer = sub.add_parser("steer", help="solve one steering query")
    p_steer.add_argument("--steer", required=True, choices=("dubins", "reeds-shepp", "posq"))
    p_steer.add_argument("--from", dest="from_pose", type=_parse_pose, required=True)
    p_steer.add_argument("--to", dest="to_pose", type=_parse_pose, required=True)
    p_steer.add_argument("--radius", type=float, default=1.0)
    p_steer.add_argument("--resolution", type=float, default=0.1)
    p_steer.add_argument("--out", required=True)
    p_steer.set_defaults(fn=_cmd_steer)

    p_smooth = sub.add_parser("smooth", help="post-smooth a sampled path")
    p_smooth.add_argument(
        "--method", required=True, choices=("shortcut", "bspline", "simplify-max", "grips")
    )
    p_smooth.add_argument("--path", required=True)
    p_smooth.add_argument("--env", required=True)
    p_smooth.add_argument("--steer", default="reeds-shepp")
    p_smooth.add_argument("--radius", type=float, default=1.0)
    p_smooth.add_argument("--out", required=True)
    p_smooth.set_defaults(fn=_cmd_smooth)

    p_agg = sub.add_parser("aggregate", help="summarize a results file")
    p_agg.add_argument("--results", required=True)
    p_agg.add_argument("--format", choices=("csv", "md"), default="md")
    p_agg.add_argument("--out", default=None)
    p_agg.set_defaults(fn=_cmd_aggregate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
