"""Experiment configuration, parallel execution, results and aggregation.

Execution model: a pool of worker threads runs the (scenario x planner x
smoother x repetition) grid in randomized order (order derived from the
base seed and recorded via the config echo). Each run executes on its own
daemon thread; planners self-terminate at the soft deadline and a watchdog
abandons any run that exceeds hard_kill_factor x time_limit, recording it
as killed. Output ordering is canonical and independent of scheduling.

Run i of the grid is seeded with splitmix64(base_seed + i).
"""

from __future__ import annotations

import json
import math
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .collision import CollisionModel, ValidityChecker
from .env import (
    GridEnv,
    Scenario,
    gen_corridor_env,
    gen_density_env,
    load_bundled_scene,
    load_polygon_env,
    nearest_free_cell,
    parse_movingai_map,
    parse_movingai_scen,
    select_hardest,
)
from .geom import ConvexPolygon, Pose
from .metrics import MetricsRecord, count_cusps, curvature_stats, evaluate, mean_path_clearance, path_length
from .planners import PlannerParams, PlanningProblem, PlanStatus, get_planner
from .rng import make_rng, splitmix64
from .smoothing import SmootherParams, get_smoother
from .steer import SteerConfig, get_steer_function

SCHEMA_VERSION = 1

# run-level fields that depend on wall-clock timing, stripped for
# byte-identity comparisons between reruns
WALL_CLOCK_RUN_FIELDS = ("time_to_first",)


class ConfigError(ValueError):
    """Invalid benchmark configuration."""


class SchemaVersionError(ValueError):
    """Result file written by an incompatible schema version."""


@dataclass
class BenchmarkConfig:
    scenarios: List[dict]
    planners: List[Tuple[str, PlannerParams]]
    steer_name: str = "reeds-shepp"
    steer_config: SteerConfig = field(default_factory=SteerConfig)
    smoothers: List[Tuple[str, SmootherParams]] = field(default_factory=list)
    collision_model: CollisionModel = field(default_factory=CollisionModel.point)
    check_resolution: Optional[float] = None
    goal_tolerance: Tuple[float, float] = (0.5, 0.5)
    time_limit: float = 10.0
    repetitions: int = 1
    base_seed: int = 0
    workers: int = 1
    hard_kill_factor: float = 2.0
    raw: Optional[dict] = None  # config echo for reproducibility

    def __post_init__(self):
        if self.time_limit <= 0:
            raise ConfigError("time_limit must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if self.hard_kill_factor < 1.0:
            raise ConfigError("hard_kill_factor must be at least 1")
        if not self.scenarios:
            raise ConfigError("at least one scenario is required")
        if not self.planners:
            raise ConfigError("at least one planner is required")

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchmarkConfig":
        try:
            planners = [
                (p["name"], PlannerParams(**p.get("params", {})))
                for p in doc["planners"]
            ]
            steer = doc.get("steer", {})
            steer_cfg = steer.get("config", {})
            if "posq_gains" in steer_cfg:
                steer_cfg = dict(steer_cfg, posq_gains=tuple(steer_cfg["posq_gains"]))
            smoothers = [
                (s["name"], SmootherParams(**s.get("params", {})))
                for s in doc.get("smoothers", [])
            ]
            collision = doc.get("collision", {})
            model = _collision_model_from(collision.get("model", "point"))
            return cls(
                scenarios=list(doc["scenarios"]),
                planners=planners,
                steer_name=steer.get("name", "reeds-shepp"),
                steer_config=SteerConfig(**steer_cfg),
                smoothers=smoothers,
                collision_model=model,
                check_resolution=collision.get("check_resolution"),
                goal_tolerance=tuple(doc.get("goal_tolerance", (0.5, 0.5))),
                time_limit=float(doc.get("time_limit", 10.0)),
                repetitions=int(doc.get("repetitions", 1)),
                base_seed=int(doc.get("base_seed", 0)),
                workers=int(doc.get("workers", 1)),
                hard_kill_factor=float(doc.get("hard_kill_factor", 2.0)),
                raw=doc,
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid benchmark config: {exc}") from None

    def echo(self) -> dict:
        if self.raw is not None:
            return self.raw
        return {
            "scenarios": self.scenarios,
            "planners": [
                {"name": n, "params": vars(p).copy()} for n, p in self.planners
            ],
            "steer": {"name": self.steer_name, "config": _steer_config_dict(self.steer_config)},
            "smoothers": [
                {"name": n, "params": vars(p).copy()} for n, p in self.smoothers
            ],
            "collision": {
                "model": _collision_model_dict(self.collision_model),
                "check_resolution": self.check_resolution,
            },
            "goal_tolerance": list(self.goal_tolerance),
            "time_limit": self.time_limit,
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "workers": self.workers,
            "hard_kill_factor": self.hard_kill_factor,
        }


def _steer_config_dict(cfg: SteerConfig) -> dict:
    return {
        "turning_radius": cfg.turning_radius,
        "v_max": cfg.v_max,
        "omega_max": cfg.omega_max,
        "sample_resolution": cfg.sample_resolution,
        "posq_gains": list(cfg.posq_gains),
        "posq_dt": cfg.posq_dt,
        "posq_goal_eps": cfg.posq_goal_eps,
        "posq_max_time": cfg.posq_max_time,
    }


def _collision_model_from(spec) -> CollisionModel:
    if spec == "point":
        return CollisionModel.point()
    if spec == "car":
        return CollisionModel.car()
    if spec == "warehouse-bot":
        return CollisionModel.warehouse_bot()
    if isinstance(spec, dict) and "footprint" in spec:
        return CollisionModel(ConvexPolygon(spec["footprint"]))
    raise ConfigError(f"unknown collision model {spec!r}")


def _collision_model_dict(model: CollisionModel):
    if model.is_point:
        return "point"
    return {"footprint": [list(v) for v in model.footprint.vertices]}


def expand_scenarios(specs: Sequence[dict]) -> List[Scenario]:
    """Materialize scenario specs: generators, file references, inline data."""
    out: List[Scenario] = []
    for spec in specs:
        kind = spec.get("type")
        if kind == "corridor":
            env, start, goal = gen_corridor_env(
                int(spec["seed"]),
                int(spec["width"]),
                int(spec["height"]),
                int(spec["radius"]),
                iterations=int(spec.get("iterations", 30)),
                cell_size=float(spec.get("cell_size", 1.0)),
            )
            name = spec.get("name", f"corridor-s{spec['seed']}-r{spec['radius']}")
            out.append(Scenario(name, env, start, goal))
        elif kind == "density":
            env = gen_density_env(
                int(spec["seed"]),
                int(spec["width"]),
                int(spec["height"]),
                float(spec["density"]),
                cell_size=float(spec.get("cell_size", 1.0)),
            )
            if spec.get("start"):
                start = Pose(*spec["start"])
                goal = Pose(*spec["goal"])
            else:
                sc_col, sc_row = nearest_free_cell(env, 2, 2)
                gc_col, gc_row = nearest_free_cell(env, env.width - 3, env.height - 3)
                start = Pose(*env.cell_center(sc_col, sc_row), 0.0)
                goal = Pose(*env.cell_center(gc_col, gc_row), 0.0)
            name = spec.get("name", f"density-s{spec['seed']}-d{spec['density']}")
            out.append(Scenario(name, env, start, goal))
        elif kind == "grid-file":
            env = parse_movingai_map(open(spec["map"]).read())
            scens = parse_movingai_scen(open(spec["scen"]).read(), env)
            if "hardest" in spec:
                scens = select_hardest(scens, int(spec["hardest"]))
            out.extend(scens)
        elif kind == "grid-json":
            env, start, goal = GridEnv.from_json(open(spec["path"]).read())
            if spec.get("start"):
                start = Pose(*spec["start"])
            if spec.get("goal"):
                goal = Pose(*spec["goal"])
            if start is None or goal is None:
                raise ConfigError(f"grid-json scenario {spec} lacks start/goal")
            out.append(Scenario(spec.get("name", spec["path"]), env, start, goal))
        elif kind == "polygon-file":
            _, scens = load_polygon_env(open(spec["path"]).read())
            out.extend(scens)
        elif kind == "bundled":
            _, scens = load_bundled_scene(spec["name"])
            out.extend(scens)
        else:
            raise ConfigError(f"unknown scenario type {kind!r}")
    names = [s.name for s in out]
    if len(set(names)) != len(names):
        raise ConfigError("scenario names must be unique")
    return out


@dataclass
class RunRecord:
    scenario: str
    planner: str
    steer: str
    smoother: Optional[str]
    seed: int
    status: str  # ok | timeout | killed | error
    time_to_first: Optional[float]
    metrics: MetricsRecord
    metrics_smoothed: Optional[MetricsRecord]
    solution_history: List[Tuple[float, float]]
    error: Optional[str] = None

    def sort_key(self):
        return (self.scenario, self.planner, self.smoother or "", self.seed)

    def to_dict(self) -> dict:
        metrics = self.metrics.to_dict()
        metrics.pop("planning_time", None)
        smoothed = None
        if self.metrics_smoothed is not None:
            smoothed = self.metrics_smoothed.to_dict()
            smoothed.pop("planning_time", None)
        doc = {
            "scenario": self.scenario,
            "planner": self.planner,
            "steer": self.steer,
            "smoother": self.smoother,
            "seed": self.seed,
            "status": self.status,
            "time_to_first": self.time_to_first,
            "metrics": metrics,
            "metrics_smoothed": smoothed,
            "solution_history": [[t, l] for t, l in self.solution_history],
        }
        if self.error is not None:
            doc["error"] = self.error
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "RunRecord":
        def metrics_from(d):
            if d is None:
                return None
            d = dict(d)
            d.setdefault("planning_time", None)
            return MetricsRecord.from_dict(d)

        return cls(
            scenario=doc["scenario"],
            planner=doc["planner"],
            steer=doc["steer"],
            smoother=doc.get("smoother"),
            seed=doc["seed"],
            status=doc["status"],
            time_to_first=doc.get("time_to_first"),
            metrics=metrics_from(doc["metrics"]),
            metrics_smoothed=metrics_from(doc.get("metrics_smoothed")),
            solution_history=[tuple(p) for p in doc.get("solution_history", [])],
            error=doc.get("error"),
        )


@dataclass
class ResultSet:
    config: dict
    runs: List[RunRecord]
    tool_version: str = __version__
    wall_clock: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "tool_version": self.tool_version,
            "runs": [r.to_dict() for r in self.runs],
            "wall_clock": self.wall_clock,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ResultSet":
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaVersionError(
                f"result file has schema_version {version!r}, expected {SCHEMA_VERSION}"
            )
        return cls(
            config=doc["config"],
            runs=[RunRecord.from_dict(r) for r in doc["runs"]],
            tool_version=doc.get("tool_version", "unknown"),
            wall_clock=doc.get("wall_clock", {}),
        )


def strip_wall_clock(doc: dict) -> dict:
    """Canonical copy of a serialized ResultSet without wall-clock fields,
    for byte-identity comparisons between reruns."""
    out = json.loads(json.dumps(doc))
    out.pop("wall_clock", None)
    for run in out.get("runs", ()):
        for key in WALL_CLOCK_RUN_FIELDS:
            run.pop(key, None)
        run["solution_history"] = [l for _, l in run.get("solution_history", [])]
    return out


# -- execution -------------------------------------------------------------


def _run_once(
    scenario: Scenario,
    planner_name: str,
    params: PlannerParams,
    smoother_entry: Optional[Tuple[str, SmootherParams]],
    cfg: BenchmarkConfig,
    seed: int,
) -> RunRecord:
    steer_fn = get_steer_function(cfg.steer_name)
    checker = ValidityChecker(scenario.env, cfg.collision_model, cfg.check_resolution)
    problem = PlanningProblem(
        scenario, checker, steer_fn, cfg.steer_config, cfg.goal_tolerance
    )
    run_params = PlannerParams(**{**vars(params), "rng_seed": seed})
    result = get_planner(planner_name)(problem, run_params, cfg.time_limit)
    metrics = evaluate(result, problem)

    smoother_name = smoother_entry[0] if smoother_entry else None
    metrics_smoothed = None
    if (
        smoother_entry is not None
        and result.status is PlanStatus.SOLVED
        and result.path is not None
    ):
        name, sparams = smoother_entry
        sparams = SmootherParams(**{**vars(sparams), "rng_seed": seed})
        smooth = get_smoother(name)(
            result.path, checker.clone(), steer_fn, cfg.steer_config, sparams
        )
        sm_checker = checker.clone()
        collision_free = sm_checker.is_path_valid(smooth.path)
        end = smooth.path.end_pose
        goal = scenario.goal
        pos_tol, heading_tol = cfg.goal_tolerance
        stats = curvature_stats(smooth.path)
        metrics_smoothed = MetricsRecord(
            found=True,
            collision_free=collision_free,
            exact=(
                end.distance_to(goal) <= pos_tol
                and abs(end.heading_error_to(goal)) <= heading_tol
            ),
            length=path_length(smooth.path),
            mean_curvature=stats.mean,
            max_curvature=stats.max,
            cusps=count_cusps(smooth.path),
            mean_clearance=mean_path_clearance(smooth.path, sm_checker),
            planning_time=(result.total_time or 0.0) + smooth.time,
            state_checks=metrics.state_checks,
        )

    status = "timeout" if result.status is PlanStatus.TIMEOUT else "ok"
    return RunRecord(
        scenario=scenario.name,
        planner=planner_name,
        steer=cfg.steer_name,
        smoother=smoother_name,
        seed=seed,
        status=status,
        time_to_first=result.time_to_first_solution,
        metrics=metrics,
        metrics_smoothed=metrics_smoothed,
        solution_history=list(result.solution_history),
    )


def run_experiment(cfg: BenchmarkConfig) -> ResultSet:
    """Execute the full run grid and return canonically ordered results."""
    started = datetime.now(timezone.utc)
    t0 = time.monotonic()
    scenarios = expand_scenarios(cfg.scenarios)
    smoother_entries: List[Optional[Tuple[str, SmootherParams]]] = (
        list(cfg.smoothers) if cfg.smoothers else [None]
    )

    grid = []
    index = 0
    for scenario in scenarios:
        for planner_name, params in cfg.planners:
            for smoother in smoother_entries:
                for _rep in range(cfg.repetitions):
                    grid.append(
                        (index, scenario, planner_name, params, smoother,
                         splitmix64((cfg.base_seed + index) & ((1 << 64) - 1)))
                    )
                    index += 1

    order = list(range(len(grid)))
    make_rng(cfg.base_seed, 0x08DE8).shuffle(order)

    results: Dict[int, RunRecord] = {}
    lock = threading.Lock()
    cursor = {"next": 0}

    def worker():
        while True:
            with lock:
                if cursor["next"] >= len(order):
                    return
                job = grid[order[cursor["next"]]]
                cursor["next"] += 1
            idx, scenario, planner_name, params, smoother, seed = job
            hard_timeout = cfg.hard_kill_factor * cfg.time_limit + (
                smoother[1].time_budget if smoother else 0.0
            )
            holder: Dict[str, RunRecord] = {}

            def target():
                try:
                    holder["record"] = _run_once(
                        scenario, planner_name, params, smoother, cfg, seed
                    )
                except Exception as exc:  # individual crashes become records
                    holder["record"] = RunRecord(
                        scenario=scenario.name,
                        planner=planner_name,
                        steer=cfg.steer_name,
                        smoother=smoother[0] if smoother else None,
                        seed=seed,
                        status="error",
                        time_to_first=None,
                        metrics=MetricsRecord.not_found(),
                        metrics_smoothed=None,
                        solution_history=[],
                        error=f"{type(exc).__name__}: {exc}",
                    )

            thread = threading.Thread(target=target, daemon=True)
            thread.start()
            thread.join(hard_timeout)
            if thread.is_alive():
                record = RunRecord(
                    scenario=scenario.name,
                    planner=planner_name,
                    steer=cfg.steer_name,
                    smoother=smoother[0] if smoother else None,
                    seed=seed,
                    status="killed",
                    time_to_first=None,
                    metrics=MetricsRecord.not_found(),
                    metrics_smoothed=None,
                    solution_history=[],
                )
            else:
                record = holder["record"]
            with lock:
                results[idx] = record

    pool = [threading.Thread(target=worker, daemon=True) for _ in range(cfg.workers)]
    for t in pool:
        t.start()
    for t in pool:
        t.join()

    runs = [results[i] for i in sorted(results)]
    runs.sort(key=RunRecord.sort_key)
    return ResultSet(
        config=cfg.echo(),
        runs=runs,
        wall_clock={
            "started_at": started.isoformat(),
            "elapsed_seconds": time.monotonic() - t0,
        },
    )


# -- aggregation -------------------------------------------------------------


def _mean_std(values: List[float]) -> Optional[Tuple[float, float]]:
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    mean = sum(vals) / len(vals)
    if len(vals) == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return mean, math.sqrt(var)


def aggregate(rs: ResultSet) -> List[dict]:
    """Per (planner, steer, smoother) group statistics.

    Solutions are reported as "collision-free-and-exact / found"; numeric
    metrics are mean +- sample standard deviation over runs where the value
    is present (smoothed metrics when a smoother ran); cusps are summed.
    """
    if not rs.runs:
        raise ValueError("cannot aggregate an empty result set")
    groups: Dict[Tuple[str, str, Optional[str]], List[RunRecord]] = {}
    for run in rs.runs:
        groups.setdefault((run.planner, run.steer, run.smoother), []).append(run)

    rows = []
    for (planner, steer, smoother), runs in sorted(
        groups.items(), key=lambda kv: (kv[0][1], kv[0][0], kv[0][2] or "")
    ):
        effective = [
            (r.metrics_smoothed if r.metrics_smoothed is not None else r.metrics, r)
            for r in runs
        ]
        found = [m for m, _ in effective if m.found]
        valid_exact = sum(1 for m, _ in effective if m.found and m.collision_free and m.exact)
        row = {
            "planner": planner,
            "steer": steer,
            "smoother": smoother,
            "runs": len(runs),
            "found": len(found),
            "valid_exact": valid_exact,
            "time": _mean_std([r.time_to_first for _, r in effective]),
            "length": _mean_std([m.length for m in found]),
            "max_curvature": _mean_std([m.max_curvature for m in found]),
            "mean_curvature": _mean_std([m.mean_curvature for m in found]),
            "mean_clearance": _mean_std([m.mean_clearance for m in found]),
            "cusps": sum(m.cusps or 0 for m in found) if found else None,
        }
        rows.append(row)
    return rows


def _fmt_stat(stat: Optional[Tuple[float, float]]) -> str:
    if stat is None:
        return "N / A"
    return f"{stat[0]:.2f} ± {stat[1]:.2f}"


def aggregate_to_csv(rows: List[dict]) -> str:
    header = (
        "planner,steer,smoother,runs,solutions,time,length,"
        "max_curvature,mean_curvature,mean_clearance,cusps"
    )
    lines = [header]
    for row in rows:
        solutions = (
            f"{row['valid_exact']} / {row['found']}" if row["found"] else "0"
        )
        cells = [
            row["planner"],
            row["steer"],
            row["smoother"] or "",
            str(row["runs"]),
            solutions,
            _fmt_stat(row["time"]),
            _fmt_stat(row["length"]),
            _fmt_stat(row["max_curvature"]),
            _fmt_stat(row["mean_curvature"]),
            _fmt_stat(row["mean_clearance"]),
            "N / A" if row["cusps"] is None else str(row["cusps"]),
        ]
        lines.append(",".join(f'"{c}"' if "," in c else c for c in cells))
    return "\n".join(lines) + "\n"


def aggregate_to_markdown(rows: List[dict]) -> str:
    header = (
        "| Planner | Steer | Smoother | Solutions | Time [s] | Path Length | "
        "Max Curvature | Curvature | Clearance | Cusps |"
    )
    sep = "|" + "---|" * 10
    lines = [header, sep]
    for row in rows:
        solutions = (
            f"{row['valid_exact']} / {row['found']}" if row["found"] else "0"
        )
        cusps = "N / A" if row["cusps"] is None else str(row["cusps"])
        lines.append(
            f"| {row['planner']} | {row['steer']} | {row['smoother'] or '-'} | "
            f"{solutions} | {_fmt_stat(row['time'])} | {_fmt_stat(row['length'])} | "
            f"{_fmt_stat(row['max_curvature'])} | {_fmt_stat(row['mean_curvature'])} | "
            f"{_fmt_stat(row['mean_clearance'])} | {cusps} |"
        )
    return "\n".join(lines) + "\n"


# -- persistence -------------------------------------------------------------


class _FloatRepr(float):
    def __repr__(self):
        return float.__repr__(self)


def write_results(rs: ResultSet, path: str) -> None:
    """Lossless JSON: floats use shortest round-trip (<= 17 significant
    digits) representation."""
    with open(path, "w") as fh:
        json.dump(rs.to_dict(), fh, indent=1)
        fh.write("\n")


def read_results(path: str) -> ResultSet:
    with open(path) as fh:
        doc = json.load(fh)
    return ResultSet.from_dict(doc)
