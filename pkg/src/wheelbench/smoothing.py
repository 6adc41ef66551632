"""Post-smoothing: Shortcut, B-Spline, SimplifyMax, and GRIPS.

Every smoother first validates its input; an invalid input is returned
unchanged with the input_invalid flag set, so an invalid path can never be
laundered into a "smoothed" result. Endpoints are never moved and outputs
are always collision-checked.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from .collision import ValidityChecker
from .geom import Pose, normalize_angle
from .metrics import curvature_stats
from .rng import make_rng
from .steer import (
    PathSample,
    SteerConfig,
    SteeredPath,
    concatenate_paths,
)

_SHORTCUT_STREAM = 0x5C07


@dataclass(frozen=True)
class SmootherParams:
    """Defaults are desk-scale values for 1 m grid cells; scale grips_eta and
    grips_min_node_spacing with the cell size for other worlds."""

    shortcut_rounds: int = 200
    bspline_rounds: int = 5
    grips_eta: float = 0.25
    grips_gradient_eps: Optional[float] = None  # None -> checker resolution
    grips_descent_rounds: int = 5
    grips_min_node_spacing: float = 2.0
    rng_seed: int = 0
    time_budget: float = 10.0

    def __post_init__(self):
        if min(self.shortcut_rounds, self.bspline_rounds, self.grips_descent_rounds) < 0:
            raise ValueError("round counts must be non-negative")
        if self.grips_eta <= 0 or self.grips_min_node_spacing <= 0:
            raise ValueError("grips step and spacing must be positive")
        if self.time_budget <= 0:
            raise ValueError("time_budget must be positive")


@dataclass
class SmoothResult:
    path: SteeredPath
    time: float
    length_before: float
    length_after: float
    max_curvature_before: float
    max_curvature_after: float
    input_invalid: bool = False


def _result(path_in, path_out, t0, invalid=False) -> SmoothResult:
    return SmoothResult(
        path=path_out,
        time=time.monotonic() - t0,
        length_before=path_in.length,
        length_after=path_out.length,
        max_curvature_before=curvature_stats(path_in).max,
        max_curvature_after=curvature_stats(path_out).max,
        input_invalid=invalid,
    )


def _shortcut_pass(
    path: SteeredPath,
    checker: ValidityChecker,
    steer_fn,
    cfg: SteerConfig,
    rounds: int,
    rng,
    stop_at: float,
) -> SteeredPath:
    res = cfg.sample_resolution
    for _ in range(rounds):
        if time.monotonic() >= stop_at or path.length <= 4 * res:
            break
        s1, s2 = sorted(rng.uniform(0.0, path.length, 2))
        if s2 - s1 < 2 * res:
            continue
        a = path.pose_at(s1).pose
        b = path.pose_at(s2).pose
        try:
            bridge = steer_fn(a, b, cfg)
        except Exception:
            continue
        if bridge.length >= (s2 - s1) - 1e-9:
            continue
        if not checker.is_path_valid(bridge):
            continue
        head = path.truncated(s1, res)
        tail = path.suffix_from(s2, res)
        parts = [p for p in (head, bridge, tail) if p.length > 1e-12]
        if not parts:
            continue
        candidate = concatenate_paths(parts)
        # splitting re-phases the cut segments' check points, so the
        # assembled candidate is validated as a whole before acceptance
        if checker.is_path_valid(candidate):
            path = candidate
    return path


def shortcut(
    path: SteeredPath,
    checker: ValidityChecker,
    steer_fn,
    cfg: SteerConfig,
    params: SmootherParams,
) -> SmoothResult:
    """Random two-point shortcutting; a replacement is kept only when the
    bridging steer path is valid and strictly shorter."""
    t0 = time.monotonic()
    if not checker.is_path_valid(path):
        return _result(path, path, t0, invalid=True)
    rng = make_rng(params.rng_seed, _SHORTCUT_STREAM)
    out = _shortcut_pass(
        path, checker, steer_fn, cfg, params.shortcut_rounds, rng, t0 + params.time_budget
    )
    if not checker.is_path_valid(out):
        out = path
    return _result(path, out, t0)


# -- B-spline -----------------------------------------------------------


def _polyline_vertices(path: SteeredPath, max_vertices: int = 400) -> List[PathSample]:
    """Segment-boundary samples (analytic) or stored samples (integrated),
    decimated to a bounded count; direction-change samples are always kept."""
    if not path.is_analytic:
        samples = path.samples
        if len(samples) <= max_vertices:
            return list(samples)
        stride = math.ceil(len(samples) / max_vertices)
        kept = [
            s
            for i, s in enumerate(samples)
            if i % stride == 0
            or i == len(samples) - 1
            or (i > 0 and s.direction != samples[i - 1].direction)
        ]
        return kept
    vertices = [path.pose_at(0.0)]
    acc = 0.0
    for seg in path.segments:
        acc += abs(seg.signed_length)
        vertices.append(path.pose_at(acc))
    if len(vertices) > max_vertices:
        stride = math.ceil(len(vertices) / max_vertices)
        vertices = vertices[:1] + vertices[1:-1:stride] + vertices[-1:]
    return vertices


def _chord_valid(checker: ValidityChecker, a, b, direction: int) -> bool:
    ax, ay = a
    bx, by = b
    dist = math.hypot(bx - ax, by - ay)
    heading = math.atan2(by - ay, bx - ax)
    if direction < 0:
        heading = normalize_angle(heading + math.pi)
    n = max(1, math.ceil(dist / checker.check_resolution))
    for i in range(n + 1):
        t = i / n
        if not checker.is_state_valid(Pose(ax + t * (bx - ax), ay + t * (by - ay), heading)):
            return False
    return True


def _polyline_to_path(
    vertices: Sequence[Tuple[float, float]],
    directions: Sequence[int],
    start: Pose,
    end: Pose,
) -> SteeredPath:
    """Fold a polyline back into an integrated path; interior headings follow
    the local travel direction, endpoints keep their exact input poses."""
    samples = [PathSample(start, 0.0, directions[0], 0.0)]
    arc = 0.0
    for i in range(1, len(vertices)):
        px, py = vertices[i - 1]
        x, y = vertices[i]
        step = math.hypot(x - px, y - py)
        if step <= 1e-12 and i < len(vertices) - 1:
            continue
        arc += step
        if i == len(vertices) - 1:
            pose = end
        else:
            nx, ny = vertices[i + 1]
            heading = math.atan2(ny - py, nx - px)
            if directions[i] < 0:
                heading = normalize_angle(heading + math.pi)
            pose = Pose(x, y, heading)
        samples.append(PathSample(pose, arc, directions[i], 0.0))
    return SteeredPath.from_integrated(samples)


def bspline_smooth(
    path: SteeredPath,
    checker: ValidityChecker,
    params: SmootherParams,
) -> SmoothResult:
    """Corner-cutting subdivision: midpoint insertion plus vertex relaxation,
    each move accepted only if the two adjacent chords stay valid. Cusp
    vertices and endpoints are pinned."""
    t0 = time.monotonic()
    if not checker.is_path_valid(path):
        return _result(path, path, t0, invalid=True)
    vertices_s = _polyline_vertices(path)
    if len(vertices_s) < 3:
        return _result(path, path, t0)
    pts = [(s.pose.x, s.pose.y) for s in vertices_s]
    dirs = [s.direction for s in vertices_s]
    stop_at = t0 + params.time_budget

    for _ in range(params.bspline_rounds):
        if time.monotonic() >= stop_at:
            break
        if len(pts) * 2 <= 1024:  # midpoint insertion, capped
            new_pts = [pts[0]]
            new_dirs = [dirs[0]]
            for i in range(1, len(pts)):
                mx = 0.5 * (pts[i - 1][0] + pts[i][0])
                my = 0.5 * (pts[i - 1][1] + pts[i][1])
                new_pts.append((mx, my))
                new_dirs.append(dirs[i])
                new_pts.append(pts[i])
                new_dirs.append(dirs[i])
            pts, dirs = new_pts, new_dirs
        # vertex relaxation toward the neighbor average
        for i in range(1, len(pts) - 1):
            if dirs[i] != dirs[i + 1]:  # cusp vertex stays put
                continue
            px, py = pts[i - 1]
            nx, ny = pts[i + 1]
            cand = (0.5 * pts[i][0] + 0.25 * (px + nx), 0.5 * pts[i][1] + 0.25 * (py + ny))
            if _chord_valid(checker, pts[i - 1], cand, dirs[i]) and _chord_valid(
                checker, cand, pts[i + 1], dirs[i + 1]
            ):
                pts[i] = cand

    out = _polyline_to_path(pts, dirs, path.samples[0].pose, path.end_pose)
    if not checker.is_path_valid(out):
        return _result(path, path, t0)
    return _result(path, out, t0)


# -- vertex reduction + SimplifyMax --------------------------------------


def _decimated_indices(samples: Sequence[PathSample], max_vertices: int) -> List[int]:
    if len(samples) <= max_vertices:
        return list(range(len(samples)))
    stride = math.ceil(len(samples) / max_vertices)
    idx = [
        i
        for i, s in enumerate(samples)
        if i % stride == 0
        or i == len(samples) - 1
        or (i > 0 and s.direction != samples[i - 1].direction)
    ]
    if idx[-1] != len(samples) - 1:
        idx.append(len(samples) - 1)
    return idx


def _vertex_reduce(
    path: SteeredPath,
    checker: ValidityChecker,
    steer_fn,
    cfg: SteerConfig,
    stop_at: float,
) -> SteeredPath:
    """Drop any interior vertex whose neighbors connect directly with a valid
    steer path that is not longer than the portion it replaces."""
    if path.is_analytic:
        vertices = _polyline_vertices(path)
        if len(vertices) < 3:
            return path
        arcs = [v.arc_length for v in vertices]
        edges: List[SteeredPath] = [
            path.portion(a, b, cfg.sample_resolution) for a, b in zip(arcs, arcs[1:])
        ]
        # portions re-phase split segments; bail out on the rare tangential flip
        if any(not checker.is_path_valid(e) for e in edges):
            return path
    else:
        samples = path.samples
        idx = _decimated_indices(samples, 400)
        if len(idx) < 3:
            return path
        vertices = [samples[i] for i in idx]
        edges = []
        for i0, i1 in zip(idx, idx[1:]):
            base = samples[i0].arc_length
            chunk = [
                PathSample(s.pose, s.arc_length - base, s.direction, s.curvature)
                for s in samples[i0 : i1 + 1]
            ]
            edges.append(SteeredPath.from_integrated(chunk))
    poses = [v.pose for v in vertices]
    i = 1
    while i < len(poses) - 1 and time.monotonic() < stop_at:
        try:
            bridge = steer_fn(poses[i - 1], poses[i + 1], cfg)
        except Exception:
            i += 1
            continue
        replaced = edges[i - 1].length + edges[i].length
        if bridge.length <= replaced + 1e-9 and checker.is_path_valid(bridge):
            poses.pop(i)
            edges[i - 1 : i + 1] = [bridge]
        else:
            i += 1
    return concatenate_paths(edges) if edges else path


def simplify_max(
    path: SteeredPath,
    checker: ValidityChecker,
    steer_fn,
    cfg: SteerConfig,
    params: SmootherParams,
) -> SmoothResult:
    """Composite pipeline: vertex reduction, shortcutting, then spline
    relaxation, repeated until the round improves length by less than 0.1%."""
    t0 = time.monotonic()
    if not checker.is_path_valid(path):
        return _result(path, path, t0, invalid=True)
    rng = make_rng(params.rng_seed, _SHORTCUT_STREAM)
    stop_at = t0 + params.time_budget
    out = path
    while time.monotonic() < stop_at:
        before = out.length
        candidate = _vertex_reduce(out, checker, steer_fn, cfg, stop_at)
        candidate = _shortcut_pass(
            candidate, checker, steer_fn, cfg, params.shortcut_rounds, rng, stop_at
        )
        spline = bspline_smooth(candidate, checker, params)
        if spline.length_after <= candidate.length + 1e-9:
            candidate = spline.path
        if not checker.is_path_valid(candidate):
            break  # keep the last round's verified result
        out = candidate
        if before - out.length < 1e-3 * before:
            break
    return _result(path, out, t0)


# -- GRIPS ----------------------------------------------------------------


def _clearance_gradient(checker: ValidityChecker, x: float, y: float, eps: float):
    x0, y0, x1, y1 = checker.env.bounds

    def cl(px, py):
        px = min(max(px, x0), x1)
        py = min(max(py, y0), y1)
        return checker.clearance((px, py))

    gx = (cl(x + eps, y) - cl(x - eps, y)) / (2 * eps)
    gy = (cl(x, y + eps) - cl(x, y - eps)) / (2 * eps)
    return gx, gy


def _grips_resample(path: SteeredPath, spacing: float, res: float):
    """Stage 1: a vertex chain at most `spacing` apart; edges keep the input
    geometry, so the chain starts out valid whenever the input is."""
    n = max(1, math.ceil(path.length / spacing))
    arcs = [path.length * i / n for i in range(n + 1)]
    poses = [path.pose_at(s).pose for s in arcs]
    edges = [path.portion(a, b, res) for a, b in zip(arcs, arcs[1:])]
    return poses, edges


def _grips_ascent(poses, edges, checker, steer_fn, cfg, params, stop_at):
    """Stage 2: move interior vertices up the clearance gradient (central
    finite differences); a move is kept only when both adjacent steer paths
    remain collision-free. Endpoints never move."""
    eps = params.grips_gradient_eps or checker.check_resolution
    for _ in range(params.grips_descent_rounds):
        if time.monotonic() >= stop_at:
            break
        for i in range(1, len(poses) - 1):
            gx, gy = _clearance_gradient(checker, poses[i].x, poses[i].y, eps)
            norm = math.hypot(gx, gy)
            if norm < 1e-12:
                continue
            cand = Pose(
                poses[i].x + params.grips_eta * gx / norm,
                poses[i].y + params.grips_eta * gy / norm,
                poses[i].theta,
            )
            if not checker.env.in_bounds(cand.x, cand.y):
                continue
            try:
                e_in = steer_fn(poses[i - 1], cand, cfg)
                e_out = steer_fn(cand, poses[i + 1], cfg)
            except Exception:
                continue
            if checker.is_path_valid(e_in) and checker.is_path_valid(e_out):
                poses[i] = cand
                edges[i - 1] = e_in
                edges[i] = e_out


def _grips_prune(poses, edges, checker, steer_fn, cfg, stop_at):
    """Stage 3: greedily drop vertices whose neighbors bridge with a valid
    steer path that is not longer than the pair of edges it replaces."""
    i = 1
    while i < len(poses) - 1 and time.monotonic() < stop_at:
        try:
            bridge = steer_fn(poses[i - 1], poses[i + 1], cfg)
        except Exception:
            i += 1
            continue
        replaced = edges[i - 1].length + edges[i].length
        if bridge.length <= replaced + 1e-9 and checker.is_path_valid(bridge):
            poses.pop(i)
            edges[i - 1 : i + 1] = [bridge]
        else:
            i += 1


def grips(
    path: SteeredPath,
    checker: ValidityChecker,
    steer_fn,
    cfg: SteerConfig,
    params: SmootherParams,
) -> SmoothResult:
    """Gradient-informed smoothing: resample, push interior vertices up the
    clearance gradient (moves kept only when both adjacent steer paths stay
    valid), greedily prune vertices, then a final shortcut pass."""
    t0 = time.monotonic()
    if not checker.is_path_valid(path):
        return _result(path, path, t0, invalid=True)
    stop_at = t0 + params.time_budget

    poses, edges = _grips_resample(
        path, params.grips_min_node_spacing, cfg.sample_resolution
    )
    if all(checker.is_path_valid(e) for e in edges):
        _grips_ascent(poses, edges, checker, steer_fn, cfg, params, stop_at)
        _grips_prune(poses, edges, checker, steer_fn, cfg, stop_at)
        out = concatenate_paths(edges)
    else:
        out = path  # re-phased split flagged a tangential hit: skip to shortcut

    rng = make_rng(params.rng_seed, _SHORTCUT_STREAM)
    out = _shortcut_pass(out, checker, steer_fn, cfg, params.shortcut_rounds, rng, stop_at)
    if not checker.is_path_valid(out):
        return _result(path, path, t0)
    return _result(path, out, t0)


SmootherFn = Callable[
    [SteeredPath, ValidityChecker, object, SteerConfig, SmootherParams], SmoothResult
]

SMOOTHERS = {
    "shortcut": shortcut,
    "bspline": lambda path, checker, steer_fn, cfg, params: bspline_smooth(
        path, checker, params
    ),
    "simplify-max": simplify_max,
    "grips": grips,
}


def get_smoother(name: str):
    try:
        return SMOOTHERS[name]
    except KeyError:
        raise KeyError(f"unknown smoother {name!r}; known: {sorted(SMOOTHERS)}") from None
