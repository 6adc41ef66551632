"""Environment representations, MovingAI file I/O, and procedural generators.

Grid cells map to metric space as cell (col, row) -> center
((col + 0.5) * cell_size, (row + 0.5) * cell_size) with row 0 the first map
row. Both generators are pure functions of their seed and parameters.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .geom import ConvexPolygon, Pose
from .rng import make_rng

OCCUPIED_CHARS = frozenset("@OT")
FREE_CHARS = frozenset(".GSW")


class MapFormatError(ValueError):
    """Raised for malformed MovingAI map or scenario files."""


class GridEnv:
    """Occupancy-grid world; immutable after construction."""

    __slots__ = ("width", "height", "cell_size", "occupancy")

    def __init__(self, width: int, height: int, occupancy, cell_size: float = 1.0):
        if width < 1 or height < 1:
            raise ValueError("grid must be at least 1x1")
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        occ = np.asarray(occupancy, dtype=bool)
        if occ.shape != (height, width):
            occ = occ.reshape(height, width)
        occ.setflags(write=False)
        self.width = width
        self.height = height
        self.cell_size = cell_size
        self.occupancy = occ

    def __repr__(self):
        return f"GridEnv({self.width}x{self.height}, cell={self.cell_size})"

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return (0.0, 0.0, self.width * self.cell_size, self.height * self.cell_size)

    def cell_center(self, col: int, row: int) -> Tuple[float, float]:
        return ((col + 0.5) * self.cell_size, (row + 0.5) * self.cell_size)

    def cell_of(self, x: float, y: float) -> Tuple[int, int]:
        return (int(x // self.cell_size), int(y // self.cell_size))

    def in_bounds(self, x: float, y: float) -> bool:
        x0, y0, x1, y1 = self.bounds
        return x0 <= x <= x1 and y0 <= y <= y1

    def is_cell_occupied(self, col: int, row: int) -> bool:
        if not (0 <= col < self.width and 0 <= row < self.height):
            return True
        return bool(self.occupancy[row, col])

    def occupied_count(self) -> int:
        return int(self.occupancy.sum())

    def to_text(self) -> str:
        """Serialize as a MovingAI .map document."""
        rows = [
            "".join("@" if self.occupancy[r, c] else "." for c in range(self.width))
            for r in range(self.height)
        ]
        header = f"type octile\nheight {self.height}\nwidth {self.width}\nmap\n"
        return header + "\n".join(rows) + "\n"

    def to_json(
        self,
        start: Optional[Pose] = None,
        goal: Optional[Pose] = None,
        seed: Optional[int] = None,
        params: Optional[dict] = None,
    ) -> str:
        occupied = np.flatnonzero(self.occupancy.ravel())
        doc = {
            "width": self.width,
            "height": self.height,
            "cell_size": self.cell_size,
            "occupied": [int(i) for i in occupied],
            "start": [start.x, start.y, start.theta] if start else None,
            "goal": [goal.x, goal.y, goal.theta] if goal else None,
            "seed": seed,
            "params": params or {},
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> Tuple["GridEnv", Optional[Pose], Optional[Pose]]:
        doc = json.loads(text)
        occ = np.zeros(doc["height"] * doc["width"], dtype=bool)
        occ[np.asarray(doc["occupied"], dtype=int)] = True
        env = cls(doc["width"], doc["height"], occ, doc.get("cell_size", 1.0))
        start = Pose(*doc["start"]) if doc.get("start") else None
        goal = Pose(*doc["goal"]) if doc.get("goal") else None
        return env, start, goal


class PolygonEnv:
    """World bounded by an axis-aligned rectangle with convex obstacles."""

    __slots__ = ("bounds", "obstacles")

    def __init__(
        self,
        bounds: Tuple[float, float, float, float],
        obstacles: Sequence[ConvexPolygon] = (),
    ):
        x0, y0, x1, y1 = bounds
        if not (x1 > x0 and y1 > y0):
            raise ValueError("bounds must satisfy xmax > xmin, ymax > ymin")
        for obs in obstacles:
            bx0, by0, bx1, by1 = obs.bounding_box()
            if bx0 < x0 or by0 < y0 or bx1 > x1 or by1 > y1:
                raise ValueError("obstacle extends outside the environment bounds")
        self.bounds = (float(x0), float(y0), float(x1), float(y1))
        self.obstacles: Tuple[ConvexPolygon, ...] = tuple(obstacles)

    def __repr__(self):
        return f"PolygonEnv(bounds={self.bounds}, obstacles={len(self.obstacles)})"

    def in_bounds(self, x: float, y: float) -> bool:
        x0, y0, x1, y1 = self.bounds
        return x0 <= x <= x1 and y0 <= y <= y1


Environment = Union[GridEnv, PolygonEnv]


@dataclass(frozen=True)
class Scenario:
    """One planning query: an environment plus start and goal poses."""

    name: str
    env: Environment
    start: Pose
    goal: Pose
    optimal_2d_length: Optional[float] = None


def parse_movingai_map(text: str, cell_size: float = 1.0) -> GridEnv:
    """Parse a MovingAI .map document into a GridEnv."""
    lines = text.splitlines()
    header: Dict[str, str] = {}
    body_start = None
    for i, line in enumerate(lines):
        token = line.strip()
        if token.lower() == "map":
            body_start = i + 1
            break
        if token:
            parts = token.split(None, 1)
            header[parts[0].lower()] = parts[1] if len(parts) > 1 else ""
    if body_start is None:
        raise MapFormatError("missing 'map' marker line")
    try:
        height = int(header["height"])
        width = int(header["width"])
    except (KeyError, ValueError) as exc:
        raise MapFormatError(f"missing or malformed height/width header: {exc}") from None
    if height < 1 or width < 1:
        raise MapFormatError("height and width must be positive")

    rows = [line for line in lines[body_start:] if line.strip()]
    if len(rows) != height:
        raise MapFormatError(
            f"map body has {len(rows)} rows, header says height {height}"
        )
    occ = np.zeros((height, width), dtype=bool)
    for r, row in enumerate(rows):
        row = row.rstrip("\r")
        if len(row) != width:
            raise MapFormatError(
                f"row {r} has {len(row)} cells, header says width {width}"
            )
        for c, ch in enumerate(row):
            if ch in OCCUPIED_CHARS:
                occ[r, c] = True
            elif ch not in FREE_CHARS:
                raise MapFormatError(f"unknown cell character {ch!r} at row {r}")
    return GridEnv(width, height, occ, cell_size)


def parse_movingai_scen(text: str, env: GridEnv) -> List[Scenario]:
    """Parse a MovingAI .scen document against an already-loaded map.

    Start and goal cells become cell-center poses with heading 0; the
    recorded optimal 2D length is kept for difficulty ranking.
    """
    lines = text.splitlines()
    out: List[Scenario] = []
    body = lines[1:] if lines and lines[0].lower().startswith("version") else lines
    offset = len(lines) - len(body)
    for i, line in enumerate(body):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) < 9:
            raise MapFormatError(
                f"scen line {i + offset + 1}: expected 9 fields, got {len(parts)}"
            )
        try:
            sx, sy, gx, gy = (int(v) for v in parts[4:8])
            opt = float(parts[8])
        except ValueError as exc:
            raise MapFormatError(f"scen line {i + offset + 1}: {exc}") from None
        name = f"{parts[1]}#{len(out)}"
        start = Pose(*env.cell_center(sx, sy), 0.0)
        goal = Pose(*env.cell_center(gx, gy), 0.0)
        out.append(Scenario(name, env, start, goal, optimal_2d_length=opt))
    return out


def select_hardest(scens: Sequence[Scenario], n: int) -> List[Scenario]:
    """The n scenarios with the largest optimal 2D length, in file order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if len(scens) <= n:
        return list(scens)
    ranked = sorted(
        range(len(scens)),
        key=lambda i: (-(scens[i].optimal_2d_length or 0.0), i),
    )
    chosen = sorted(ranked[:n])
    return [scens[i] for i in chosen]


def assign_headings(scens: Sequence[Scenario], mode: str = "zero") -> List[Scenario]:
    """Re-derive start/goal headings for 2D scenario files.

    mode 'zero' keeps heading 0; 'face-goal' points both poses along the
    start-to-goal direction.
    """
    if mode == "zero":
        return list(scens)
    if mode != "face-goal":
        raise ValueError(f"unknown heading mode {mode!r}")
    out = []
    for sc in scens:
        heading = math.atan2(sc.goal.y - sc.start.y, sc.goal.x - sc.start.x)
        out.append(
            Scenario(
                sc.name,
                sc.env,
                Pose(sc.start.x, sc.start.y, heading),
                Pose(sc.goal.x, sc.goal.y, heading),
                sc.optimal_2d_length,
            )
        )
    return out


def gen_corridor_env(
    seed: int,
    width: int,
    height: int,
    corridor_radius: int,
    iterations: int = 30,
    cell_size: float = 1.0,
) -> Tuple[GridEnv, Pose, Pose]:
    """Carve an indoor-like corridor maze out of a fully occupied grid.

    A tree is grown by repeatedly sampling a cell and connecting the nearest
    tree node to it with a single axis-aligned corridor of half-width
    corridor_radius (axis picked by the seeded RNG). After the final
    iteration the start/goal are the tree node pair furthest apart along
    tree edges, with headings aligned to their incident corridor axes.
    """
    if corridor_radius < 1:
        raise ValueError("corridor_radius must be at least 1")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if width <= 2 * corridor_radius + 1 or height <= 2 * corridor_radius + 1:
        raise ValueError("grid too small for the requested corridor radius")

    rng = make_rng(seed, 0xC0881D08)
    occ = np.ones((height, width), dtype=bool)
    margin = corridor_radius
    nodes: List[Tuple[int, int]] = []
    edges: List[Tuple[int, int, float]] = []  # (node index a, node index b, length)

    def carve(c0: int, r0: int, c1: int, r1: int):
        lo_c, hi_c = sorted((c0, c1))
        lo_r, hi_r = sorted((r0, r1))
        occ[
            max(0, lo_r - corridor_radius) : min(height, hi_r + corridor_radius + 1),
            max(0, lo_c - corridor_radius) : min(width, hi_c + corridor_radius + 1),
        ] = False

    anchor = (
        int(rng.integers(margin, width - margin)),
        int(rng.integers(margin, height - margin)),
    )
    nodes.append(anchor)
    carve(anchor[0], anchor[1], anchor[0], anchor[1])

    for _ in range(iterations):
        sample = (
            int(rng.integers(margin, width - margin)),
            int(rng.integers(margin, height - margin)),
        )
        nearest_idx = min(
            range(len(nodes)),
            key=lambda i: (nodes[i][0] - sample[0]) ** 2 + (nodes[i][1] - sample[1]) ** 2,
        )
        nc, nr = nodes[nearest_idx]
        horizontal = bool(rng.integers(0, 2))
        if horizontal:
            new = (sample[0], nr)
        else:
            new = (nc, sample[1])
        carve(nc, nr, new[0], new[1])
        length = float(abs(new[0] - nc) + abs(new[1] - nr)) * cell_size
        nodes.append(new)
        edges.append((nearest_idx, len(nodes) - 1, length))

    adjacency: List[List[Tuple[int, float]]] = [[] for _ in nodes]
    for a, b, length in edges:
        adjacency[a].append((b, length))
        adjacency[b].append((a, length))

    def farthest_from(src: int) -> Tuple[int, Dict[int, float], Dict[int, int]]:
        dist = {src: 0.0}
        parent = {src: src}
        stack = [src]
        while stack:
            u = stack.pop()
            for v, w in adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + w
                    parent[v] = u
                    stack.append(v)
        far = max(dist, key=lambda k: (dist[k], -k))
        return far, dist, parent

    a, _, _ = farthest_from(0)
    b, _, parent = farthest_from(a)

    # walk the tree path b -> a to orient the endpoint headings
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])

    def leg_heading(frm: Tuple[int, int], to: Tuple[int, int]) -> float:
        return math.atan2(to[1] - frm[1], to[0] - frm[0])

    start_cell, goal_cell = nodes[path[-1]], nodes[path[0]]
    if len(path) >= 2:
        start_heading = leg_heading(nodes[path[-1]], nodes[path[-2]])
        goal_heading = leg_heading(nodes[path[1]], nodes[path[0]])
    else:
        start_heading = goal_heading = 0.0

    env = GridEnv(width, height, occ, cell_size)
    start = Pose(*env.cell_center(*start_cell), start_heading)
    goal = Pose(*env.cell_center(*goal_cell), goal_heading)
    return env, start, goal


def gen_density_env(
    seed: int,
    width: int,
    height: int,
    density: float,
    cell_size: float = 1.0,
) -> GridEnv:
    """Uniformly occupy round(density * cells) distinct cells."""
    if not 0.0 <= density < 1.0:
        raise ValueError("density must be in [0, 1)")
    total = width * height
    k = round(density * total)
    occ = np.zeros(total, dtype=bool)
    if k:
        rng = make_rng(seed, 0xDE4517)
        occ[rng.choice(total, size=k, replace=False)] = True
    return GridEnv(width, height, occ.reshape(height, width), cell_size)


def nearest_free_cell(env: GridEnv, col: int, row: int) -> Tuple[int, int]:
    """The free cell closest to (col, row); used to place queries on
    randomly occupied grids."""
    if not env.is_cell_occupied(col, row):
        return col, row
    free = np.argwhere(~env.occupancy)
    if free.size == 0:
        raise ValueError("environment has no free cell")
    d = (free[:, 1] - col) ** 2 + (free[:, 0] - row) ** 2
    r, c = free[int(np.argmin(d))]
    return int(c), int(r)


def load_polygon_env(text: str, strict_orientation: bool = False) -> Tuple[
    PolygonEnv, List[Scenario]
]:
    """Load a polygon environment document (see README for the schema).

    Obstacles given clockwise are reversed unless strict_orientation is set,
    in which case they are rejected.
    """
    doc = json.loads(text)
    try:
        bounds = tuple(float(v) for v in doc["bounds"])
        raw_obstacles = doc["obstacles"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed polygon environment document: {exc}") from None
    if len(bounds) != 4:
        raise ValueError("bounds must be [xmin, ymin, xmax, ymax]")

    obstacles = []
    for verts in raw_obstacles:
        pts = [(float(x), float(y)) for x, y in verts]
        try:
            obstacles.append(ConvexPolygon(pts))
        except ValueError:
            if strict_orientation:
                raise
            obstacles.append(ConvexPolygon(list(reversed(pts))))
    env = PolygonEnv(bounds, obstacles)

    scenarios = []
    base = doc.get("name", "polygon-env")
    for i, sc in enumerate(doc.get("scenarios", [])):
        scenarios.append(
            Scenario(
                sc.get("name", f"{base}#{i}"),
                env,
                Pose(*(float(v) for v in sc["start"])),
                Pose(*(float(v) for v in sc["goal"])),
            )
        )
    return env, scenarios


def dump_polygon_env(
    env: PolygonEnv, scenarios: Sequence[Scenario] = (), name: str = "polygon-env"
) -> str:
    doc = {
        "name": name,
        "bounds": list(env.bounds),
        "obstacles": [[list(v) for v in obs.vertices] for obs in env.obstacles],
        "scenarios": [
            {
                "name": sc.name,
                "start": [sc.start.x, sc.start.y, sc.start.theta],
                "goal": [sc.goal.x, sc.goal.y, sc.goal.theta],
            }
            for sc in scenarios
        ],
    }
    return json.dumps(doc, indent=2)


BUNDLED_SCENES = ("parking1", "parking2", "parking3", "warehouse")


def load_bundled_scene(name: str) -> Tuple[PolygonEnv, List[Scenario]]:
    """Load one of the shipped polygon scenes by name."""
    if name not in BUNDLED_SCENES:
        raise KeyError(f"unknown scene {name!r}; bundled: {BUNDLED_SCENES}")
    text = resources.files("wheelbench.data").joinpath(f"{name}.json").read_text()
    return load_polygon_env(text)
