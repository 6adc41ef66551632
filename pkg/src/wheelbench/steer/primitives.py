"""Constant-control motion primitives for lattice planners.

Each primitive is a (Control, duration) pair forward-propagated in closed
form: a straight segment when omega = 0, otherwise a circular arc of
curvature omega / v.
"""

from __future__ import annotations

import math
from typing import List, Sequence, Tuple

from ..geom import Pose
from .config import Control, SteerConfig
from .path import SegmentDescriptor, SegmentKind, SteeredPath

Primitive = Tuple[Control, float]


def expand_primitives(
    from_pose: Pose,
    primitives: Sequence[Primitive],
    resolution: float = 0.1,
) -> List[SteeredPath]:
    """One exact closed-form path per (constant control, duration) pair."""
    if not primitives:
        raise ValueError("primitive set must be non-empty")
    paths = []
    for control, duration in primitives:
        if duration <= 0:
            raise ValueError("primitive duration must be positive")
        signed_length = control.v * duration
        if control.omega == 0.0:
            seg = SegmentDescriptor(SegmentKind.STRAIGHT, signed_length, 0.0)
        else:
            kappa = control.omega / control.v
            kind = SegmentKind.LEFT_ARC if kappa > 0 else SegmentKind.RIGHT_ARC
            seg = SegmentDescriptor(kind, signed_length, kappa)
        paths.append(SteeredPath.from_segments(from_pose, [seg], resolution))
    return paths


def default_primitive_set(cfg: SteerConfig, cell_size: float = 1.0) -> List[Primitive]:
    """Unicycle primitives {v = +-v_max} x {omega in 0, +-wm/2, +-wm}.

    The shared duration is tuned so every primitive advances at least one
    cell and the strongest turn sweeps an eighth of a turn, which keeps
    endpoint headings near lattice bin centers.
    """
    turn_rate = cfg.v_max / cfg.turning_radius
    duration = max(1.2 * cell_size / cfg.v_max, (math.pi / 4.0) / turn_rate)
    omegas = [0.0, 0.5 * turn_rate, -0.5 * turn_rate, turn_rate, -turn_rate]
    prims: List[Primitive] = []
    for v in (cfg.v_max, -cfg.v_max):
        for omega in omegas:
            prims.append((Control(v, omega), duration))
    return prims
