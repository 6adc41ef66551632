"""Two-point boundary value solvers and path machinery."""

from typing import Callable, Dict, List

from ..geom import Pose
from .config import Control, SteerConfig
from .dubins import dubins_steer
from .path import (
    PathSample,
    SegmentDescriptor,
    SegmentKind,
    SteeredPath,
    advance_pose,
    concatenate_paths,
)
from .posq import NotConverged, posq_steer
from .primitives import Primitive, default_primitive_set, expand_primitives
from .reeds_shepp import reeds_shepp_distance, reeds_shepp_steer

SteerFunction = Callable[[Pose, Pose, SteerConfig], SteeredPath]

STEER_FUNCTIONS: Dict[str, SteerFunction] = {
    "dubins": dubins_steer,
    "reeds-shepp": reeds_shepp_steer,
    "posq": posq_steer,
}


def get_steer_function(name: str) -> SteerFunction:
    try:
        return STEER_FUNCTIONS[name]
    except KeyError:
        raise KeyError(
            f"unknown steer function {name!r}; known: {sorted(STEER_FUNCTIONS)}"
        ) from None


def sample_path(path: SteeredPath, resolution: float) -> List[PathSample]:
    """Samples spaced <= resolution in arc length, including both endpoints
    and all segment boundaries."""
    return path.resample(resolution)


__all__ = [
    "Control",
    "NotConverged",
    "PathSample",
    "Primitive",
    "STEER_FUNCTIONS",
    "SegmentDescriptor",
    "SegmentKind",
    "SteerConfig",
    "SteerFunction",
    "SteeredPath",
    "advance_pose",
    "concatenate_paths",
    "default_primitive_set",
    "dubins_steer",
    "expand_primitives",
    "get_steer_function",
    "posq_steer",
    "reeds_shepp_distance",
    "reeds_shepp_steer",
    "sample_path",
]
