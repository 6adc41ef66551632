"""wheelbench: a motion-planning benchmark for nonholonomic wheeled robots."""

__version__ = "0.1.0"

from .geom import (
    ConvexPolygon,
    Pose,
    Transform,
    normalize_angle,
    point_segment_distance,
    polygons_intersect,
    transform_polygon,
)
from .steer import (
    Control,
    SteerConfig,
    SteeredPath,
    dubins_steer,
    expand_primitives,
    get_steer_function,
    posq_steer,
    reeds_shepp_steer,
    sample_path,
)

__all__ = [
    "ConvexPolygon",
    "Control",
    "Pose",
    "SteerConfig",
    "SteeredPath",
    "Transform",
    "__version__",
    "dubins_steer",
    "expand_primitives",
    "get_steer_function",
    "normalize_angle",
    "point_segment_distance",
    "polygons_intersect",
    "posq_steer",
    "reeds_shepp_steer",
    "sample_path",
    "transform_polygon",
]
