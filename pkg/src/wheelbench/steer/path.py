"""Steered-path representation: segment descriptors and sampled SE(2) paths.

A path is a sequence of segments, each either analytic (straight line or
circular arc with signed length; sign = driving direction) or integrated
(a dense trajectory from numerical integration). Samples carry the pose,
the cumulative arc length, the driving direction, and the local curvature.

Analytic paths sample lazily: planners churn through thousands of candidate
paths per second and touch only endpoints and lengths for most of them.
Paths are owned by a single run and are not shared across threads while the
lazy sample cache is still cold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

from ..geom import Pose, normalize_angle


class SegmentKind(Enum):
    STRAIGHT = "straight"
    LEFT_ARC = "left_arc"
    RIGHT_ARC = "right_arc"
    INTEGRATED = "integrated"


@dataclass(frozen=True)
class SegmentDescriptor:
    """One path segment.

    signed_length: arc length in meters, sign = driving direction.
    curvature: 0 for straights, +1/r for left arcs, -1/r for right arcs;
        for integrated segments a representative value (0 if unknown).
    """

    kind: SegmentKind
    signed_length: float
    curvature: float = 0.0

    @property
    def direction(self) -> int:
        return -1 if self.signed_length < 0 else 1


class PathSample(NamedTuple):
    pose: Pose
    arc_length: float
    direction: int
    curvature: float = 0.0


def advance_pose(pose: Pose, kind: SegmentKind, s: float, curvature: float) -> Pose:
    """Exact pose after driving signed arc length s along an analytic segment."""
    if kind is SegmentKind.STRAIGHT or curvature == 0.0:
        return Pose(
            pose.x + s * math.cos(pose.theta),
            pose.y + s * math.sin(pose.theta),
            pose.theta,
        )
    theta1 = pose.theta + s * curvature
    x1 = pose.x + (math.sin(theta1) - math.sin(pose.theta)) / curvature
    y1 = pose.y - (math.cos(theta1) - math.cos(pose.theta)) / curvature
    return Pose(x1, y1, theta1)


class SteeredPath:
    """Geometric SE(2) path with direction-signed samples and arc length."""

    __slots__ = ("start", "segments", "length", "_samples", "_resolution", "_end", "_snap")

    def __init__(
        self,
        start: Pose,
        segments: Sequence[SegmentDescriptor],
        length: float,
        samples: Optional[List[PathSample]] = None,
        resolution: float = 0.1,
    ):
        self.start = start
        self.segments: Tuple[SegmentDescriptor, ...] = tuple(segments)
        self.length = length
        self._samples = samples
        self._resolution = resolution
        self._end: Optional[Pose] = samples[-1].pose if samples else None
        self._snap: Optional[Pose] = None

    def __repr__(self):
        return f"SteeredPath(len={self.length:.3f}, segments={len(self.segments)})"

    @property
    def samples(self) -> List[PathSample]:
        if self._samples is None:
            self._samples = self._materialize(self._resolution)
        return self._samples

    @property
    def end_pose(self) -> Pose:
        if self._snap is not None:
            return self._snap
        if self._end is None:
            pose = self.start
            for seg in self.segments:
                pose = advance_pose(pose, seg.kind, seg.signed_length, seg.curvature)
            self._end = pose
        return self._end

    @property
    def is_analytic(self) -> bool:
        return all(s.kind is not SegmentKind.INTEGRATED for s in self.segments)

    @classmethod
    def from_segments(
        cls,
        start: Pose,
        segments: Sequence[SegmentDescriptor],
        resolution: float,
        min_length: float = 1e-12,
    ) -> "SteeredPath":
        """Build a lazily-sampled path of analytic segments."""
        kept = [s for s in segments if abs(s.signed_length) > min_length]
        length = sum(abs(s.signed_length) for s in kept)
        return cls(start, kept, length, samples=None, resolution=resolution)

    @classmethod
    def from_integrated(
        cls,
        samples: Sequence[PathSample],
        curvature_hint: float = 0.0,
    ) -> "SteeredPath":
        """Wrap an integrated trajectory (one INTEGRATED segment per direction run)."""
        samples = list(samples)
        if not samples:
            raise ValueError("integrated path needs at least one sample")
        segments = []
        run_start = 0
        for i in range(1, len(samples) + 1):
            if i == len(samples) or samples[i].direction != samples[run_start].direction:
                run_len = samples[i - 1].arc_length - samples[run_start].arc_length
                if run_len > 0 or len(samples) == 1:
                    segments.append(
                        SegmentDescriptor(
                            SegmentKind.INTEGRATED,
                            samples[run_start].direction * run_len,
                            curvature_hint,
                        )
                    )
                run_start = i
        return cls(samples[0].pose, segments, samples[-1].arc_length, samples=samples)

    def snap_end_to(self, goal: Pose, tol: float = 1e-6) -> None:
        """Overwrite the endpoint with the exact goal pose.

        The pre-snap error must already be below tol; snapping only removes
        floating-point residue so downstream exactness checks are bit-stable.
        Zero-length paths are left alone (their single sample is the start).
        """
        end = self.end_pose
        err = end.distance_to(goal) + abs(normalize_angle(goal.theta - end.theta))
        if err > tol:
            raise AssertionError(f"endpoint error {err:.3g} exceeds snap tolerance")
        if self.length <= 0.0:
            return
        self._snap = goal
        if self._samples is not None and len(self._samples) > 1:
            self._samples[-1] = self._samples[-1]._replace(pose=goal)

    def _materialize(self, resolution: float) -> List[PathSample]:
        samples = _sample_analytic(self.start, self.segments, resolution)
        if self._snap is not None and len(samples) > 1:
            samples[-1] = samples[-1]._replace(pose=self._snap)
        return samples

    def resample(self, resolution: float) -> List[PathSample]:
        """Samples spaced <= resolution in arc length, keeping endpoints and
        segment boundaries; poses exact on analytic segments."""
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        if self.is_analytic:
            return self._materialize(resolution)
        return _resample_polyline(self.samples, resolution)

    def pose_at(self, s: float) -> PathSample:
        """Sample at arc length s (clamped to [0, length])."""
        s = min(max(s, 0.0), self.length)
        if self.is_analytic:
            pose = self.start
            acc = 0.0
            for seg in self.segments:
                seg_len = abs(seg.signed_length)
                if s <= acc + seg_len or seg is self.segments[-1]:
                    local = min(s - acc, seg_len)
                    p = advance_pose(
                        pose, seg.kind, math.copysign(local, seg.signed_length), seg.curvature
                    )
                    return PathSample(p, s, seg.direction, seg.curvature)
                pose = advance_pose(pose, seg.kind, seg.signed_length, seg.curvature)
                acc += seg_len
            return PathSample(pose, s, 1, 0.0)
        return _interp_sample(self.samples, s)

    def truncated(self, s: float, resolution: float) -> "SteeredPath":
        """The initial portion of the path up to arc length s."""
        s = min(max(s, 0.0), self.length)
        if self.is_analytic:
            kept: List[SegmentDescriptor] = []
            acc = 0.0
            for seg in self.segments:
                seg_len = abs(seg.signed_length)
                if acc + seg_len <= s:
                    kept.append(seg)
                    acc += seg_len
                else:
                    remain = s - acc
                    if remain > 1e-12:
                        kept.append(
                            SegmentDescriptor(
                                seg.kind,
                                math.copysign(remain, seg.signed_length),
                                seg.curvature,
                            )
                        )
                    break
            return SteeredPath.from_segments(self.start, kept, resolution)
        cut = [smp for smp in self.samples if smp.arc_length <= s]
        if not cut or cut[-1].arc_length < s - 1e-12:
            cut.append(_interp_sample(self.samples, s))
        return SteeredPath.from_integrated(cut)

    def suffix_from(self, s: float, resolution: float) -> "SteeredPath":
        """The remaining portion of the path from arc length s to the end."""
        s = min(max(s, 0.0), self.length)
        if self.is_analytic:
            kept: List[SegmentDescriptor] = []
            acc = 0.0
            start_pose = None
            for seg in self.segments:
                seg_len = abs(seg.signed_length)
                if acc + seg_len <= s + 1e-12:
                    acc += seg_len
                    continue
                if start_pose is None:
                    into = s - acc
                    start_pose = self.pose_at(s).pose
                    remain = seg_len - into
                    if remain > 1e-12:
                        kept.append(
                            SegmentDescriptor(
                                seg.kind,
                                math.copysign(remain, seg.signed_length),
                                seg.curvature,
                            )
                        )
                    acc += seg_len
                else:
                    kept.append(seg)
            if start_pose is None:
                start_pose = self.end_pose
            out = SteeredPath.from_segments(start_pose, kept, resolution)
            if self._snap is not None:
                out.snap_end_to(self._snap)
            return out
        head = _interp_sample(self.samples, s)
        kept_samples = [PathSample(head.pose, 0.0, head.direction, head.curvature)]
        for smp in self.samples:
            if smp.arc_length > s + 1e-12:
                kept_samples.append(
                    PathSample(smp.pose, smp.arc_length - s, smp.direction, smp.curvature)
                )
        return SteeredPath.from_integrated(kept_samples)

    def portion(self, s0: float, s1: float, resolution: float) -> "SteeredPath":
        """The sub-path between arc lengths s0 <= s1."""
        return self.suffix_from(s0, resolution).truncated(max(0.0, s1 - s0), resolution)


def concatenate_paths(paths: Sequence[SteeredPath], tol: float = 1e-6) -> SteeredPath:
    """Join paths end-to-start; consecutive endpoints must agree within tol."""
    paths = [p for p in paths if p is not None]
    if not paths:
        raise ValueError("nothing to concatenate")
    segments: List[SegmentDescriptor] = []
    samples: List[PathSample] = list(paths[0].samples)
    segments.extend(paths[0].segments)
    offset = paths[0].length
    for prev, nxt in zip(paths, paths[1:]):
        gap = prev.end_pose.distance_to(nxt.start)
        if gap > tol:
            raise ValueError(f"paths are not contiguous (gap {gap:.3g} m)")
        segments.extend(nxt.segments)
        for smp in nxt.samples[1:] if len(nxt.samples) > 1 else []:
            samples.append(
                PathSample(smp.pose, offset + smp.arc_length, smp.direction, smp.curvature)
            )
        offset += nxt.length
    return SteeredPath(paths[0].start, segments, offset, samples=samples)


def _sample_analytic(
    start: Pose, segments: Sequence[SegmentDescriptor], resolution: float
) -> List[PathSample]:
    first_dir = segments[0].direction if segments else 1
    first_curv = segments[0].curvature if segments else 0.0
    samples = [PathSample(start, 0.0, first_dir, first_curv)]
    pose = start
    acc = 0.0
    for seg in segments:
        seg_len = abs(seg.signed_length)
        if seg_len <= 0.0:
            continue
        n = max(1, math.ceil(seg_len / resolution))
        for i in range(1, n + 1):
            local = seg_len * i / n
            p = advance_pose(
                pose, seg.kind, math.copysign(local, seg.signed_length), seg.curvature
            )
            samples.append(PathSample(p, acc + local, seg.direction, seg.curvature))
        pose = samples[-1].pose
        acc += seg_len
    return samples


def _interp_sample(samples: Sequence[PathSample], s: float) -> PathSample:
    """Linear interpolation between stored samples of an integrated path."""
    if s <= samples[0].arc_length:
        return PathSample(samples[0].pose, s, samples[0].direction, samples[0].curvature)
    for a, b in zip(samples, samples[1:]):
        if s <= b.arc_length:
            span = b.arc_length - a.arc_length
            t = 0.0 if span <= 0 else (s - a.arc_length) / span
            pa, pb = a.pose, b.pose
            dtheta = normalize_angle(pb.theta - pa.theta)
            pose = Pose(
                pa.x + t * (pb.x - pa.x),
                pa.y + t * (pb.y - pa.y),
                pa.theta + t * dtheta,
            )
            return PathSample(pose, s, b.direction, b.curvature)
    last = samples[-1]
    return PathSample(last.pose, s, last.direction, last.curvature)


def _resample_polyline(samples: Sequence[PathSample], resolution: float) -> List[PathSample]:
    """Re-space integrated samples at <= resolution.

    Every stored sample is kept and each gap is subdivided independently, so
    the check points for any slice of the path coincide with the check
    points of the whole path (validity results cannot depend on slicing).
    """
    out = [samples[0]]
    for a, b in zip(samples, samples[1:]):
        gap = b.arc_length - a.arc_length
        if gap <= 0:
            if b.pose != a.pose:  # keep both sides of a pose discontinuity
                out.append(b)
            continue
        n = max(1, math.ceil(gap / resolution))
        for i in range(1, n):
            out.append(_interp_sample(samples, a.arc_length + gap * i / n))
        out.append(b)
    return out
