"""Dubins shortest paths: forward-only car with bounded turning radius.

Solutions are combinations of at most three motion primitives (left arc,
straight, right arc) from the six families LSL, RSR, LSR, RSL, RLR, LRL.
Each closed-form candidate is verified by forward composition before it
competes; the best verified candidate wins.
"""

from __future__ import annotations

import math
from typing import List, Optional, Tuple

from ..geom import Pose, normalize_angle
from .config import SteerConfig
from .path import SegmentDescriptor, SegmentKind, SteeredPath

_2PI = 2.0 * math.pi

# (type char, unsigned length) triples; arcs in radians on the unit circle
_Word = List[Tuple[str, float]]


def _mod2pi(a: float) -> float:
    a = math.fmod(a, _2PI)
    return a + _2PI if a < 0 else a


def _polar(x: float, y: float) -> Tuple[float, float]:
    return math.hypot(x, y), math.atan2(y, x)


def _lsl(x: float, y: float, phi: float) -> List[_Word]:
    u, t = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    t = _mod2pi(t)
    v = _mod2pi(phi - t)
    return [[("L", t), ("S", u), ("L", v)]]


def _lsr(x: float, y: float, phi: float) -> List[_Word]:
    rho, t1 = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho * rho < 4.0:
        return []
    u = math.sqrt(rho * rho - 4.0)
    t = _mod2pi(t1 + math.atan2(2.0, u))
    v = _mod2pi(t - phi)
    return [[("L", t), ("S", u), ("R", v)]]


def _lrl(x: float, y: float, phi: float) -> List[_Word]:
    rho, t1 = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho > 4.0:
        return []
    # both middle-arc branches; the long one carries the optimal CCC cases
    out = []
    u_short = 2.0 * math.asin(min(1.0, 0.25 * rho))
    for u in (u_short, _2PI - u_short):
        t = _mod2pi(t1 + 0.5 * u)
        v = _mod2pi(phi - t + u)
        out.append([("L", t), ("R", u), ("L", v)])
    return out


_REFLECT = {"L": "R", "R": "L", "S": "S"}


def _candidate_words(x: float, y: float, phi: float) -> List[_Word]:
    words: List[_Word] = []
    for base in (_lsl, _lsr, _lrl):
        words.extend(base(x, y, phi))
        for w in base(x, -y, -phi):
            words.append([(_REFLECT[c], l) for c, l in w])
    return words


def _compose(word: _Word) -> Tuple[float, float, float]:
    """Endpoint of a word driven from (0, 0, 0) at unit radius, all forward."""
    x = y = th = 0.0
    for c, l in word:
        if c == "S":
            x += l * math.cos(th)
            y += l * math.sin(th)
        else:
            kappa = 1.0 if c == "L" else -1.0
            th1 = th + kappa * l
            x += (math.sin(th1) - math.sin(th)) * kappa
            y -= (math.cos(th1) - math.cos(th)) * kappa
            th = th1
    return x, y, th


def dubins_steer(from_pose: Pose, to_pose: Pose, cfg: SteerConfig) -> SteeredPath:
    """Minimum-length Dubins path from from_pose to to_pose."""
    r = cfg.turning_radius
    dx = to_pose.x - from_pose.x
    dy = to_pose.y - from_pose.y
    c, s = math.cos(from_pose.theta), math.sin(from_pose.theta)
    x = (c * dx + s * dy) / r
    y = (-s * dx + c * dy) / r
    phi = normalize_angle(to_pose.theta - from_pose.theta)

    best: Optional[_Word] = None
    best_len = math.inf
    scale = max(1.0, abs(x), abs(y))
    for word in _candidate_words(x, y, phi):
        total = sum(l for _, l in word)
        if total >= best_len:
            continue
        ex, ey, eth = _compose(word)
        if (
            math.hypot(ex - x, ey - y) > 1e-8 * scale
            or abs(normalize_angle(eth - phi)) > 1e-8
        ):
            continue
        best, best_len = word, total
    if best is None:  # cannot happen: LSL always verifies
        raise RuntimeError("no Dubins candidate verified")

    segments = []
    for ch, l in best:
        if ch == "S":
            segments.append(SegmentDescriptor(SegmentKind.STRAIGHT, l * r, 0.0))
        elif ch == "L":
            segments.append(SegmentDescriptor(SegmentKind.LEFT_ARC, l * r, 1.0 / r))
        else:
            segments.append(SegmentDescriptor(SegmentKind.RIGHT_ARC, l * r, -1.0 / r))
    path = SteeredPath.from_segments(from_pose, segments, cfg.sample_resolution)
    path.snap_end_to(to_pose)
    return path
