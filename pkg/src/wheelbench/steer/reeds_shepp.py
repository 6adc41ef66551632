"""Reeds-Shepp shortest paths: car with reverse gear and bounded turning.

The solver runs the classic word-family case analysis (CSC, CCC, CCCC,
CCSC/CSCC with quarter-turn arcs, CCSCC) reduced by the timeflip, reflect
and backwards symmetries. Segment lengths are signed: negative means the
segment is driven in reverse. Every closed-form candidate is verified by
forward composition before competing for the minimum.
"""

from __future__ import annotations

import math
from typing import Callable, List, Optional, Tuple

from ..geom import Pose, normalize_angle
from .config import SteerConfig
from .path import SegmentDescriptor, SegmentKind, SteeredPath

_EPS = 1e-10
_HPI = 0.5 * math.pi

# a candidate is (types, signed lengths) with types a string over {L, R, S}
_Candidate = Tuple[str, List[float]]


def _polar(x: float, y: float) -> Tuple[float, float]:
    return math.hypot(x, y), math.atan2(y, x)


def _tau_omega(u: float, v: float, xi: float, eta: float, phi: float):
    delta = normalize_angle(u - v)
    a = math.sin(u) - math.sin(delta)
    b = math.cos(u) - math.cos(delta) - 1.0
    t1 = math.atan2(eta * a - xi * b, xi * a + eta * b)
    t2 = 2.0 * (math.cos(delta) - math.cos(v) - math.cos(u)) + 3.0
    tau = normalize_angle(t1 + math.pi) if t2 < 0 else normalize_angle(t1)
    omega = normalize_angle(tau - u + v - phi)
    return tau, omega


# Base case solvers. Each returns (t, u, v) signed lengths for its word,
# or None when the family is infeasible for this query.


def _lsl(x, y, phi):  # L+ S+ L+
    u, t = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if t >= -_EPS:
        v = normalize_angle(phi - t)
        if v >= -_EPS:
            return t, u, v
    return None


def _lsr(x, y, phi):  # L+ S+ R+
    rho, t1 = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho * rho >= 4.0:
        u = math.sqrt(rho * rho - 4.0)
        t = normalize_angle(t1 + math.atan2(2.0, u))
        v = normalize_angle(t - phi)
        if t >= -_EPS and v >= -_EPS:
            return t, u, v
    return None


def _lrl(x, y, phi):  # L+ R- L, middle arc reversed
    rho, t1 = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho <= 4.0:
        u = -2.0 * math.asin(min(1.0, 0.25 * rho))
        t = normalize_angle(t1 + 0.5 * u + math.pi)
        v = normalize_angle(phi - t + u)
        if t >= -_EPS and u <= _EPS:
            return t, u, v
    return None


def _lrlrn(x, y, phi):  # L+ R+ L- R-, equal middle arcs (t, u, -u, v)
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = 0.25 * (2.0 + math.hypot(xi, eta))
    if rho <= 1.0:
        u = math.acos(rho)
        t, v = _tau_omega(u, -u, xi, eta, phi)
        if t >= -_EPS and v <= _EPS:
            return t, u, v
    return None


def _lrlrp(x, y, phi):  # L+ R- L- R+, equal middle arcs (t, u, u, v)
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = (20.0 - xi * xi - eta * eta) / 16.0
    if 0.0 <= rho <= 1.0:
        u = -math.acos(rho)
        if u >= -_HPI:
            t, v = _tau_omega(u, u, xi, eta, phi)
            if t >= -_EPS and v >= -_EPS:
                return t, u, v
    return None


def _lrsl(x, y, phi):  # L+ R-(pi/2) S- L-
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho >= 2.0:
        r = math.sqrt(rho * rho - 4.0)
        u = 2.0 - r
        t = normalize_angle(theta + math.atan2(r, -2.0))
        v = normalize_angle(phi - _HPI - t)
        if t >= -_EPS and u <= _EPS and v <= _EPS:
            return t, u, v
    return None


def _lrsr(x, y, phi):  # L+ R-(pi/2) S- R-
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho, theta = _polar(-eta, xi)
    if rho >= 2.0:
        t = theta
        u = 2.0 - rho
        v = normalize_angle(t + _HPI - phi)
        if t >= -_EPS and u <= _EPS and v <= _EPS:
            return t, u, v
    return None


def _lrslr(x, y, phi):  # L+ R-(pi/2) S- L-(pi/2) R+
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = math.hypot(xi, eta)
    if rho >= 2.0:
        u = 4.0 - math.sqrt(rho * rho - 4.0)
        if u <= _EPS:
            t = normalize_angle(
                math.atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta)
            )
            v = normalize_angle(t - phi)
            if t >= -_EPS and v >= -_EPS:
                return t, u, v
    return None


_REFLECT = str.maketrans("LR", "RL")


def _variants(
    base: Callable, expand: Callable[[float, float, float], _Candidate],
    x: float, y: float, phi: float, backwards: bool,
) -> List[_Candidate]:
    """Apply a base solver under the four sign symmetries (and optionally the
    backwards transform) and expand each solution into a typed candidate."""
    out: List[_Candidate] = []
    queries = [(x, y, phi, False, False)]
    queries.append((-x, y, -phi, True, False))      # timeflip
    queries.append((x, -y, -phi, False, True))      # reflect
    queries.append((-x, -y, phi, True, True))       # timeflip + reflect
    if backwards:
        xb = x * math.cos(phi) + y * math.sin(phi)
        yb = x * math.sin(phi) - y * math.cos(phi)
        queries.extend(
            [
                (xb, yb, phi, False, False, True),
                (-xb, yb, -phi, True, False, True),
                (xb, -yb, -phi, False, True, True),
                (-xb, -yb, phi, True, True, True),
            ]
        )
    for q in queries:
        qx, qy, qphi, flip, mirror = q[:5]
        rev = len(q) > 5
        sol = base(qx, qy, qphi)
        if sol is None:
            continue
        types, lengths = expand(*sol)
        if flip:
            lengths = [-l for l in lengths]
        if mirror:
            types = types.translate(_REFLECT)
        if rev:
            types = types[::-1]
            lengths = lengths[::-1]
        out.append((types, lengths))
    return out


def _candidates(x: float, y: float, phi: float) -> List[_Candidate]:
    cands: List[_Candidate] = []
    cands += _variants(_lsl, lambda t, u, v: ("LSL", [t, u, v]), x, y, phi, False)
    cands += _variants(_lsr, lambda t, u, v: ("LSR", [t, u, v]), x, y, phi, False)
    cands += _variants(_lrl, lambda t, u, v: ("LRL", [t, u, v]), x, y, phi, True)
    cands += _variants(_lrlrn, lambda t, u, v: ("LRLR", [t, u, -u, v]), x, y, phi, False)
    cands += _variants(_lrlrp, lambda t, u, v: ("LRLR", [t, u, u, v]), x, y, phi, False)
    cands += _variants(_lrsl, lambda t, u, v: ("LRSL", [t, -_HPI, u, v]), x, y, phi, True)
    cands += _variants(_lrsr, lambda t, u, v: ("LRSR", [t, -_HPI, u, v]), x, y, phi, True)
    cands += _variants(_lrslr, lambda t, u, v: ("LRSLR", [t, -_HPI, u, -_HPI, v]), x, y, phi, False)
    return cands


def _compose(types: str, lengths: List[float]) -> Tuple[float, float, float]:
    """Endpoint of a signed word driven from (0, 0, 0) at unit radius."""
    x = y = th = 0.0
    for c, l in zip(types, lengths):
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


def reeds_shepp_steer(from_pose: Pose, to_pose: Pose, cfg: SteerConfig) -> SteeredPath:
    """Minimum-length Reeds-Shepp path from from_pose to to_pose."""
    r = cfg.turning_radius
    dx = to_pose.x - from_pose.x
    dy = to_pose.y - from_pose.y
    c, s = math.cos(from_pose.theta), math.sin(from_pose.theta)
    x = (c * dx + s * dy) / r
    y = (-s * dx + c * dy) / r
    phi = normalize_angle(to_pose.theta - from_pose.theta)

    best: Optional[_Candidate] = None
    best_len = math.inf
    scale = max(1.0, abs(x), abs(y))
    for types, lengths in _candidates(x, y, phi):
        total = sum(abs(l) for l in lengths)
        if total >= best_len:
            continue
        ex, ey, eth = _compose(types, lengths)
        if (
            math.hypot(ex - x, ey - y) > 1e-8 * scale
            or abs(normalize_angle(eth - phi)) > 1e-8
        ):
            continue
        best, best_len = (types, lengths), total
    if best is None:  # LSL plus its symmetries always cover the plane
        raise RuntimeError("no Reeds-Shepp candidate verified")

    kind_for = {
        "S": (SegmentKind.STRAIGHT, 0.0),
        "L": (SegmentKind.LEFT_ARC, 1.0 / r),
        "R": (SegmentKind.RIGHT_ARC, -1.0 / r),
    }
    segments = [
        SegmentDescriptor(kind_for[ch][0], l * r, kind_for[ch][1])
        for ch, l in zip(best[0], best[1])
    ]
    path = SteeredPath.from_segments(from_pose, segments, cfg.sample_resolution)
    path.snap_end_to(to_pose)
    return path


def reeds_shepp_distance(from_pose: Pose, to_pose: Pose, cfg: SteerConfig) -> float:
    """Length of the optimal Reeds-Shepp path without building samples."""
    r = cfg.turning_radius
    dx = to_pose.x - from_pose.x
    dy = to_pose.y - from_pose.y
    c, s = math.cos(from_pose.theta), math.sin(from_pose.theta)
    x = (c * dx + s * dy) / r
    y = (-s * dx + c * dy) / r
    phi = normalize_angle(to_pose.theta - from_pose.theta)
    scale = max(1.0, abs(x), abs(y))
    best = math.inf
    for types, lengths in _candidates(x, y, phi):
        total = sum(abs(l) for l in lengths)
        if total >= best:
            continue
        ex, ey, eth = _compose(types, lengths)
        if (
            math.hypot(ex - x, ey - y) <= 1e-8 * scale
            and abs(normalize_angle(eth - phi)) <= 1e-8
        ):
            best = total
    return best * r
