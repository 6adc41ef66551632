"""POSQ steering: forward integration of a polar-coordinate feedback law.

The unicycle model (x' = v cos th, y' = v sin th, th' = w) is driven by
    v = k_rho * tanh(k_v * rho)
    w = k_alpha * alpha + k_phi * phi_err
where rho is the distance to the goal position, alpha the bearing of the
goal in the robot frame and phi_err the heading error (theta - theta_goal).
Integration is fixed-step RK4; termination is on position only, so the
terminal heading is unconstrained (it converges asymptotically).
"""

from __future__ import annotations

import math
from typing import List

from ..geom import Pose, normalize_angle
from .config import SteerConfig
from .path import PathSample, SteeredPath


class NotConverged(RuntimeError):
    """POSQ failed to reach the goal tolerance within posq_max_time."""


def _clamp(value: float, limit: float) -> float:
    return max(-limit, min(limit, value))


def _posq_control(x, y, theta, goal: Pose, cfg: SteerConfig):
    k_rho, k_alpha, k_phi, k_v = cfg.posq_gains
    dx = goal.x - x
    dy = goal.y - y
    rho = math.hypot(dx, dy)
    alpha = normalize_angle(math.atan2(dy, dx) - theta)
    phi_err = normalize_angle(theta - goal.theta)
    v = _clamp(k_rho * math.tanh(k_v * rho), cfg.v_max)
    omega = _clamp(k_alpha * alpha + k_phi * phi_err, cfg.omega_max)
    return v, omega


def _derivative(state, goal, cfg):
    x, y, theta = state
    v, omega = _posq_control(x, y, theta, goal, cfg)
    return (v * math.cos(theta), v * math.sin(theta), omega)


def posq_steer(from_pose: Pose, to_pose: Pose, cfg: SteerConfig) -> SteeredPath:
    """Integrate the feedback law until within posq_goal_eps of the goal
    position; raises NotConverged when posq_max_time elapses first."""
    dt = cfg.posq_dt
    eps = cfg.posq_goal_eps

    x, y, theta = from_pose.x, from_pose.y, from_pose.theta
    v0, w0 = _posq_control(x, y, theta, to_pose, cfg)
    samples: List[PathSample] = [
        PathSample(from_pose, 0.0, 1, (w0 / v0) if v0 > 1e-12 else 0.0)
    ]
    if from_pose.distance_to(to_pose) < eps:
        return SteeredPath.from_integrated(samples)

    arc = 0.0
    steps = int(math.ceil(cfg.posq_max_time / dt))
    for _ in range(steps):
        state = (x, y, theta)
        k1 = _derivative(state, to_pose, cfg)
        k2 = _derivative(
            (x + 0.5 * dt * k1[0], y + 0.5 * dt * k1[1], theta + 0.5 * dt * k1[2]),
            to_pose,
            cfg,
        )
        k3 = _derivative(
            (x + 0.5 * dt * k2[0], y + 0.5 * dt * k2[1], theta + 0.5 * dt * k2[2]),
            to_pose,
            cfg,
        )
        k4 = _derivative(
            (x + dt * k3[0], y + dt * k3[1], theta + dt * k3[2]), to_pose, cfg
        )
        nx = x + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        ny = y + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        ntheta = theta + dt / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        arc += math.hypot(nx - x, ny - y)
        x, y, theta = nx, ny, ntheta
        v, w = _posq_control(x, y, theta, to_pose, cfg)
        kappa = (w / v) if v > 1e-12 else 0.0
        samples.append(PathSample(Pose(x, y, theta), arc, 1, kappa))
        if math.hypot(to_pose.x - x, to_pose.y - y) < eps:
            return SteeredPath.from_integrated(samples)
    raise NotConverged(
        f"posq did not reach the goal within {cfg.posq_max_time} s of simulated time"
    )
