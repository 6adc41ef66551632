"""Steer-function configuration and the unicycle control type."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple


@dataclass(frozen=True)
class Control:
    """Unicycle control: tangential velocity (signed) and turn rate."""

    v: float
    omega: float

    def validate(self, v_max: float, omega_max: float) -> "Control":
        if not (math.isfinite(self.v) and math.isfinite(self.omega)):
            raise ValueError("non-finite control")
        if abs(self.v) > v_max + 1e-12 or abs(self.omega) > omega_max + 1e-12:
            raise ValueError(
                f"control ({self.v}, {self.omega}) exceeds bounds "
                f"(v_max={v_max}, omega_max={omega_max})"
            )
        return self


@dataclass(frozen=True)
class SteerConfig:
    """Shared configuration for all steer functions.

    posq_gains = (k_rho, k_alpha, k_phi, k_v). The defaults satisfy the
    exponential-stability condition of the underlying polar-coordinate
    control law: k_rho > 0, k_phi < 0, and
    k_alpha + (5/3) * k_phi - (2/pi) * k_rho > 0.

    curvature_rate is reserved for curvature-continuous steering variants
    and is not used by the bundled solvers.
    """

    turning_radius: float = 1.0
    v_max: float = 1.0
    omega_max: float = 10.0
    sample_resolution: float = 0.1
    posq_gains: Tuple[float, float, float, float] = (1.0, 6.0, -1.0, 3.8)
    posq_dt: float = 0.01
    posq_goal_eps: float = 0.05
    posq_max_time: float = 60.0
    curvature_rate: Optional[float] = None

    def __post_init__(self):
        positive = {
            "turning_radius": self.turning_radius,
            "v_max": self.v_max,
            "omega_max": self.omega_max,
            "sample_resolution": self.sample_resolution,
            "posq_dt": self.posq_dt,
            "posq_goal_eps": self.posq_goal_eps,
            "posq_max_time": self.posq_max_time,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.sample_resolution >= self.turning_radius:
            raise ValueError("sample_resolution must be smaller than turning_radius")
        k_rho, k_alpha, k_phi, k_v = self.posq_gains
        if not (k_rho > 0 and k_phi < 0 and k_v > 0):
            raise ValueError("posq gains require k_rho > 0, k_phi < 0, k_v > 0")
        if k_alpha + (5.0 / 3.0) * k_phi - (2.0 / math.pi) * k_rho <= 0:
            raise ValueError("posq gains violate the stability condition")

    @property
    def max_curvature(self) -> float:
        return 1.0 / self.turning_radius
