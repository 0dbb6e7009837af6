"""Physical and protocol constants for the space-air-marine offloading system.

Every field is stored in SI units (W, W/Hz, Hz, m, s, cycles/s, J).
Decibel and milliwatt conversions belong to the config parser; the
formulas in :mod:`samin.model` never see anything but SI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from samin.errors import ParameterError


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


@dataclass(frozen=True)
class SystemParams:
    # MASS -> UAV air-sea channel
    L0_dB: float = 78.0
    d0: float = 1.0
    zeta: float = 1.6
    sigma_X_dB: float = 4.0
    F_dB: float = 0.0
    xi: int = 1
    K0_rician: float = 10.0
    G_U: float = 1.0
    G_M: float = 1.0
    sigma2: float = 7.9e-12
    W_U: float = 12e6
    # MASS -> LEO link
    W_L: float = 15e6
    N0: float = 3.981e-21
    gamma: float = 2.0
    leo_link_gain: float = 0.028
    # orbit
    h_orbit: float = 784e3
    R_e: float = 6.371e6
    mu_grav: float = 3.986004418e14
    theta_elev: float = math.radians(30.0)
    c_light: float = 3e8
    # geometry limit
    d_max: float = 300.0
    # compute
    c_bit_local: float = 1e3
    c_bit_uav: float = 1e3
    c_bit_leo: float = 1e3
    P_l: float = 5.0
    P_U: float = 0.1
    P_L: float = 0.2
    # caps
    P_max_U: float = 10.0
    P_max_L: float = 20.0
    E_max_U: float = 50.0
    E_max_L: float = 500.0
    rho_max_U: float = 1e11
    rho_max_L: float = 2e12
    # task defaults
    T_deadline: float = 1.0
    T_coverage_override: Optional[float] = None
    # listed with the simulation settings but used by no formula
    chi: float = 1.0
    exponent_cap: float = 64.0

    def __post_init__(self):
        positive = (
            "d0", "sigma2", "W_U", "W_L", "N0", "gamma", "leo_link_gain",
            "h_orbit", "R_e", "mu_grav", "c_light", "d_max", "c_bit_local",
            "c_bit_uav", "c_bit_leo", "P_max_U", "P_max_L", "E_max_U",
            "E_max_L", "rho_max_U", "rho_max_L", "T_deadline", "G_U", "G_M",
            "exponent_cap", "zeta",
        )
        for name in positive:
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")
        for name in ("P_l", "P_U", "P_L", "sigma_X_dB", "K0_rician"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative")
        if self.xi not in (-1, 1):
            raise ParameterError(f"xi must be -1 or +1, got {self.xi!r}")
        if not 0.0 < self.theta_elev < math.pi / 2:
            raise ParameterError("theta_elev must lie strictly between 0 and pi/2")
        if self.T_coverage_override is not None and self.T_coverage_override <= 0:
            raise ParameterError("T_coverage_override must be positive")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class Task:
    """Computation task of one MASS.

    ``t_U`` and ``t_L`` are the fixed transmission windows towards the UAV
    and towards the satellite; ``t_L`` includes the round-trip propagation.
    """

    S: float
    rho_local: float
    T_deadline: float
    t_U: float
    t_L: float

    def __post_init__(self):
        for name in ("S", "rho_local", "T_deadline", "t_U", "t_L"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"Task.{name} must be positive")
