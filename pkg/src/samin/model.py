"""Cost model: geometry, channel gains, transmit power inversion, compute cost.

Scalar helpers (``uav_tx_power_energy`` and friends) raise on domain
violations. :func:`cost_terms` is the vectorised workhorse used by
:func:`evaluate_plan` and by the brute-force oracle; it never raises and
instead reports impossible configurations as ``inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from samin.errors import (
    DomainError,
    PropagationDominatedError,
    RateInfeasibleError,
    UnallocatedWorkError,
)
from samin.params import SystemParams

if TYPE_CHECKING:
    from samin.scenario import OffloadPlan, Scenario

FEASIBILITY_RTOL = 1e-9

DETERMINISTIC = "deterministic"
STOCHASTIC = "stochastic"


def distance3d(p, q) -> float:
    """Euclidean distance between two points given as Position3D or 3-sequences."""
    p = p.as_array() if hasattr(p, "as_array") else np.asarray(p, dtype=float)
    q = q.as_array() if hasattr(q, "as_array") else np.asarray(q, dtype=float)
    return float(np.linalg.norm(p - q))


def _check_mode(mode):
    if mode not in (DETERMINISTIC, STOCHASTIC):
        raise ValueError(f"unknown channel mode {mode!r}")


def uav_path_loss_db(params: SystemParams, d: float, shadow_db: float = 0.0) -> float:
    return (
        params.L0_dB
        + 10.0 * params.zeta * math.log10(d / params.d0)
        + shadow_db
        + params.xi * params.F_dB
    )


def uav_channel_gain(params: SystemParams, d: float, mode: str = DETERMINISTIC,
                     seed: Optional[int] = None) -> float:
    """Power gain of the MASS->UAV air-sea link at distance ``d``.

    Deterministic mode drops the shadowing term and uses the mean power of
    the Rician small-scale term, which is exactly one. Stochastic mode draws
    log-normal shadowing and a Rician sample from ``seed``.
    """
    _check_mode(mode)
    if not d > 0:
        raise DomainError(f"distance must be positive, got {d!r}")
    if mode == DETERMINISTIC:
        shadow_db = 0.0
        small_scale_sq = 1.0
    else:
        rng = np.random.default_rng(seed)
        shadow_db = rng.normal(0.0, params.sigma_X_dB)
        k = params.K0_rician
        scatter = (rng.normal() + 1j * rng.normal()) / math.sqrt(2.0)
        lam = math.sqrt(k / (1.0 + k)) + math.sqrt(1.0 / (1.0 + k)) * scatter
        small_scale_sq = abs(lam) ** 2
    loss_linear = 10.0 ** (uav_path_loss_db(params, d, shadow_db) / 10.0)
    return params.G_U * params.G_M * small_scale_sq / loss_linear


def leo_channel_gain(params: SystemParams, d_L: float, mode: str = DETERMINISTIC,
                     seed: Optional[int] = None) -> float:
    """|h|^2 of the MASS->LEO link: fading * shadowing * d^-gamma * link constant."""
    _check_mode(mode)
    if not d_L > 0:
        raise DomainError("slant distance must be positive")
    fading_sq = 1.0
    if mode == STOCHASTIC:
        rng = np.random.default_rng(seed)
        rayleigh = (rng.normal() + 1j * rng.normal()) / math.sqrt(2.0)
        shadow = 10.0 ** (rng.normal(0.0, params.sigma_X_dB) / 20.0)
        fading_sq = abs(rayleigh * shadow) ** 2
    return params.leo_link_gain * fading_sq * d_L ** (-params.gamma)


@dataclass(frozen=True)
class LeoGeometry:
    phi: float
    d_L: float
    v_L: float
    T_coverage: float


def leo_geometry(params: SystemParams) -> LeoGeometry:
    r_orbit = params.R_e + params.h_orbit
    theta = params.theta_elev
    arg = params.R_e / r_orbit * math.cos(theta)
    if not -1.0 <= arg <= 1.0:
        raise DomainError(f"arccos argument {arg} outside [-1, 1]")
    phi = math.acos(arg) - theta
    d_L = math.sqrt(params.R_e ** 2 + r_orbit ** 2 - 2.0 * params.R_e * r_orbit * math.cos(phi))
    v_L = math.sqrt(params.mu_grav / r_orbit)
    if params.T_coverage_override is not None:
        coverage = params.T_coverage_override
    else:
        coverage = 2.0 * r_orbit * phi / v_L
    return LeoGeometry(phi=phi, d_L=d_L, v_L=v_L, T_coverage=coverage)


def _exponent_guard(exponent, cap):
    if exponent > cap:
        raise RateInfeasibleError(f"rate exponent {exponent:.4g} exceeds cap {cap:g}")


def uav_tx_power_energy(params: SystemParams, g_U: float, a: float, s: float,
                        t_U: float, W_U: Optional[float] = None) -> tuple[float, float]:
    """Transmit power and energy needed to push ``a*s`` bits to the UAV in ``t_U``."""
    W_U = params.W_U if W_U is None else W_U
    if not (t_U > 0 and W_U > 0 and g_U > 0):
        raise DomainError("t_U, W_U and g_U must be positive")
    if not 0.0 <= a <= 1.0 or s < 0:
        raise DomainError("need 0 <= a <= 1 and s >= 0")
    exponent = a * s / (t_U * W_U)
    _exponent_guard(exponent, params.exponent_cap)
    power = params.sigma2 / g_U * math.expm1(exponent * math.log(2.0))
    return power, power * t_U


def leo_tx_power_energy(params: SystemParams, h_L_sq: float, a: float, s: float,
                        t_L: float, d_L: float, W_L: Optional[float] = None) -> tuple[float, float]:
    """Transmit power and energy for the ``(1-a)*s`` bits sent to the satellite.

    Only ``t_L - 2 d_L / c`` seconds carry bits, but the energy is charged
    over the whole window ``t_L``.
    """
    W_L = params.W_L if W_L is None else W_L
    if not (t_L > 0 and W_L > 0 and h_L_sq > 0 and d_L > 0):
        raise DomainError("t_L, W_L, h_L_sq and d_L must be positive")
    if not 0.0 <= a <= 1.0 or s < 0:
        raise DomainError("need 0 <= a <= 1 and s >= 0")
    bits = (1.0 - a) * s
    if bits == 0:
        return 0.0, 0.0
    airtime = t_L - 2.0 * d_L / params.c_light
    if airtime <= 0:
        raise PropagationDominatedError(
            f"t_L={t_L} s does not exceed the round-trip propagation {2 * d_L / params.c_light:.6g} s")
    exponent = bits / (airtime * W_L)
    _exponent_guard(exponent, params.exponent_cap)
    power = W_L * params.N0 / h_L_sq * math.expm1(exponent * math.log(2.0))
    return power, power * t_L


def compute_cost(bits: float, cycles_per_bit: float, rho: float,
                 power_draw: float) -> tuple[float, float]:
    if bits < 0 or cycles_per_bit <= 0 or power_draw < 0:
        raise DomainError("need bits >= 0, cycles_per_bit > 0, power_draw >= 0")
    if bits == 0:
        return 0.0, 0.0
    if not rho > 0:
        raise UnallocatedWorkError(f"{bits:g} bits assigned to an executor with rho={rho!r}")
    latency = bits * cycles_per_bit / rho
    return latency, power_draw * latency


# --- vectorised evaluation -------------------------------------------------

def _safe_ratio(num, den):
    """num/den with 0/anything = 0 and positive/0 = inf."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    out = np.where(num == 0, 0.0, out)
    return np.where((num > 0) & (den <= 0), np.inf, out)


def _tx_power(scale, bits, window, bandwidth, cap):
    """scale * (2^(bits/(window*bandwidth)) - 1), inf past the exponent cap."""
    bits = np.asarray(bits, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        exponent = bits / (window * bandwidth)
        exponent = np.where(bits == 0, 0.0, exponent)
        exponent = np.where((bits > 0) & (window <= 0), np.inf, exponent)
        power = scale * np.expm1(np.minimum(exponent, cap + 1.0) * math.log(2.0))
    return np.where(exponent > cap, np.inf, power)


def cost_terms(params: SystemParams, S, rho_local, t_U, t_L, g_U, h_L_sq, d_L,
               a, s, rho_U, rho_L) -> dict:
    """Per-MASS latency/energy breakdown, broadcasting over all array inputs."""
    a = np.asarray(a, dtype=float)
    s = np.asarray(s, dtype=float)
    bits_local = np.maximum(np.asarray(S, dtype=float) - s, 0.0)
    bits_uav = a * s
    bits_leo = (1.0 - a) * s

    T_local = _safe_ratio(bits_local * params.c_bit_local, rho_local)
    T_cpu_U = _safe_ratio(bits_uav * params.c_bit_uav, rho_U)
    T_cpu_L = _safe_ratio(bits_leo * params.c_bit_leo, rho_L)

    p_U = _tx_power(params.sigma2 / np.asarray(g_U, dtype=float), bits_uav, t_U,
                    params.W_U, params.exponent_cap)
    airtime = np.asarray(t_L, dtype=float) - 2.0 * np.asarray(d_L, dtype=float) / params.c_light
    p_L = _tx_power(params.W_L * params.N0 / np.asarray(h_L_sq, dtype=float), bits_leo,
                    airtime, params.W_L, params.exponent_cap)

    # unused links carry no transmission and no processing delay
    T_uav_path = np.where(bits_uav > 0, t_U + T_cpu_U, 0.0)
    T_leo_path = np.where(bits_leo > 0, t_L + T_cpu_L, 0.0)
    with np.errstate(invalid="ignore"):
        E_tx_U = np.where(bits_uav > 0, p_U * t_U, 0.0)
        E_tx_L = np.where(bits_leo > 0, p_L * t_L, 0.0)
    return {
        "E_local": params.P_l * T_local,
        "E_tx_U": E_tx_U,
        "E_tx_L": E_tx_L,
        "E_cpu_U": params.P_U * T_cpu_U,
        "E_cpu_L": params.P_L * T_cpu_L,
        "p_U": p_U,
        "p_L": p_L,
        "T_local": T_local,
        "T_cpu_U": T_cpu_U,
        "T_cpu_L": T_cpu_L,
        "T_uav_path": T_uav_path,
        "T_leo_path": T_leo_path,
        "T_total": np.maximum(np.maximum(T_local, T_uav_path), T_leo_path),
    }


ENERGY_COMPONENTS = ("E_local", "E_tx_U", "E_tx_L", "E_cpu_U", "E_cpu_L")


def total_energy(terms: dict):
    return (terms["E_local"] + terms["E_tx_U"] + terms["E_tx_L"]
            + terms["E_cpu_U"] + terms["E_cpu_L"])


def context_terms(ctx, a, s, rho_U, rho_L) -> dict:
    """:func:`cost_terms` for a single MASS described by a ``MassContext``."""
    return cost_terms(ctx.params, ctx.S, ctx.rho_local, ctx.t_U, ctx.t_L, ctx.g_U,
                      ctx.h_L_sq, ctx.d_L, a, s, rho_U, rho_L)


def context_energy(ctx, a, s, rho_U, rho_L):
    return total_energy(context_terms(ctx, a, s, rho_U, rho_L))


CONSTRAINTS = (
    "ratio_range",
    "volume_range",
    "deadline",
    "coverage",
    "distance",
    "uav_capacity",
    "leo_capacity",
    "nonnegative_rho",
    "uav_tx_power",
    "leo_tx_power",
    "uav_energy",
    "leo_energy",
)


@dataclass
class Metrics:
    E_local: np.ndarray
    E_tx_U: np.ndarray
    E_tx_L: np.ndarray
    E_cpu_U: np.ndarray
    E_cpu_L: np.ndarray
    T_local: np.ndarray
    T_uav_path: np.ndarray
    T_leo_path: np.ndarray
    T_total: np.ndarray
    p_U: np.ndarray
    p_L: np.ndarray
    E_total: float
    residuals: dict
    scales: dict
    feasible: bool

    @property
    def E_mass(self) -> np.ndarray:
        return self.E_local + self.E_tx_U + self.E_tx_L + self.E_cpu_U + self.E_cpu_L

    def violated(self, name: str) -> np.ndarray:
        """Boolean mask of violations of one constraint family."""
        return self.residuals[name] > FEASIBILITY_RTOL * self.scales[name]

    def mass_feasible(self) -> np.ndarray:
        """Per-MASS feasibility; shared capacity/energy caps count against every member."""
        shape = self.E_local.shape
        ok = np.ones(shape, dtype=bool)
        for name in CONSTRAINTS:
            bad = self.violated(name)
            if name in ("uav_capacity", "uav_energy"):
                bad = np.broadcast_to(bad[:, None], shape)
            elif name in ("leo_capacity", "leo_energy"):
                bad = np.broadcast_to(bad, shape)
            ok &= ~bad
        return ok


def evaluate_plan(scenario: "Scenario", plan: "OffloadPlan") -> Metrics:
    """Energy/latency breakdown of ``plan`` and the signed slack of every constraint.

    Residuals are ``lhs - rhs``: non-positive means satisfied.
    """
    p = scenario.params
    shape = scenario.S.shape
    if plan.a.shape != shape:
        raise ValueError(f"plan shape {plan.a.shape} does not match scenario shape {shape}")
    terms = cost_terms(p, scenario.S, scenario.rho_local, scenario.t_U, scenario.t_L,
                       scenario.g_U, scenario.h_L_sq, scenario.d_L,
                       plan.a, plan.s, plan.rho_U, plan.rho_L)
    E_mass = total_energy(terms)

    res = {
        "ratio_range": np.maximum(-plan.a, plan.a - 1.0),
        "volume_range": np.maximum(-plan.s, plan.s - scenario.S),
        "deadline": terms["T_total"] - scenario.T_deadline,
        "coverage": np.where(terms["T_leo_path"] > 0, terms["T_leo_path"], 0.0) - scenario.T_coverage,
        "distance": scenario.distances() - p.d_max,
        "uav_capacity": plan.rho_U.sum(axis=1) - p.rho_max_U,
        "leo_capacity": np.asarray(plan.rho_L.sum() - p.rho_max_L),
        "nonnegative_rho": np.maximum(-plan.rho_U, -plan.rho_L),
        "uav_tx_power": terms["p_U"] - p.P_max_U,
        "leo_tx_power": terms["p_L"] - p.P_max_L,
        "uav_energy": terms["E_cpu_U"].sum(axis=1) - p.E_max_U,
        "leo_energy": np.asarray(terms["E_cpu_L"].sum() - p.E_max_L),
    }
    scales = {
        "ratio_range": 1.0,
        "volume_range": np.maximum(scenario.S, 1.0),
        "deadline": scenario.T_deadline,
        "coverage": scenario.T_coverage,
        "distance": p.d_max,
        "uav_capacity": p.rho_max_U,
        "leo_capacity": p.rho_max_L,
        "nonnegative_rho": 1.0,
        "uav_tx_power": p.P_max_U,
        "leo_tx_power": p.P_max_L,
        "uav_energy": p.E_max_U,
        "leo_energy": p.E_max_L,
    }
    feasible = all(
        bool(np.all(res[k] <= FEASIBILITY_RTOL * scales[k])) for k in CONSTRAINTS
    )
    return Metrics(
        E_local=terms["E_local"], E_tx_U=terms["E_tx_U"], E_tx_L=terms["E_tx_L"],
        E_cpu_U=terms["E_cpu_U"], E_cpu_L=terms["E_cpu_L"],
        T_local=terms["T_local"], T_uav_path=terms["T_uav_path"],
        T_leo_path=terms["T_leo_path"], T_total=terms["T_total"],
        p_U=terms["p_U"], p_L=terms["p_L"],
        E_total=float(E_mass.sum()), residuals=res, scales=scales, feasible=feasible,
    )
