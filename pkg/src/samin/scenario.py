"""Scenario containers: geometry, tasks, channel realisations and offloading plans.

Per-MASS arrays have shape ``(M, N)``: M UAVs, each serving N MASSs.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from samin import model
from samin.params import SystemParams

DEFAULT_UAV_POSITIONS = (
    (125.0, 125.0, 100.0),
    (125.0, 375.0, 100.0),
    (375.0, 125.0, 100.0),
    (375.0, 375.0, 100.0),
)


@dataclass(frozen=True)
class ChannelRealization:
    g_U: float
    h_L_sq: float
    seed: Optional[int]
    mode: str


@dataclass(frozen=True)
class MassContext:
    """Everything the per-MASS subproblems need, plus the current iterate.

    ``a``, ``s``, ``rho_U`` and ``rho_L`` hold the values of the blocks that
    are *fixed* while another block is optimised.
    """

    params: SystemParams
    S: float
    rho_local: float
    T_max: float
    t_U: float
    t_L: float
    g_U: float
    h_L_sq: float
    d_L: float
    a: float = 0.5
    s: float = 0.0
    rho_U: float = 0.0
    rho_L: float = 0.0

    def with_iterate(self, **kw) -> "MassContext":
        return dataclasses.replace(self, **kw)


@dataclass
class OffloadPlan:
    a: np.ndarray
    s: np.ndarray
    rho_U: np.ndarray
    rho_L: np.ndarray

    @classmethod
    def zeros(cls, shape) -> "OffloadPlan":
        return cls(*(np.zeros(shape) for _ in range(4)))

    def copy(self) -> "OffloadPlan":
        return OffloadPlan(self.a.copy(), self.s.copy(), self.rho_U.copy(), self.rho_L.copy())


@dataclass(frozen=True, eq=False)
class Scenario:
    params: SystemParams
    uav_positions: np.ndarray
    mass_positions: np.ndarray
    S: np.ndarray
    rho_local: np.ndarray
    T_deadline: np.ndarray
    t_U: np.ndarray
    t_L: np.ndarray
    g_U: np.ndarray
    h_L_sq: np.ndarray
    d_L: float
    T_coverage: float
    channel_mode: str = model.DETERMINISTIC
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.S.shape

    @property
    def n_uav(self) -> int:
        return self.S.shape[0]

    @property
    def n_mass(self) -> int:
        return self.S.shape[1]

    def distances(self) -> np.ndarray:
        return np.linalg.norm(self.mass_positions - self.uav_positions[:, None, :], axis=-1)

    def context(self, m: int, n: int, **iterate) -> MassContext:
        return MassContext(
            params=self.params,
            S=float(self.S[m, n]),
            rho_local=float(self.rho_local[m, n]),
            T_max=float(self.T_deadline[m, n]),
            t_U=float(self.t_U[m, n]),
            t_L=float(self.t_L[m, n]),
            g_U=float(self.g_U[m, n]),
            h_L_sq=float(self.h_L_sq[m, n]),
            d_L=float(self.d_L),
            **iterate,
        )

    def channel(self, m: int, n: int) -> ChannelRealization:
        return ChannelRealization(float(self.g_U[m, n]), float(self.h_L_sq[m, n]),
                                  self.seed, self.channel_mode)

    def with_tasks(self, **arrays) -> "Scenario":
        """Copy with some of S, rho_local, T_deadline, t_U, t_L replaced (scalars broadcast)."""
        allowed = {"S", "rho_local", "T_deadline", "t_U", "t_L"}
        unknown = set(arrays) - allowed
        if unknown:
            raise KeyError(f"cannot override {sorted(unknown)}")
        new = {k: np.broadcast_to(np.asarray(v, dtype=float), self.shape).copy()
               for k, v in arrays.items()}
        return dataclasses.replace(self, **new)

    def subset(self, m: int, n: int) -> "Scenario":
        """Single-MASS scenario holding MASS (m, n) and the whole of its UAV."""
        sel = (slice(m, m + 1), slice(n, n + 1))
        return dataclasses.replace(
            self,
            uav_positions=self.uav_positions[m:m + 1].copy(),
            mass_positions=self.mass_positions[sel].copy(),
            **{k: getattr(self, k)[sel].copy()
               for k in ("S", "rho_local", "T_deadline", "t_U", "t_L", "g_U", "h_L_sq")},
        )


def _link_seed(seed: int, m: int, n: int, link: int) -> list[int]:
    return [int(seed), m, n, link]


def build_scenario(params: SystemParams, uav_positions, mass_positions, *,
                   S=1e7, rho_local=7e9, T_deadline=None, t_U=0.4, t_L=0.7,
                   channel_mode: str = model.DETERMINISTIC, seed: Optional[int] = 0,
                   meta: Optional[dict] = None) -> Scenario:
    """Assemble a scenario and realise every channel from the geometry."""
    uav = np.asarray(uav_positions, dtype=float).reshape(-1, 3)
    mass = np.asarray(mass_positions, dtype=float)
    if mass.ndim != 3 or mass.shape[0] != uav.shape[0] or mass.shape[2] != 3:
        raise ValueError("mass_positions must have shape (M, N, 3)")
    shape = mass.shape[:2]
    T_deadline = params.T_deadline if T_deadline is None else T_deadline

    def full(v):
        return np.broadcast_to(np.asarray(v, dtype=float), shape).copy()

    geo = model.leo_geometry(params)
    dist = np.linalg.norm(mass - uav[:, None, :], axis=-1)
    g_U = np.empty(shape)
    h_L = np.empty(shape)
    for m in range(shape[0]):
        for n in range(shape[1]):
            s_u = _link_seed(seed or 0, m, n, 0) if channel_mode == model.STOCHASTIC else None
            s_l = _link_seed(seed or 0, m, n, 1) if channel_mode == model.STOCHASTIC else None
            g_U[m, n] = model.uav_channel_gain(params, float(dist[m, n]), channel_mode, s_u)
            h_L[m, n] = model.leo_channel_gain(params, geo.d_L, channel_mode, s_l)
    return Scenario(
        params=params, uav_positions=uav, mass_positions=mass,
        S=full(S), rho_local=full(rho_local), T_deadline=full(T_deadline),
        t_U=full(t_U), t_L=full(t_L), g_U=g_U, h_L_sq=h_L, d_L=geo.d_L,
        T_coverage=geo.T_coverage, channel_mode=channel_mode, seed=seed,
        meta=dict(meta or {}),
    )


def place_masses(uav_positions, n_per_uav: int, radius: float, seed: int) -> np.ndarray:
    """Uniform placement in a horizontal disc of ``radius`` under each UAV, at sea level."""
    uav = np.asarray(uav_positions, dtype=float).reshape(-1, 3)
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(size=(uav.shape[0], n_per_uav)))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(uav.shape[0], n_per_uav))
    out = np.zeros((uav.shape[0], n_per_uav, 3))
    out[..., 0] = uav[:, None, 0] + r * np.cos(theta)
    out[..., 1] = uav[:, None, 1] + r * np.sin(theta)
    return out


def default_scenario(params: Optional[SystemParams] = None, n_per_uav: int = 5,
                     seed: int = 0, uav_positions: Sequence = DEFAULT_UAV_POSITIONS,
                     **task) -> Scenario:
    """Four hovering UAVs, five MASSs each, 10 Mbit tasks."""
    params = params or SystemParams()
    mass = place_masses(uav_positions, n_per_uav, 0.9 * params.d_max, seed)
    return build_scenario(params, uav_positions, mass, seed=seed, **task)


def random_scenario(seed: int, n_uav: Optional[int] = None, n_per_uav: Optional[int] = None,
                    params: Optional[SystemParams] = None) -> Scenario:
    """Randomised scenario with per-MASS tasks drawn around the default operating point.

    Used by the property tests; every draw is a pure function of ``seed``.
    """
    rng = np.random.default_rng(seed)
    params = params or SystemParams()
    M = n_uav if n_uav is not None else int(rng.integers(1, 5))
    N = n_per_uav if n_per_uav is not None else int(rng.integers(1, 7))
    uav = np.column_stack([
        rng.uniform(0.0, 500.0, M), rng.uniform(0.0, 500.0, M), rng.uniform(80.0, 150.0, M)
    ])
    horiz = np.sqrt(np.maximum(params.d_max ** 2 - uav[:, 2] ** 2, 0.0)) * 0.95
    r = horiz[:, None] * np.sqrt(rng.uniform(size=(M, N)))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(M, N))
    mass = np.zeros((M, N, 3))
    mass[..., 0] = uav[:, None, 0] + r * np.cos(theta)
    mass[..., 1] = uav[:, None, 1] + r * np.sin(theta)
    shape = (M, N)
    return build_scenario(
        params, uav, mass,
        S=rng.uniform(2e6, 1e7, shape),
        rho_local=rng.uniform(3e9, 1e10, shape),
        t_U=rng.uniform(0.2, 0.6, shape),
        t_L=rng.uniform(0.5, 0.9, shape),
        seed=seed,
    )
