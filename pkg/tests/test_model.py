import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from samin import model
from samin.errors import (
    DomainError,
    PropagationDominatedError,
    RateInfeasibleError,
    UnallocatedWorkError,
)
from samin.params import Position3D, SystemParams
from samin.scenario import OffloadPlan, build_scenario, default_scenario

P = SystemParams()


# --- distance -------------------------------------------------------------------

def test_distance_identity_and_axis():
    assert model.distance3d(Position3D(0, 0, 0), Position3D(0, 0, 0)) == 0.0
    assert model.distance3d(Position3D(125, 125, 100), Position3D(125, 125, 0)) == 100.0


def test_distance_diagonal():
    assert model.distance3d((375, 375, 100), (500, 500, 0)) == pytest.approx(203.10, abs=0.005)
    assert model.distance3d((375, 375, 100), (500, 500, 0)) == pytest.approx(
        math.sqrt(125**2 + 125**2 + 100**2), rel=1e-15)


# --- UAV channel ------------------------------------------------------------------

def test_uav_gain_at_reference_distance():
    # independent dB arithmetic: L = L0 + xi*F, mean small-scale power 1
    L_db = P.L0_dB + P.xi * P.F_dB
    expected = P.G_U * P.G_M * 10 ** (-L_db / 10)
    assert model.uav_channel_gain(P, P.d0) == pytest.approx(expected, rel=1e-12)


def test_uav_gain_distance_doubling():
    g1 = model.uav_channel_gain(P, 100.0)
    g2 = model.uav_channel_gain(P, 200.0)
    assert g1 / g2 == pytest.approx(2 ** 1.6, rel=1e-12)
    assert 2 ** 1.6 == pytest.approx(3.031, abs=5e-4)


def test_uav_gain_stochastic_is_seeded():
    g1 = model.uav_channel_gain(P, 150.0, model.STOCHASTIC, seed=[3, 1, 2, 0])
    g2 = model.uav_channel_gain(P, 150.0, model.STOCHASTIC, seed=[3, 1, 2, 0])
    g3 = model.uav_channel_gain(P, 150.0, model.STOCHASTIC, seed=[4, 1, 2, 0])
    assert g1 == g2
    assert g1 != g3


def test_uav_gain_rejects_nonpositive_distance():
    with pytest.raises(DomainError):
        model.uav_channel_gain(P, 0.0)
    with pytest.raises(ValueError):
        model.uav_channel_gain(P, 10.0, mode="bogus")


def test_stochastic_gain_has_unit_mean_small_scale():
    params = SystemParams(sigma_X_dB=0.0)
    samples = [model.uav_channel_gain(params, 100.0, model.STOCHASTIC, seed=[i]) for i in range(4000)]
    assert np.mean(samples) / model.uav_channel_gain(params, 100.0) == pytest.approx(1.0, abs=0.03)


# --- UAV transmit -----------------------------------------------------------------

def test_uav_tx_zero_ratio():
    assert model.uav_tx_power_energy(P, 1e-8, 0.0, 1e7, 0.4) == (0.0, 0.0)


def test_uav_tx_halving_gain_doubles_cost():
    p1, e1 = model.uav_tx_power_energy(P, 2e-8, 0.4, 1e7, 0.4)
    p2, e2 = model.uav_tx_power_energy(P, 1e-8, 0.4, 1e7, 0.4)
    assert p2 == pytest.approx(2 * p1, rel=1e-14)
    assert e2 == pytest.approx(2 * e1, rel=1e-14)


def test_uav_tx_unit_exponent():
    params = SystemParams(sigma2=7.9e-12, W_U=12e6)
    g = 3.7e-9
    # a*s / (t_U W_U) = 4.8e6 / 4.8e6 = 1, so p = sigma2 / g
    p, e = model.uav_tx_power_energy(params, g, 0.48, 1e7, 0.4)
    assert p == pytest.approx(7.9e-12 / g, rel=1e-13)
    assert e == pytest.approx(0.4 * 7.9e-12 / g, rel=1e-13)


def test_uav_tx_exponent_guard():
    with pytest.raises(RateInfeasibleError):
        model.uav_tx_power_energy(P, 1e-8, 1.0, 1e12, 0.01)


# --- LEO geometry and link ----------------------------------------------------------

def test_leo_geometry_table_values():
    geo = model.leo_geometry(P)
    # independent evaluation with the same trigonometry written out
    r = 6.371e6 + 784e3
    phi = math.acos(6.371e6 / r * math.cos(math.pi / 6)) - math.pi / 6
    assert geo.phi == pytest.approx(phi, rel=1e-14)
    assert geo.phi == pytest.approx(0.166, abs=1e-3)
    assert geo.d_L == pytest.approx(1.37e6, rel=2e-3)
    assert geo.v_L == pytest.approx(math.sqrt(3.986004418e14 / r), rel=1e-14)
    assert geo.v_L == pytest.approx(7.46e3, rel=1e-3)
    assert geo.T_coverage == pytest.approx(3.2e2, rel=0.01)
    assert geo.d_L >= P.h_orbit


def test_leo_geometry_zenith_limit():
    geo = model.leo_geometry(SystemParams(theta_elev=math.pi / 2 - 1e-12))
    assert geo.phi == pytest.approx(0.0, abs=1e-9)
    assert geo.d_L == pytest.approx(P.h_orbit, rel=1e-9)
    assert geo.T_coverage == pytest.approx(0.0, abs=1e-6)


def test_leo_coverage_override():
    assert model.leo_geometry(SystemParams(T_coverage_override=42.0)).T_coverage == 42.0


def test_leo_tx_all_to_uav():
    d_L = model.leo_geometry(P).d_L
    assert model.leo_tx_power_energy(P, 1e-14, 1.0, 1e7, 0.7, d_L) == (0.0, 0.0)


def test_leo_tx_matches_direct_formula():
    d_L = model.leo_geometry(P).d_L
    h2 = P.leo_link_gain * d_L ** -P.gamma
    p, e = model.leo_tx_power_energy(P, h2, 0.5, 1e7, 0.7, d_L)
    tau = 0.7 - 2 * d_L / 3e8
    direct = 15e6 * P.N0 / h2 * (2 ** (5e6 / (tau * 15e6)) - 1)
    assert p == pytest.approx(direct, rel=1e-12)
    assert e == pytest.approx(direct * 0.7, rel=1e-12)


def test_leo_tx_propagation_dominated():
    d_L = model.leo_geometry(P).d_L
    prop = 2 * d_L / P.c_light
    with pytest.raises(PropagationDominatedError):
        model.leo_tx_power_energy(P, 1e-14, 0.5, 1e7, prop * 0.999, d_L)
    # just above the propagation time the exponent guard trips instead of overflowing
    with pytest.raises(RateInfeasibleError):
        model.leo_tx_power_energy(P, 1e-14, 0.5, 1e7, prop * (1 + 1e-9), d_L)


# --- compute -------------------------------------------------------------------------

def test_compute_zero_work():
    assert model.compute_cost(0.0, 1e3, 0.0, 5.0) == (0.0, 0.0)


def test_compute_local_table_value():
    latency, energy = model.compute_cost(1e7, 1e3, 7e9, 2.0)
    assert latency == pytest.approx(1e10 / 7e9, rel=1e-15)
    assert latency == pytest.approx(1.4286, abs=1e-4)
    assert energy == pytest.approx(2.0 * latency, rel=1e-15)


def test_compute_doubling_rho_halves_cost():
    l1, e1 = model.compute_cost(3e6, 1e3, 2e9, 1.5)
    l2, e2 = model.compute_cost(3e6, 1e3, 4e9, 1.5)
    assert l2 == pytest.approx(l1 / 2, rel=1e-15)
    assert e2 == pytest.approx(e1 / 2, rel=1e-15)


def test_compute_unallocated():
    with pytest.raises(UnallocatedWorkError):
        model.compute_cost(1.0, 1e3, 0.0, 1.0)


# --- evaluate_plan -----------------------------------------------------------------

def _single(**task):
    return build_scenario(P, [(0, 0, 100)], [[[50, 0, 0]]], **task)


def test_total_latency_is_max_of_paths():
    sc = _single(S=1e7, rho_local=1e9, t_U=0.4, t_L=0.7)
    # local 0.5 s, UAV path 0.4 + 0.4 = 0.8 s, LEO path 0.7 + 0.2 = 0.9 s
    s = 0.95e7
    plan = OffloadPlan(np.array([[0.5]]), np.array([[s]]),
                       np.array([[0.5 * s * 1e3 / 0.4]]), np.array([[0.5 * s * 1e3 / 0.2]]))
    m = model.evaluate_plan(sc, plan)
    assert m.T_local[0, 0] == pytest.approx(0.5)
    assert m.T_uav_path[0, 0] == pytest.approx(0.8)
    assert m.T_leo_path[0, 0] == pytest.approx(0.9)
    assert m.T_total[0, 0] == pytest.approx(0.9)


def test_local_only_plan():
    sc = _single()
    m = model.evaluate_plan(sc, OffloadPlan.zeros((1, 1)))
    assert m.E_total == pytest.approx(P.P_l * 1e7 * 1e3 / 7e9, rel=1e-15)
    for name in ("E_tx_U", "E_tx_L", "E_cpu_U", "E_cpu_L"):
        assert getattr(m, name)[0, 0] == 0.0


def test_distance_residual_for_unreachable_mass():
    sc = build_scenario(P, [(125, 125, 100)], [[[500, 500, 0]]])
    m = model.evaluate_plan(sc, OffloadPlan.zeros((1, 1)))
    assert m.residuals["distance"][0, 0] == pytest.approx(math.sqrt(375**2 + 375**2 + 100**2) - 300)
    assert m.residuals["distance"][0, 0] == pytest.approx(239.7, abs=0.05)
    assert not m.feasible


def test_plan_shape_mismatch():
    with pytest.raises(ValueError):
        model.evaluate_plan(default_scenario(), OffloadPlan.zeros((1, 1)))


# --- properties -------------------------------------------------------------------------

@st.composite
def plans(draw):
    sc = default_scenario(n_per_uav=2)
    shape = sc.shape
    floats = st.floats(0.0, 1.0)
    a = np.array(draw(st.lists(floats, min_size=8, max_size=8))).reshape(shape)
    frac = np.array(draw(st.lists(floats, min_size=8, max_size=8))).reshape(shape)
    rho = st.floats(1e9, 1e11)
    rho_U = np.array(draw(st.lists(rho, min_size=8, max_size=8))).reshape(shape)
    rho_L = np.array(draw(st.lists(rho, min_size=8, max_size=8))).reshape(shape)
    return sc, OffloadPlan(a, frac * sc.S, rho_U, rho_L)


@settings(max_examples=60, deadline=None)
@given(plans())
def test_nonnegative_and_additive(case):
    sc, plan = case
    m = model.evaluate_plan(sc, plan)
    parts = [m.E_local, m.E_tx_U, m.E_tx_L, m.E_cpu_U, m.E_cpu_L]
    for part in parts:
        assert np.all(part >= 0)
    for t in (m.T_local, m.T_uav_path, m.T_leo_path, m.T_total):
        assert np.all(t >= 0)
    assert m.E_total == pytest.approx(sum(float(p.sum()) for p in parts), rel=1e-12)
    assert np.array_equal(m.T_total, np.maximum(np.maximum(m.T_local, m.T_uav_path), m.T_leo_path))


@settings(max_examples=60, deadline=None)
@given(plans())
def test_zero_offload_identity(case):
    sc, plan = case
    plan.a[0, 0] = 0.0
    plan.a[1, 0] = 1.0
    plan.s[2, 0] = 0.0
    m = model.evaluate_plan(sc, plan)
    assert m.E_tx_U[0, 0] == 0 and m.E_cpu_U[0, 0] == 0
    assert m.E_tx_L[1, 0] == 0 and m.E_cpu_L[1, 0] == 0
    assert m.E_tx_U[2, 0] == m.E_cpu_U[2, 0] == m.E_tx_L[2, 0] == m.E_cpu_L[2, 0] == 0


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-12, 1e-6), st.floats(0.01, 100.0), st.floats(0.01, 1.0), st.floats(1e5, 1e7))
def test_uav_energy_scales_inversely_with_gain(g, k, a, s):
    _, e1 = model.uav_tx_power_energy(P, g, a, s, 0.4)
    _, e2 = model.uav_tx_power_energy(P, g * k, a, s, 0.4)
    assert e2 == pytest.approx(e1 / k, rel=1e-12)
    if k > 1:
        assert e2 < e1


def test_deterministic_metrics_repeat():
    a = model.evaluate_plan(default_scenario(seed=5), OffloadPlan.zeros((4, 5)))
    b = model.evaluate_plan(default_scenario(seed=5), OffloadPlan.zeros((4, 5)))
    assert a.E_total == b.E_total
    for name in model.CONSTRAINTS:
        assert np.array_equal(a.residuals[name], b.residuals[name])


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 1.5))
def test_slant_range_above_altitude(theta):
    geo = model.leo_geometry(SystemParams(theta_elev=theta))
    assert geo.d_L > P.h_orbit
    assert 0 < geo.phi < math.pi / 2
