import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from analogbf.closed_form import flat_multiplier, flat_solution, max_flat_gain
from analogbf.errors import DivergentGainError, InfeasibleError, InvalidArgumentError, UnsupportedRegimeError
from analogbf.optimizer import (
    Scenario,
    achievable_rate,
    alternating_optimize,
    bisect_multiplier,
    check_broadside_regime,
    kkt_residual,
    optimal_g_given_s0,
    power_gap,
    waterfill_s0,
)
from analogbf.power import angular_power_density, radiated_power_asymptotic, s0_power_weights
from analogbf.spectra import AngularSpectrum, SampledSpectrum, trapezoid_weights

from conftest import BAND_28, BAND_60
from oracles import joint_ascent, sort_and_pour

RAD60 = math.radians(60)


def step_G(seed, fc, levels=4, m=2001):
    r = np.random.default_rng(seed)
    om = np.linspace(0, 2 * fc, m)
    edges = np.sort(r.uniform(0, 2 * fc, levels - 1))
    vals = r.uniform(0.5, 50.0, levels)[np.searchsorted(edges, om)]
    return AngularSpectrum(om, vals, fc)


def test_scenario_validation():
    with pytest.raises(InvalidArgumentError):
        Scenario(2.0, 1.0, 0.5)
    with pytest.raises(InvalidArgumentError):
        Scenario(1.0, 2.0, 0.5, p_r=-1)
    with pytest.raises(InvalidArgumentError):
        Scenario(1.0, 2.0, 0.5, n0=0)
    sc = Scenario.from_cn(*BAND_28, RAD60, 1e8, n0=2.0, g_c=4.0)
    assert sc.cn == pytest.approx(1e8) and sc.f_c == pytest.approx(27.925e9)


def test_regime_checks():
    assert check_broadside_regime(RAD60, *BAND_28) == pytest.approx(0.5)
    assert check_broadside_regime(math.radians(120), *BAND_28) == pytest.approx(0.5)
    with pytest.raises(DivergentGainError):
        check_broadside_regime(math.pi / 2, *BAND_28)
    with pytest.raises(UnsupportedRegimeError):
        check_broadside_regime(0.2, *BAND_28)


def test_rate_examples():
    sc = Scenario(*BAND_60, RAD60, p_r=1.0, n0=1.0, g_c=2.0, freq_bins=65)
    f = sc.freq_grid()
    G = AngularSpectrum.constant(3.0, sc.f_c)
    assert achievable_rate(G, SampledSpectrum(f, np.zeros_like(f)), sc) == 0.0
    s = SampledSpectrum.flat(sc.f_min, sc.f_max, 0.25, 65)
    assert achievable_rate(G, s, sc) == pytest.approx(sc.bandwidth * math.log2(1 + 2 * 3 * 0.25), rel=1e-13)


def test_rate_is_bandwidth_at_unit_snr():
    # flat pair with kappa G S0 = 1: cn = B |c| ln sqrt(fmax/fmin)
    f_min, f_max = BAND_28
    B = f_max - f_min
    cn = B * 0.5 * 0.5 * math.log(f_max / f_min)
    sc = Scenario.from_cn(f_min, f_max, RAD60, cn)
    G, s0 = flat_solution(sc)
    assert achievable_rate(G, s0, sc) == pytest.approx(B, rel=1e-12)


def test_constant_G_gives_flat_waterfill():
    sc = Scenario(*BAND_60, RAD60, p_r=2e12, freq_bins=128)
    g = 5.0
    s0, mu = waterfill_s0(AngularSpectrum.constant(g, sc.f_c), sc)
    np.testing.assert_allclose(s0.values, sc.p_r / (g * sc.bandwidth), rtol=1e-12)


def test_zero_budget():
    sc = Scenario(*BAND_28, RAD60, p_r=0.0, freq_bins=64)
    s0, mu = waterfill_s0(AngularSpectrum.constant(2.0, sc.f_c), sc)
    assert s0.is_zero() and mu == math.inf
    res = alternating_optimize(flat_solution(sc)[0], sc)
    assert res.rate == 0.0 and res.iterations == 1


def test_dead_direction_is_infeasible():
    sc = Scenario(*BAND_28, RAD60, freq_bins=64)
    G = AngularSpectrum(np.array([20e9, 30e9]), np.array([1.0, 1.0]), sc.f_c)  # misses [13.75, 14.175] GHz
    with pytest.raises(InfeasibleError):
        waterfill_s0(G, sc)


def test_g_update_needs_power_and_regime():
    sc = Scenario(*BAND_28, RAD60, freq_bins=64)
    f = sc.freq_grid()
    with pytest.raises(InfeasibleError):
        optimal_g_given_s0(SampledSpectrum(f, np.zeros_like(f)), sc)
    with pytest.raises(UnsupportedRegimeError):
        optimal_g_given_s0(SampledSpectrum(f, np.ones_like(f)), sc.scaled(theta_c=0.1))


@pytest.mark.parametrize("band", [BAND_28, BAND_60])
def test_flat_s0_gives_flat_g_at_bound(band):
    sc = Scenario.from_cn(*band, RAD60, 1e9)
    s0 = SampledSpectrum.flat(*band, sc.p_r / sc.bandwidth, sc.freq_bins)
    G, mu = optimal_g_given_s0(s0, sc)
    np.testing.assert_allclose(G.values, max_flat_gain(RAD60, *band), rtol=1e-9)
    assert G.omega_grid[0] == pytest.approx(0.5 * band[0], rel=1e-15)
    assert G.omega_grid[-1] == pytest.approx(0.5 * band[1], rel=1e-15)
    assert G.evaluate(0.5 * band[0] * 0.999) == 0.0 and G.evaluate(0.5 * band[1] * 1.001) == 0.0
    assert mu == pytest.approx(flat_multiplier(sc), rel=1e-9)


@pytest.mark.parametrize("deg", [45, 60, 75, 105, 120, 135])
def test_flat_pair_stationary(deg):
    sc = Scenario.from_cn(*BAND_28, math.radians(deg), 1e9)
    G, s0 = flat_solution(sc)
    assert kkt_residual(G, s0, flat_multiplier(sc), sc) < 1e-7
    assert power_gap(G, s0, sc) < 1e-9


def test_perturbed_g_is_not_stationary():
    sc = Scenario.from_cn(*BAND_28, RAD60, 1e9)
    G, s0 = flat_solution(sc)
    v = G.values.copy()
    v[: v.size // 2] *= 1.1
    bumped = AngularSpectrum(G.omega_grid, v, sc.f_c)
    assert kkt_residual(bumped, s0, flat_multiplier(sc), sc) > 1e-3


def test_empty_active_set_residual():
    sc = Scenario(*BAND_28, RAD60, freq_bins=64)
    f = sc.freq_grid()
    G, _ = flat_solution(sc)
    assert kkt_residual(G, SampledSpectrum(f, np.zeros_like(f)), 1.0, sc) == 0.0


def test_waterfill_complementary_slackness():
    sc = Scenario.from_cn(*BAND_60, RAD60, 3e9, freq_bins=256)
    G = step_G(4, sc.f_c)
    s0, mu = waterfill_s0(G, sc)
    f = sc.freq_grid()
    cost = s0_power_weights(G, f, sc.f_min, sc.f_max) / trapezoid_weights(f)   # node-averaged D
    floor = 1 / (sc.kappa * G.evaluate(sc.cos_c * f))
    level = 1 / (mu * cost)
    on = s0.values > 0
    np.testing.assert_allclose(s0.values[on] + floor[on], level[on], rtol=1e-8)
    assert np.all(level[~on] <= floor[~on] * (1 + 1e-12))
    assert power_gap(G, s0, sc) < 1e-9


def test_waterfill_density_matches_pointwise_density():
    # node-averaged D differs from pointwise D only at second order
    sc = Scenario(*BAND_60, RAD60, freq_bins=512)
    G = AngularSpectrum(np.linspace(0, 2 * sc.f_c, 50), np.linspace(1, 3, 50), sc.f_c)
    f = sc.freq_grid()
    avg = s0_power_weights(G, f, sc.f_min, sc.f_max) / trapezoid_weights(f)
    np.testing.assert_allclose(avg[1:-1], angular_power_density(G, f[1:-1]), rtol=1e-4)


@pytest.mark.parametrize("seed", range(20))
def test_waterfill_matches_sort_and_pour(seed):
    r = np.random.default_rng(100 + seed)
    band = BAND_28 if seed % 2 else BAND_60
    deg = float(r.choice([45.0, 60.0, 75.0, 120.0]))
    sc = Scenario.from_cn(*band, math.radians(deg), 10 ** r.uniform(7, 11), freq_bins=64)
    G = step_G(seed, sc.f_c, levels=int(r.integers(2, 6)))
    s0, _ = waterfill_s0(G, sc)
    f = sc.freq_grid()
    gc = G.evaluate(sc.cos_c * f)
    w = trapezoid_weights(f)
    cost = s0_power_weights(G, f, sc.f_min, sc.f_max)
    x = sort_and_pour(w, cost, 1 / (sc.kappa * gc), sc.p_r)
    ref = float(w @ np.log2(1 + sc.kappa * gc * x))
    assert achievable_rate(G, s0, sc) == pytest.approx(ref, rel=1e-6)


def test_alternation_ascends_and_converges():
    sc = Scenario.from_cn(*BAND_60, math.radians(70), 1e10, freq_bins=512)
    res = alternating_optimize(step_G(9, sc.f_c), sc)
    h = np.array(res.rate_history)
    assert np.all(np.diff(h) >= -1e-12 * h[-1])
    assert res.converged and res.power_gap < 1e-9 and res.kkt_residual < 1e-7


def test_flat_start_reaches_stationary_point():
    sc = Scenario.from_cn(*BAND_28, RAD60, 1e8)
    res = alternating_optimize(flat_solution(sc)[0], sc)
    assert res.converged and res.iterations <= 5
    assert res.kkt_residual < 1e-7 and res.power_gap < 1e-9


@pytest.mark.parametrize("deg,cn", [(60, 1e9), (60, 1e11), (70, 3e10)])
def test_alternation_matches_joint_ascent(deg, cn):
    sc = Scenario.from_cn(*BAND_28, math.radians(deg), cn, freq_bins=64)
    G0, s00 = flat_solution(sc)
    ref, info = joint_ascent(sc, G0.values[0], s00.values[0])
    assert info.success
    res = alternating_optimize(G0, sc)
    assert res.rate == pytest.approx(ref, rel=1e-5)


def test_alternation_rejects_wrong_regime():
    sc = Scenario(*BAND_28, 0.0, freq_bins=32)
    with pytest.raises(UnsupportedRegimeError):
        alternating_optimize(AngularSpectrum.constant(1.0, sc.f_c), sc)


# -- properties -------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.floats(1e-3, 1e3))
def test_scale_invariance_waterfill(seed, k):
    sc = Scenario.from_cn(*BAND_60, RAD60, 1e9, freq_bins=64)
    G = step_G(seed, sc.f_c)
    s0, _ = waterfill_s0(G, sc)
    sc2 = sc.scaled(p_r=sc.p_r * k, n0=sc.n0 * k)
    s2, _ = waterfill_s0(G, sc2)
    assert achievable_rate(G, s2, sc2) == pytest.approx(achievable_rate(G, s0, sc), rel=1e-10)
    np.testing.assert_allclose(s2.values / sc2.n0, s0.values / sc.n0, rtol=1e-9, atol=1e-20)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(1e-6, 1e6), target=st.floats(1e-6, 1e6), mu0=st.floats(1e-8, 1e8))
def test_bisection_certificate(a, target, mu0):
    calls = []

    def power(mu):
        calls.append(mu)
        return a / mu + 0.0 * mu

    bis = bisect_multiplier(power, target, mu0=mu0)
    assert bis.power_lo >= target >= bis.power_hi
    assert bis.lo <= bis.mu <= bis.hi and bis.hi / bis.lo - 1 <= 1e-12
    assert bis.mu == pytest.approx(a / target, rel=1e-11)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_water_pour_power_monotone_in_mu(seed):
    sc = Scenario.from_cn(*BAND_28, RAD60, 1e9, freq_bins=64)
    G = step_G(seed, sc.f_c)
    f = sc.freq_grid()
    cost = s0_power_weights(G, f, sc.f_min, sc.f_max)
    w = trapezoid_weights(f)
    fl = 1 / (sc.kappa * G.evaluate(sc.cos_c * f))
    mus = np.geomspace(1e-15, 1e-5, 40)
    p = [cost @ np.maximum(w / (m * cost) - fl, 0) for m in mus]
    assert np.all(np.diff(p) <= 0)
