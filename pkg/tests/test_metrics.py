import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subnetsim.beamforming import stack_subnetwork_channel, zf_matrix
from subnetsim.channel import build_channel_state
from subnetsim.config import SimConfig
from subnetsim.metrics import (
    evaluate_all_sensors,
    fbl_rate,
    noise_power,
    q_inv,
    sensor_powers,
    sinr,
    watt_to_dbm,
)
from subnetsim.topology import build_topology

CFG = SimConfig(num_subnetworks=1, aps_per_subnetwork=20)


def q_inv_bisection(p, lo=-40.0, hi=40.0):
    """Independent oracle: bisection on Q(x) = erfc(x / sqrt 2) / 2."""
    if p > 0.5:
        # erfc near 2 loses digits; 1 - p is exact here
        return -q_inv_bisection(1.0 - p, lo, hi)
    q = lambda x: 0.5 * math.erfc(x / math.sqrt(2.0))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if q(mid) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# finite-blocklength rate at Gamma = 10, factory-hall parameters, 40-digit mpmath
FBL_RATE_GAMMA10 = 134514003.75496690814


def test_fbl_oracle_value_frozen():
    mpmath.mp.dps = 40
    q = -mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf("1e-6") - 1)
    r = mpmath.mpf("0.4") * 1e8 * (mpmath.log(11, 2) - mpmath.sqrt(1 - mpmath.mpf(1) / 121)
                                   * q / mpmath.sqrt(5000) * mpmath.log(mpmath.e, 2))
    assert float(r) == pytest.approx(FBL_RATE_GAMMA10, rel=1e-15)


def test_noise_power():
    n = noise_power(CFG)
    assert watt_to_dbm(n) == pytest.approx(-85.0, abs=1e-9)
    assert n == pytest.approx(3.162e-12, rel=1e-3)
    assert watt_to_dbm(noise_power(CFG.replace(noise_figure_db=0.0, bandwidth_hz=1.0))) == \
        pytest.approx(-174.0, abs=1e-9)
    doubled = noise_power(CFG.replace(bandwidth_hz=2e8))
    assert watt_to_dbm(doubled) - watt_to_dbm(n) == pytest.approx(10 * math.log10(2), abs=1e-12)


@pytest.mark.parametrize("p, expected", [(0.5, 0.0), (1e-6, 4.753424), (0.975, -1.959964)])
def test_q_inv_reference_points(p, expected):
    assert q_inv(p) == pytest.approx(expected, abs=1e-6)
    assert q_inv(p) == pytest.approx(q_inv_bisection(p), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-12, 1 - 1e-12))
def test_q_inv_against_bisection(p):
    assert abs(q_inv(p) - q_inv_bisection(p)) < 1e-9


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_q_inv_domain(p):
    with pytest.raises(ValueError):
        q_inv(p)


def test_fbl_rate_points():
    assert fbl_rate(0.0, CFG) == 0.0
    assert fbl_rate(10.0, CFG) == pytest.approx(FBL_RATE_GAMMA10, rel=1e-12)
    long_packets = CFG.replace(packet_duration_s=1e6)
    assert fbl_rate(10.0, long_packets) == pytest.approx(0.4 * 1e8 * math.log2(11), rel=1e-5)


def test_fbl_rate_clamps_negative():
    # tiny SINR: dispersion penalty exceeds capacity
    assert fbl_rate(1e-3, CFG) == 0.0
    with pytest.raises(ValueError):
        fbl_rate(-1.0, CFG)


def test_fbl_rate_monotone_and_below_shannon():
    g = np.concatenate(([0.0], np.logspace(-4, 4, 5000)))
    r = fbl_rate(g, CFG)
    assert np.all(np.diff(r) >= 0)
    assert np.all(r <= 0.4 * 1e8 * np.log2(1 + g))


def test_sinr_cases():
    assert sinr(1.0, 0.0, 0.0, 1.0, 1.0) == 1.0
    assert sinr(0.0, 0.3, 0.2, 1.0, 1.0) == 0.0
    # interference-limited with p_ui = p_signal
    assert sinr(1.0, 1e-20, 1.0, 1.0, 1e-12) == pytest.approx(1.0, rel=1e-9)


def _state(B, A_b, seed=0):
    cfg = SimConfig(num_subnetworks=B, aps_per_subnetwork=A_b)
    rng = np.random.default_rng(seed)
    return cfg, build_channel_state(build_topology(cfg, rng), cfg, rng)


def test_single_subnetwork_has_no_ui():
    cfg, state = _state(1, 20)
    F = zf_matrix(stack_subnetwork_channel(state, 0))
    mu = np.full(5, 1e-3)
    for o in range(5):
        ps, pci, pui = sensor_powers(F, state, mu, 0, o)
        assert pui == 0.0
        assert pci < 1e-15 * ps
        assert ps == pytest.approx(1e-3, rel=1e-9)


def test_cloned_interferer_gives_equal_ui():
    cfg, state = _state(2, 20, seed=3)
    h = state.h.copy()
    h[5] = h[0]  # sensor 0 of sub-network 1 sees exactly sub-network 0's first channel
    from subnetsim.channel import ChannelState

    cloned = ChannelState(2, state.beta, state.los, state.pathloss_db, state.shadow_db,
                          h / np.sqrt(state.beta)[..., None])
    F = zf_matrix(stack_subnetwork_channel(cloned, 0))
    mu = np.zeros(10)
    mu[0] = mu[5] = 2e-3
    ps, pci, pui = sensor_powers(F, cloned, mu, 0, 0)
    assert pui == pytest.approx(ps, rel=1e-9)


def test_evaluate_all_sensors_b1_interference_free(backend):
    cfg, state = _state(1, 20)
    m = evaluate_all_sensors(state, np.full(5, 10 ** (-4.5)), noise_power(cfg), cfg, (), backend)
    assert len(m) == 5
    assert np.all(m.p_ui == 0.0)
    assert np.all(m.rate_bps > 0) and not m.deferred.any()


def test_evaluate_all_deferred(backend):
    cfg, state = _state(4, 5)
    m = evaluate_all_sensors(state, np.full(20, 1e-4), noise_power(cfg), cfg, range(4), backend)
    assert np.all(m.rate_bps == 0) and m.deferred.all() and np.all(m.sinr == 0)


def test_sinr_decomposition_matches_independent_recompute(backend):
    cfg, state = _state(6, 5, seed=4)
    mu = np.random.default_rng(0).uniform(1e-5, 1e-3, 30)
    noise = noise_power(cfg)
    deferred = {2}
    m = evaluate_all_sensors(state, mu, noise, cfg, deferred, backend)
    radiating = np.repeat([b not in deferred for b in range(6)], 5)
    for b in range(6):
        if b in deferred:
            continue
        F = zf_matrix(stack_subnetwork_channel(state, b))
        for k in range(5):
            ps, pci, pui = sensor_powers(F, state, mu, b, k, radiating)
            o = b * 5 + k
            assert m.p_signal[o] == pytest.approx(ps, rel=1e-12)
            assert m.p_ui[o] == pytest.approx(pui, rel=1e-12)
            assert m.p_ci[o] <= 1e-12 * ps
            g = ps / (pci + pui + noise * np.linalg.norm(F[:, k]) ** 2)
            assert m.sinr[o] == pytest.approx(g, rel=1e-12)
            assert m.rate_bps[o] == pytest.approx(fbl_rate(g, cfg), rel=1e-12)


def test_deferred_interference_switch(backend):
    cfg, state = _state(3, 20, seed=5)
    mu = np.full(15, 1e-3)
    noise = noise_power(cfg)
    silent = evaluate_all_sensors(state, mu, noise, cfg, {1}, backend)
    loud = evaluate_all_sensors(state, mu, noise, cfg.replace(include_deferred_interference=True),
                                {1}, backend)
    live = ~silent.deferred
    assert np.all(loud.p_ui[live] > silent.p_ui[live])
    assert np.all(loud.rate_bps[~live] == 0)


def test_power_scaling(backend):
    cfg, state = _state(4, 5, seed=6)
    mu = np.random.default_rng(1).uniform(1e-5, 1e-3, 20)
    a = evaluate_all_sensors(state, mu, 1e-30, cfg, (), backend)
    b = evaluate_all_sensors(state, 10 * mu, 1e-30, cfg, (), backend)
    np.testing.assert_allclose(b.p_signal, 10 * a.p_signal, rtol=1e-12)
    np.testing.assert_allclose(b.p_ui, 10 * a.p_ui, rtol=1e-12)
    np.testing.assert_allclose(b.p_ci, 10 * a.p_ci, rtol=1e-6, atol=1e-30)
    np.testing.assert_allclose(b.sinr, a.sinr, rtol=1e-9)
