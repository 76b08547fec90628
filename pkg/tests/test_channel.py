"""Fading generators and the rate/energy conversions."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import j0

from goedge.channel import (ChannelState, ClarkeGain, IidRayleighGain,
                            InfeasibleLinkError, comp_energy,
                            make_gain_generator, max_rate, next_gain, tx_energy)
from goedge.model import ChannelScenario, CHANNEL_PRESETS, UEConfig, ConstraintSet

TAU = 0.05


def scenario(preset="B", **kw):
    base = dict(CHANNEL_PRESETS[preset])
    base.update(kw)
    return ChannelScenario(noise_psd=3.98e-21, **base)


def ue_for(scen, p_tx=0.1):
    return UEConfig(id=0, lut=(), freq_set=(1.4e9,), kappa=1.097e-27,
                    channel=scen, delta=1.0, arrival_mean=2.0,
                    constraints=ConstraintSet(d_avg_s=0.2, g_avg=0.7),
                    p_tx_max=p_tx)


def test_iid_rayleigh_mean_power_matches_pathloss(rng):
    # Law of large numbers: 1e6 unit-mean exponential draws, 1% tolerance.
    gen = IidRayleighGain(scenario("B"), rng)
    draws = np.array([gen.next_gain().gain_sq for _ in range(10 ** 6)])
    assert draws.mean() == pytest.approx(2.72e-14, rel=0.01)


def test_clarke_zero_doppler_is_constant(rng):
    gen = ClarkeGain(scenario("A", fading_mode="clarke", doppler_hz=0.0),
                     rng, TAU)
    gains = [gen.next_gain().gain_sq for _ in range(50)]
    assert max(gains) == pytest.approx(min(gains), rel=1e-12)


def test_clarke_lag1_autocorrelation_matches_bessel():
    # Oracle: J0(2 pi f_D tau).  Pool several independent generators so the
    # finite-sinusoid angle error averages out; 1e5 slots in total.
    scen = scenario("A", fading_mode="clarke", doppler_hz=None)
    fd = 1.0 / (2.0 * math.pi * TAU)
    expected = j0(2.0 * math.pi * fd * TAU)
    root = np.random.SeedSequence(7)
    num = 0.0
    den = 0.0
    for seq in root.spawn(20):
        gen = ClarkeGain(scen, np.random.default_rng(seq), TAU)
        h = np.array([gen.complex_fade(t) for t in range(5000)])
        num += np.real(np.vdot(h[:-1], h[1:]))
        den += np.real(np.vdot(h, h))
    assert num / den == pytest.approx(expected, abs=0.02)


def test_make_gain_generator_dispatch(rng):
    assert isinstance(make_gain_generator(scenario("B"), rng, TAU), IidRayleighGain)
    clarke = scenario("B", fading_mode="clarke")
    assert isinstance(make_gain_generator(clarke, rng, TAU), ClarkeGain)
    state = next_gain(make_gain_generator(scenario("B"), rng, TAU))
    assert state.slot == 0 and state.gain_sq >= 0


def test_max_rate_dead_channel_is_zero():
    cfg = ue_for(scenario("B"))
    assert max_rate(ChannelState(0.0, 0), cfg) == 0.0


def test_max_rate_against_high_precision_oracle():
    # mpmath, 50 digits: B*log2(1 + 0.1*1.06e-10 / (3.98e-21*2.5e6))
    cfg = ue_for(scenario("A"))
    got = max_rate(ChannelState(1.06e-10, 0), cfg)
    assert got == pytest.approx(25146084.278446125, rel=1e-12)


@given(st.floats(1e-16, 1e-8), st.floats(0.01, 1.0))
def test_max_rate_monotone_in_power(gain, p):
    cfg1 = ue_for(scenario("A"), p_tx=p)
    cfg2 = ue_for(scenario("A"), p_tx=2 * p)
    s = ChannelState(gain, 0)
    assert max_rate(s, cfg2) >= max_rate(s, cfg1)


def test_tx_energy_zero_rate_costs_nothing():
    cfg = ue_for(scenario("B"))
    assert tx_energy(0.0, ChannelState(1e-14, 0), cfg, TAU) == 0.0


def test_tx_energy_dead_link_raises():
    cfg = ue_for(scenario("B"))
    with pytest.raises(InfeasibleLinkError):
        tx_energy(1e5, ChannelState(0.0, 0), cfg, TAU)


@given(st.floats(1e-16, 1e-8), st.floats(1e-3, 1.0))
def test_tx_energy_inverts_capacity(gain, p):
    # Transmitting at the full-power capacity for the slot must cost tau * p.
    cfg = ue_for(scenario("A"), p_tx=p)
    s = ChannelState(gain, 0)
    assert tx_energy(max_rate(s, cfg), s, cfg, TAU) == pytest.approx(
        TAU * p, rel=1e-9)


@given(st.floats(1e3, 1e7), st.floats(1e3, 1e7), st.floats(1e-15, 1e-9))
def test_tx_energy_convex_in_rate(r1, r2, gain):
    cfg = ue_for(scenario("A"))
    s = ChannelState(gain, 0)
    mid = tx_energy(0.5 * (r1 + r2), s, cfg, TAU)
    assert mid <= 0.5 * (tx_energy(r1, s, cfg, TAU) + tx_energy(r2, s, cfg, TAU)) \
        * (1 + 1e-12)


def test_comp_energy_values():
    assert comp_energy(0.0, 1.097e-27, TAU) == 0.0
    assert comp_energy(1.4e9, 1.097e-27, TAU) == pytest.approx(
        TAU * 1.097e-27 * 1.4e9 ** 3, rel=1e-12)


@given(st.floats(1e6, 1e10))
def test_comp_energy_cubic_scaling(f):
    assert comp_energy(2 * f, 1e-27, TAU) == pytest.approx(
        8 * comp_energy(f, 1e-27, TAU), rel=1e-12)
