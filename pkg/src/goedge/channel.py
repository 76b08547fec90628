"""Per-slot flat-fading gains and rate/power/energy conversions.

Gains are block fading: constant within one slot, redrawn (or advanced, for
the correlated generator) at slot boundaries.  ``gain_sq`` always includes
the mean path-loss power gain of the scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ChannelScenario, UEConfig

LN2 = math.log(2.0)


class InfeasibleLinkError(RuntimeError):
    """Raised when a positive rate is requested over a zero-gain link."""


@dataclass(frozen=True)
class ChannelState:
    gain_sq: float
    slot: int


class IidRayleighGain:
    """Memoryless Rayleigh fading: gain_sq = pathloss * unit-mean exponential."""

    def __init__(self, scenario: ChannelScenario, rng: np.random.Generator):
        self.scenario = scenario
        self.rng = rng
        self._slot = -1

    def next_gain(self) -> ChannelState:
        self._slot += 1
        g = self.scenario.pathloss_gain * self.rng.exponential(1.0)
        return ChannelState(gain_sq=g, slot=self._slot)


class ClarkeGain:
    """Sum-of-sinusoids fading with Bessel J0 autocorrelation across slots.

    Each quadrature component is a sum of ``n_sinusoids`` cosines with random
    arrival angles and phases, giving a near-Gaussian complex fade h with
    E|h|^2 = 1 and E[h(t+d) h*(t)] -> J0(2 pi f_D tau d).  Angle sets for the
    two components are drawn independently.
    """

    def __init__(self, scenario: ChannelScenario, rng: np.random.Generator,
                 slot_duration: float, n_sinusoids: int = 64):
        self.scenario = scenario
        self.slot_duration = slot_duration
        fd = scenario.doppler_hz
        if fd is None:
            # Coherence time taken equal to the slot length.
            fd = 1.0 / (2.0 * math.pi * slot_duration)
        self.doppler_hz = fd
        n = n_sinusoids
        self._wi = 2.0 * math.pi * fd * np.cos(rng.uniform(0, 2 * math.pi, n))
        self._wq = 2.0 * math.pi * fd * np.cos(rng.uniform(0, 2 * math.pi, n))
        self._phi = rng.uniform(0, 2 * math.pi, n)
        self._psi = rng.uniform(0, 2 * math.pi, n)
        self._scale = 1.0 / math.sqrt(n)
        self._slot = -1

    def complex_fade(self, slot: int) -> complex:
        t = slot * self.slot_duration
        hi = self._scale * np.sum(np.cos(self._wi * t + self._phi))
        hq = self._scale * np.sum(np.cos(self._wq * t + self._psi))
        return complex(hi, hq)

    def next_gain(self) -> ChannelState:
        self._slot += 1
        h = self.complex_fade(self._slot)
        g = self.scenario.pathloss_gain * (h.real * h.real + h.imag * h.imag)
        return ChannelState(gain_sq=g, slot=self._slot)


def make_gain_generator(scenario: ChannelScenario, rng: np.random.Generator,
                        slot_duration: float):
    if scenario.fading_mode == "iid_rayleigh":
        return IidRayleighGain(scenario, rng)
    if scenario.fading_mode == "clarke":
        return ClarkeGain(scenario, rng, slot_duration)
    raise ValueError(f"unknown fading mode {scenario.fading_mode!r}")


def next_gain(generator) -> ChannelState:
    return generator.next_gain()


def max_rate(state: ChannelState | float, cfg: UEConfig) -> float:
    """Shannon capacity at full transmit power; 0 on a dead link."""
    g = state.gain_sq if isinstance(state, ChannelState) else float(state)
    if g <= 0.0:
        return 0.0
    b = cfg.bandwidth_hz
    snr = cfg.p_tx_max * g / (cfg.channel.noise_psd * b)
    return b * math.log2(1.0 + snr)


def tx_energy(rate: float, state: ChannelState | float, cfg: UEConfig,
              tau: float) -> float:
    """Slot energy to sustain ``rate``, by inverting the capacity formula.

    Zero rate costs nothing; the cost is strictly convex increasing in rate.
    """
    if rate <= 0.0:
        return 0.0
    g = state.gain_sq if isinstance(state, ChannelState) else float(state)
    if g <= 0.0:
        raise InfeasibleLinkError("positive rate on zero-gain link")
    b = cfg.bandwidth_hz
    n0 = cfg.channel.noise_psd
    return tau * b * n0 / g * math.expm1(rate * LN2 / b)


def comp_energy(freq: float, kappa: float, tau: float) -> float:
    """Computation energy for one slot at clock ``freq``: tau * kappa * f^3."""
    return tau * kappa * freq ** 3
