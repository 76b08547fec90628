"""Pure optimization kernels shared by both policies.

Three pieces: the closed-form transmission rate from the KKT conditions of
the per-slot convex rate subproblem, the greedy fractional-knapsack
allocator for the server clock split, and the exhaustive scan over the
server frequency set that combines them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)


@dataclass(frozen=True)
class RateProblem:
    """One device/LUT-row rate subproblem.

    Minimize ``-weight_q * tau * R / w_bits + energy_coeff * E_tx(R)`` over
    ``0 <= R <= r_cap``; ``weight_q`` is the queue-drain gain per DU and
    ``energy_coeff`` the multiplier of the exponential transmit-energy term.
    """

    weight_q: float
    energy_coeff: float
    w_bits: float
    bandwidth: float
    gain_sq: float
    noise_psd: float
    r_cap: float


def rate_cap(q_ue: float, w_bits: float, tau: float, r_max: float) -> float:
    """Cap the rate at the queue-draining level: min(r_max, Q * W / tau)."""
    return min(r_max, q_ue * w_bits / tau)


def optimal_rate(p: RateProblem) -> float:
    """Closed-form minimizer of the relaxed rate subproblem, clamped to [0, r_cap].

    A non-positive drain gain means transmitting can only cost energy, so the
    rate is zero.  A zero energy coefficient makes the objective linear and
    decreasing, so the cap binds.
    """
    if p.weight_q <= 0.0 or p.r_cap <= 0.0 or p.gain_sq <= 0.0:
        return 0.0
    if p.energy_coeff <= 0.0:
        return p.r_cap
    arg = (p.weight_q * p.gain_sq
           / (p.w_bits * p.energy_coeff * LN2 * p.noise_psd))
    if arg <= 0.0:
        return 0.0
    r = p.bandwidth / LN2 * math.log(arg)
    return min(max(r, 0.0), p.r_cap)


@dataclass(frozen=True)
class KnapsackItem:
    key: tuple
    weight: float
    cap: float   # Hz


def knapsack_greedy(items: list[KnapsackItem], budget: float) -> dict:
    """Optimal fractional-knapsack split of ``budget`` across capped items.

    Items are served in descending weight order (key ascending on ties); each
    receives min(remaining budget, cap).  Non-positive weights get nothing,
    which keeps the allocation an LP maximizer of sum(weight * alloc).
    """
    alloc = {}
    remaining = max(0.0, budget)
    for item in sorted(items, key=lambda it: (-it.weight, it.key)):
        if item.weight <= 0.0 or remaining <= 0.0:
            alloc[item.key] = 0.0
            continue
        take = min(remaining, max(0.0, item.cap))
        alloc[item.key] = take
        remaining -= take
    return alloc


def es_allocate(items: list[KnapsackItem], freq_set, energy_weight: float,
                tau: float, kappa: float):
    """Pick the server clock and its split minimizing drain-minus-energy cost.

    For every frequency in the set, the inner split is the greedy knapsack;
    the outer cost is ``-tau * sum(w * f) + tau * energy_weight * kappa * f_s^3``.
    Ties break toward the smaller frequency.
    """
    if not freq_set:
        raise ValueError("empty server frequency set")
    freqs = np.asarray(sorted(freq_set), dtype=float)
    # Greedy value per budget, computed in one pass over the sorted items:
    # each item takes min(cap, budget - caps already taken).
    ordered = sorted(items, key=lambda it: (-it.weight, it.key))
    caps = np.array([max(0.0, it.cap) if it.weight > 0.0 else 0.0
                     for it in ordered])
    weights = np.array([it.weight for it in ordered])
    if len(ordered):
        taken_before = np.concatenate(([0.0], np.cumsum(caps)[:-1]))
        alloc = np.clip(freqs[:, None] - taken_before[None, :], 0.0,
                        caps[None, :])
        values = alloc @ weights
    else:
        values = np.zeros(len(freqs))
    costs = -tau * values + tau * energy_weight * kappa * freqs ** 3
    best = int(np.argmin(costs))   # first minimum: ties go to the smaller f_s
    f_s = float(freqs[best])
    return f_s, knapsack_greedy(items, f_s)
