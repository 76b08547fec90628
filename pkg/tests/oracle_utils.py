"""Independent brute-force pricing of per-slot device decisions.

Re-derives the slot cost from the problem definition (floors, clamps, and
energy formulas written out directly) so the policy implementations can be
checked end to end: the policy's emitted action is priced HERE and compared
against a dense grid search priced HERE.
"""

import math

import numpy as np

LN2 = math.log(2.0)


def ue_slot_cost(cfg, tau, gamma, q_ue, q_es, p_hat, z, d, i, f_d, rate,
                 energy_coeff, acc_weight, gain):
    """Exact drift-plus-penalty slot cost of one device action.

    Drain credit is capped at the queue content; the server-queue coupling
    only applies to DUs actually entering a server queue (offload slots).
    """
    prof = cfg.lut[i]
    mu = cfg.step_sizes.mu
    l_k = len(cfg.lut)
    w = prof.pixels * prof.bits_per_pixel
    e_comp = tau * cfg.kappa * f_d ** 3
    if d == 1:
        if rate > 0 and gain <= 0:
            return math.inf
        if rate > 0:
            setup = 1.0 / (f_d * prof.j_offload)
            n = max(0, math.floor((tau - setup) * rate / w))
            b = cfg.bandwidth_hz
            e_tx = (tau * b * cfg.channel.noise_psd / gain
                    * math.expm1(rate * LN2 / b))
        else:
            n, e_tx = 0, 0.0
        moved = min(n, int(q_ue))
        return (-l_k * mu * mu * q_ue * moved
                + l_k * mu * mu * p_hat[i] * q_es[i] * moved
                + mu * z * max(0.0, q_ue - n)
                - acc_weight * prof.accuracy
                + energy_coeff * (e_tx + e_comp))
    n = math.floor(tau * f_d * prof.j_local)
    n_eff = min(n, int(q_ue))
    return (-l_k * mu * mu * q_ue * n_eff
            + mu * z * max(0.0, q_ue - n)
            - acc_weight * prof.accuracy
            + energy_coeff * e_comp)


def grid_min_cost(cfg, tau, gamma, q_ue, q_es, p_hat, z, energy_coeff,
                  acc_weight, gain, n_rates=10_000, force_offload=False):
    """Dense exhaustive search over (d, row, clock) x rate grid."""
    best = math.inf
    b = cfg.bandwidth_hz
    snr = cfg.p_tx_max * gain / (cfg.channel.noise_psd * b) if gain > 0 else 0.0
    r_max = b * math.log2(1.0 + snr) if snr > 0 else 0.0
    for i, prof in enumerate(cfg.lut):
        w = prof.pixels * prof.bits_per_pixel
        for f_d in cfg.freq_set:
            if not force_offload:
                c0 = ue_slot_cost(cfg, tau, gamma, q_ue, q_es, p_hat, z, 0, i,
                                  f_d, 0.0, energy_coeff, acc_weight, gain)
                best = min(best, c0)
            cap = min(r_max, q_ue * w / tau, w * f_d * prof.j_offload)
            if cap <= 0.0:
                rates = np.array([0.0])
            else:
                rates = np.linspace(0.0, cap, n_rates)
            setup = 1.0 / (f_d * prof.j_offload)
            n = np.floor((tau - setup) * rates / w)
            n = np.clip(n, 0, None)
            n = np.where(rates > 0, n, 0).astype(np.int64)
            moved = np.minimum(n, int(q_ue))
            if gain > 0:
                e_tx = (tau * b * cfg.channel.noise_psd / gain
                        * np.expm1(rates * LN2 / b))
            else:
                e_tx = np.zeros_like(rates)
            mu = cfg.step_sizes.mu
            l_k = len(cfg.lut)
            cost = (-l_k * mu * mu * q_ue * moved
                    + l_k * mu * mu * p_hat[i] * q_es[i] * moved
                    + mu * z * np.maximum(0.0, q_ue - n)
                    - acc_weight * prof.accuracy
                    + energy_coeff * (e_tx + tau * cfg.kappa * f_d ** 3))
            best = min(best, float(cost.min()))
    return best


def price_action(cfg, tau, gamma, state, k, action, energy_coeff, acc_weight):
    return ue_slot_cost(cfg, tau, gamma, float(state.q_ue[k]), state.q_es[k],
                        state.p_hat[k], float(state.z[k]), action.d,
                        action.rho_index, action.f_d, action.rate,
                        energy_coeff, acc_weight, float(state.gain_sq[k]))
