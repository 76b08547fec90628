"""Per-slot decision rules: drift-plus-penalty strategies and static baselines.

Each device solves a small mixed-integer problem every slot: offload or not,
which LUT row, which clock frequency, and (when offloading) which rate.  For
a fixed row and frequency the rate subproblem is convex with a closed-form
optimum; rows and frequencies are searched exhaustively.  The transmitted-DU
count is a step function of the rate, so the closed-form rate is refined to
the exact step boundaries around the continuous minimizer, which makes the
chosen action optimal for the true floored objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .channel import LN2, comp_energy, max_rate, tx_energy
from .model import ConfigError, UEConfig
from .queueing import n_local, n_offload
from .solvers import KnapsackItem, es_allocate

# Relative nudge keeping floor(rate * avail / W) stable at step boundaries.
_RATE_NUDGE = 1.0 + 1e-12


@dataclass(frozen=True)
class UEAction:
    d: int             # 1 = offload, 0 = local
    rho_index: int     # LUT row (ES queues are keyed by row, not by rho)
    rho: int
    f_d: float         # Hz
    rate: float        # bits/s, 0 when d = 0


@dataclass(frozen=True)
class ESAction:
    f_s: float
    f_split: dict      # (ue index, LUT row) -> Hz


@dataclass(frozen=True)
class SlotState:
    """Immutable snapshot a policy sees at the start of a slot."""

    slot: int
    gain_sq: np.ndarray      # (K,)
    q_ue: np.ndarray         # (K,) int
    q_es: list               # per UE: (L_k,) int
    z: np.ndarray            # (K,)
    y: np.ndarray            # (K,)
    s: np.ndarray            # (K,)
    o: float
    p_hat: list              # per UE: (L_k,)


class _Grids:
    """Slot-invariant search arrays for one device configuration."""

    def __init__(self, cfg: UEConfig, tau: float):
        lut = cfg.lut
        self.w = np.array([p.w_bits for p in lut])
        self.g_acc = np.array([p.accuracy for p in lut])
        jd = np.array([p.j_offload for p in lut])
        jl = np.array([p.j_local for p in lut])
        self.f = np.asarray(cfg.freq_set)
        self.n_l, self.n_f = len(lut), len(self.f)
        self.e_comp = tau * cfg.kappa * self.f ** 3                 # (F,)
        self.n_loc = np.floor(tau * np.outer(jl, self.f)).astype(np.int64)
        self.cap_compress = np.outer(self.w * jd, self.f)           # (L, F)
        avail = tau - 1.0 / np.outer(jd, self.f)                    # setup left
        usable = avail > 0.0
        self.avail = np.where(usable, avail, 0.0)
        # Rate granting one more DU per slot; 0 marks unusable pairs (their
        # candidate counts stay 0, so the rate never multiplies them).
        self.step = np.where(usable, self.w[:, None] / np.where(usable, avail, 1.0), 0.0)
        self.a = LN2 / cfg.bandwidth_hz


_GRID_CACHE: dict = {}


def _grids(cfg: UEConfig, tau: float) -> _Grids:
    key = (id(cfg), tau)
    hit = _GRID_CACHE.get(key)
    if hit is None or hit[0] is not cfg:
        if len(_GRID_CACHE) > 256:
            _GRID_CACHE.clear()
        hit = (cfg, _Grids(cfg, tau))
        _GRID_CACHE[key] = hit
    return hit[1]


def _local_costs(cfg: UEConfig, tau, q_ue, z, energy_coeff, acc_weight):
    """Slot cost of every (row, clock) pair for on-device processing, (L, F).

    Drain credit is capped at the queue content, the local analogue of the
    draining-rate cap on the transmit side; only DUs actually present can
    leave the queue.
    """
    gr = _grids(cfg, tau)
    mu = cfg.step_sizes.mu
    n_eff = np.minimum(gr.n_loc, q_ue)
    return (-cfg.n_profiles * mu * mu * q_ue * n_eff
            + mu * z * np.maximum(0.0, q_ue - gr.n_loc)
            - acc_weight * gr.g_acc[:, None]
            + energy_coeff * gr.e_comp[None, :])


def _ue_step(k, state: SlotState, cfg: UEConfig, tau, energy_coeff, acc_weight,
             force_offload):
    """Shared exhaustive search for both drift-plus-penalty strategies.

    ``energy_coeff`` multiplies the device energy in the slot cost and
    ``acc_weight`` multiplies the selected row's accuracy (negatively).
    Returns the chosen action and its exact slot cost.
    """
    gr = _grids(cfg, tau)
    n_l, n_f = gr.n_l, gr.n_f
    mu = cfg.step_sizes.mu
    l_k = cfg.n_profiles
    q_ue = float(state.q_ue[k])
    z = float(state.z[k])
    gain = float(state.gain_sq[k])

    acc_term = -acc_weight * gr.g_acc                         # (L,)
    e_comp = energy_coeff * gr.e_comp                         # (F,)
    cost0 = _local_costs(cfg, tau, q_ue, z, energy_coeff, acc_weight)

    # Offload branch.
    r_max = max_rate(gain, cfg)
    cap = np.minimum(np.minimum(r_max, q_ue * gr.w / tau)[:, None],
                     gr.cap_compress)                         # (L, F)
    n_max = np.where((gr.avail > 0.0) & (cap > 0.0),
                     np.floor(gr.avail * cap / gr.w[:, None]), 0.0)
    n_max = n_max.astype(np.int64)

    qtx = l_k * mu * mu * (q_ue - state.p_hat[k] * state.q_es[k]) + mu * z
    ec_raw = (tau * cfg.bandwidth_hz * cfg.channel.noise_psd / gain
              if gain > 0.0 else 0.0)

    # Candidate DU counts: 0, the step neighbors of the continuous optimum,
    # and the cap.  The cost is convex in the count, so these suffice.
    cands = np.zeros((4, n_l, n_f), dtype=np.int64)
    cands[3] = n_max
    if energy_coeff > 0.0 and ec_raw > 0.0:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            x_star = np.log(qtx[:, None] / (energy_coeff * ec_raw * gr.a * gr.step)) \
                / (gr.a * gr.step)
        x_star = np.nan_to_num(x_star, nan=0.0, posinf=2 ** 53, neginf=0.0)
        x_star = np.where(qtx[:, None] > 0.0, x_star, 0.0)
        cands[1] = np.clip(np.floor(x_star), 0, n_max).astype(np.int64)
        cands[2] = np.clip(np.ceil(x_star), 0, n_max).astype(np.int64)
    elif energy_coeff <= 0.0:
        cands[1] = np.where(qtx[:, None] > 0.0, n_max, 0)
    cands.sort(axis=0)   # ascending so argmin breaks ties toward fewer DUs

    rate_c = np.minimum(cands * (gr.step[None, :, :] * _RATE_NUDGE),
                        cap[None, :, :])
    if energy_coeff <= 0.0:
        # Energy-free limit: any rate in the top step costs the same, take
        # the full cap.
        rate_c = np.where((cands == n_max[None]) & (cands > 0),
                          cap[None, :, :], rate_c)
    e_tx = energy_coeff * ec_raw * np.expm1(gr.a * rate_c)
    cost_c = (-cands * qtx[None, :, None] + e_tx).reshape(4, -1)
    pick = np.argmin(cost_c, axis=0)
    cols = np.arange(n_l * n_f)
    tx_cost = cost_c[pick, cols].reshape(n_l, n_f)
    tx_rate = rate_c.reshape(4, -1)[pick, cols].reshape(n_l, n_f)
    cost1 = (tx_cost + mu * z * q_ue + acc_term[:, None] + e_comp[None, :])

    flat1 = int(np.argmin(cost1))
    i1, j1 = divmod(flat1, n_f)
    min1 = float(cost1[i1, j1])
    if force_offload:
        d = 1
    else:
        flat0 = int(np.argmin(cost0))
        i0, j0 = divmod(flat0, n_f)
        min0 = float(cost0[i0, j0])
        d = 1 if min1 < min0 else 0   # ties resolve to local
    if d == 1:
        act = UEAction(1, i1, cfg.lut[i1].rho, float(gr.f[j1]),
                       float(tx_rate[i1, j1]))
        return act, min1
    act = UEAction(0, i0, cfg.lut[i0].rho, float(gr.f[j0]), 0.0)
    return act, min0


def meda_ue_step(k, state: SlotState, fleet, es_cfg, sim):
    """Energy-minimizing device step: energy weighted by V*gamma*delta_k."""
    cfg = fleet[k]
    ec = sim.v * es_cfg.gamma * cfg.delta
    aw = cfg.step_sizes.nu * float(state.y[k])
    return _ue_step(k, state, cfg, sim.slot_duration, ec, aw, sim.force_offload)


def made_ue_step(k, state: SlotState, fleet, es_cfg, sim):
    """Accuracy-maximizing device step: energy priced by the S virtual queue."""
    cfg = fleet[k]
    ec = cfg.step_sizes.lam * float(state.s[k])
    aw = sim.v
    return _ue_step(k, state, cfg, sim.slot_duration, ec, aw, sim.force_offload)


def _es_items(state: SlotState, fleet, tau, use_drain_pressure):
    items = []
    for k, ue in enumerate(fleet):
        mu = ue.step_sizes.mu
        l_k = ue.n_profiles
        for i, prof in enumerate(ue.lut):
            q = float(state.q_es[k][i])
            if use_drain_pressure:
                weight = (l_k * mu * mu * q + mu * float(state.z[k])) * prof.j_server
            else:
                weight = q * prof.j_server
            cap = q / (tau * prof.j_server)
            items.append(KnapsackItem(key=(k, i), weight=weight, cap=cap))
    return items


def meda_es_step(state: SlotState, fleet, es_cfg, sim) -> ESAction:
    items = _es_items(state, fleet, sim.slot_duration, use_drain_pressure=True)
    f_s, alloc = es_allocate(items, es_cfg.freq_set,
                             sim.v * (1.0 - es_cfg.gamma),
                             sim.slot_duration, es_cfg.kappa)
    return ESAction(f_s=f_s, f_split=alloc)


def made_es_step(state: SlotState, fleet, es_cfg, sim) -> ESAction:
    items = _es_items(state, fleet, sim.slot_duration, use_drain_pressure=False)
    f_s, alloc = es_allocate(items, es_cfg.freq_set,
                             es_cfg.eta * state.o,
                             sim.slot_duration, es_cfg.kappa)
    return ESAction(f_s=f_s, f_split=alloc)


def restrict_to_rho(cfg: UEConfig, rho_fixed: int) -> UEConfig:
    rows = tuple(p for p in cfg.lut if p.rho == rho_fixed)
    if not rows:
        raise ConfigError(f"ues[{cfg.id}].lut", f"no row with rho={rho_fixed}")
    return replace(cfg, lut=rows)


def fixed_accuracy_step(k, state: SlotState, fleet, es_cfg, sim, rho_fixed):
    """Energy-minimizing step with the LUT pinned to a single compression factor.

    Rows not matching ``rho_fixed`` are masked out; the returned action's
    ``rho_index`` refers to the caller's full LUT.  Engine runs restrict the
    configuration once at setup instead, which is equivalent.
    """
    cfg = fleet[k]
    keep = [i for i, p in enumerate(cfg.lut) if p.rho == rho_fixed]
    if not keep:
        raise ConfigError(f"ues[{cfg.id}].lut", f"no row with rho={rho_fixed}")
    cfg_r = replace(cfg, lut=tuple(cfg.lut[i] for i in keep))
    state_r = replace(state,
                      q_es=[state.q_es[j][keep] if j == k else state.q_es[j]
                            for j in range(len(fleet))],
                      p_hat=[state.p_hat[j][keep] if j == k else state.p_hat[j]
                             for j in range(len(fleet))])
    ec = sim.v * es_cfg.gamma * cfg.delta
    aw = cfg.step_sizes.nu * float(state.y[k])
    act, cost = _ue_step(k, state_r, cfg_r, sim.slot_duration, ec, aw,
                         sim.force_offload)
    return replace(act, rho_index=keep[act.rho_index]), cost


def _exact_offload_cost(cfg, tau, q_ue, q_es_i, p_i, z, mu, l_k, rate, prof,
                        f_d, gain, energy_coeff, acc_weight):
    """Slot cost of an offload action without the rate-cap simplifications.

    Drain credit and the server-queue feed both use the DUs actually moved,
    min(offered, queued).
    """
    n = n_offload(prof, f_d, rate, tau)
    moved = min(n, int(q_ue))
    e = energy_coeff * (tx_energy(rate, gain, cfg, tau)
                        + comp_energy(f_d, cfg.kappa, tau))
    return (-l_k * mu * mu * q_ue * moved + l_k * mu * mu * p_i * q_es_i * moved
            + mu * z * max(0.0, q_ue - n) - acc_weight * prof.accuracy + e)


def hybrid_fixed_rate_step(k, state: SlotState, fleet, es_cfg, sim, fixed_rate):
    """Fixed-rate baseline: the rate is precomputed, only (row, clock) adapt.

    Slots where the fixed rate exceeds the instantaneous capacity fall back
    to local processing (the fixed power budget cannot sustain the rate).
    """
    cfg = fleet[k]
    tau = sim.slot_duration
    ec = sim.v * es_cfg.gamma * cfg.delta
    aw = cfg.step_sizes.nu * float(state.y[k])
    gain = float(state.gain_sq[k])
    mu = cfg.step_sizes.mu
    l_k = cfg.n_profiles
    q_ue = float(state.q_ue[k])
    z = float(state.z[k])

    cost0 = _local_costs(cfg, tau, q_ue, z, ec, aw)
    flat0 = int(np.argmin(cost0))
    i0, j0 = divmod(flat0, len(cfg.freq_set))
    best0 = (float(cost0[i0, j0]), i0, cfg.freq_set[j0])

    best1 = None
    if 0.0 < fixed_rate <= max_rate(gain, cfg):
        for i, prof in enumerate(cfg.lut):
            for f_d in cfg.freq_set:
                if fixed_rate > prof.w_bits * f_d * prof.j_offload * (1.0 + 1e-12):
                    continue   # compression cannot keep up with the fixed rate
                c = _exact_offload_cost(cfg, tau, q_ue, float(state.q_es[k][i]),
                                        float(state.p_hat[k][i]), z, mu, l_k,
                                        fixed_rate, prof, f_d, gain, ec, aw)
                if best1 is None or c < best1[0]:
                    best1 = (c, i, f_d)
    if best1 is not None and best1[0] < best0[0]:
        c, i, f_d = best1
        return UEAction(1, i, cfg.lut[i].rho, float(f_d), float(fixed_rate)), c
    c, i, f_d = best0
    return UEAction(0, i, cfg.lut[i].rho, float(f_d), 0.0), c


def ergodic_capacity(cfg: UEConfig, p_tx: float) -> float:
    """Mean Shannon rate over the unit-mean exponential Rayleigh power gain."""
    b = cfg.bandwidth_hz
    snr_scale = p_tx * cfg.channel.pathloss_gain / (cfg.channel.noise_psd * b)

    def integrand(g):
        return math.log1p(snr_scale * g) * math.exp(-g)

    val, _ = quad(integrand, 0.0, np.inf, limit=200)
    return b * val / LN2


def min_stable_rate(cfg: UEConfig, tau: float) -> float:
    """Smallest fixed rate whose per-slot DU throughput covers the arrivals.

    The reference compression is the most compressed row that still meets the
    device's accuracy target (fewest bits at compliant accuracy); without an
    accuracy target, the most accurate row.  The slot budget excludes the
    first DU's compression time at the cheapest clock able to compress the
    required count, since transmission starts only then.  Feasibility is
    checked against the Rayleigh ergodic capacity at full power.
    """
    if cfg.arrival_mean <= 0.0:
        return 0.0
    g_avg = cfg.constraints.g_avg
    eligible = [p for p in cfg.lut if g_avg is None or p.accuracy >= g_avg]
    if eligible:
        ref = max(eligible, key=lambda p: (p.rho, -p.w_bits))
    else:
        ref = max(cfg.lut, key=lambda p: p.accuracy)
    n_req = math.ceil(cfg.arrival_mean)
    # The fastest clock minimizes the setup share of the slot, hence the rate.
    setup = 1.0 / (max(cfg.freq_set) * ref.j_offload)
    if setup >= tau:
        raise ConfigError(f"ues[{cfg.id}]",
                          "slot too short to compress even one DU at max clock")
    rate = n_req * ref.w_bits / (tau - setup) * _RATE_NUDGE
    if ergodic_capacity(cfg, cfg.p_tx_max) < rate:
        raise ConfigError(f"ues[{cfg.id}]",
                          "fixed-rate baseline infeasible at p_tx_max")
    return rate
