"""Physical and virtual queues, slot updates, and the Little's-law mapping.

Physical queues hold integer DU counts: one transmission/computation queue
per device, plus one server-side computation queue per (device, LUT row).
Virtual queues accumulate constraint violations; their mean-rate stability
is what enforces the long-term delay, accuracy, and energy targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import CompressionProfile, UEConfig


class ContractError(ValueError):
    """An action violated a precondition the solver should have enforced."""


def n_offload(profile: CompressionProfile, f_d: float, rate: float,
              tau: float) -> int:
    """DUs that can be compressed and transmitted within one slot.

    The first DU must finish compressing before transmission starts, hence
    the setup term 1/(f_d * j_offload).  Requires rate <= W * f_d * j_offload
    so that compression keeps up with the link.
    """
    if rate <= 0.0:
        return 0
    if f_d <= 0.0:
        raise ContractError("offloading with zero clock frequency")
    w = profile.w_bits
    if rate > w * f_d * profile.j_offload * (1.0 + 1e-9):
        raise ContractError(
            f"rate {rate:g} exceeds compression throughput "
            f"{w * f_d * profile.j_offload:g}")
    setup = 1.0 / (f_d * profile.j_offload)
    n = math.floor((tau - setup) * rate / w)
    return max(0, n)


def n_local(profile: CompressionProfile, f_d: float, tau: float) -> int:
    """DUs that can be compressed and classified on the device in one slot."""
    if f_d <= 0.0:
        return 0
    return math.floor(tau * f_d * profile.j_local)


def n_server(profile: CompressionProfile, f_ki: float, tau: float) -> int:
    """DUs the server can classify in one slot at clock share ``f_ki``."""
    if f_ki <= 0.0:
        return 0
    return math.floor(tau * f_ki * profile.j_server)


def delay_estimate(avg_q_tot: float, arrival_mean: float, tau: float) -> float:
    """Little's law: average delay = average backlog / arrival rate."""
    if avg_q_tot == 0.0:
        return 0.0
    if arrival_mean <= 0.0:
        return math.inf
    return avg_q_tot / (arrival_mean / tau)


def lemma1_margin(x_prev: float, x_next: float, increment: float) -> float:
    """Slack of the one-step quadratic drift bound for a clamped queue.

    For X(t+1) = max(0, X(t) + u), the drift (X(t+1)^2 - X(t)^2)/2 never
    exceeds u^2/2 + X(t) u.  Returns bound minus realized drift.
    """
    drift = 0.5 * (x_next * x_next - x_prev * x_prev)
    bound = 0.5 * increment * increment + x_prev * increment
    return bound - drift


def lemma1_slack(x_prev: float, x_next: float, increment: float) -> float:
    """Normalized drift-bound slack; >= -1e-9 under a correct update."""
    drift = 0.5 * (x_next * x_next - x_prev * x_prev)
    bound = 0.5 * increment * increment + x_prev * increment
    return (bound - drift) / max(1.0, abs(bound), abs(drift))


def lemma2_margin(q_prev: float, q_next: float, arrival: float,
                  service: float) -> float:
    """Slack of (max(0, Q - b) + A)^2 <= Q^2 + A^2 + b^2 + 2 Q (A - b)."""
    bound = (q_prev * q_prev + arrival * arrival + service * service
             + 2.0 * q_prev * (arrival - service))
    return bound - q_next * q_next


def lemma2_slack(q_prev: float, q_next: float, arrival: float,
                 service: float) -> float:
    """Normalized variant of ``lemma2_margin``."""
    bound = (q_prev * q_prev + arrival * arrival + service * service
             + 2.0 * q_prev * (arrival - service))
    return (bound - q_next * q_next) / max(1.0, abs(bound), q_next * q_next)


@dataclass
class QueueBank:
    """All queue state for a fleet: physical, virtual, and the usage estimates.

    ``p_hat`` starts uniform over each device's LUT rows and becomes the
    running sample mean of the compression choices made on offloading slots
    (only offloaded DUs occupy server queues).
    """

    q_ue: np.ndarray               # int64 (K,)
    q_es: list                     # per UE: int64 (L_k,)
    z: np.ndarray                  # float64 (K,), latency
    y: np.ndarray                  # float64 (K,), accuracy (energy-min policies)
    s: np.ndarray                  # float64 (K,), device energy (max-accuracy)
    o: float                       # server energy (max-accuracy)
    p_counts: list                 # per UE: int64 (L_k,)
    p_obs: np.ndarray              # int64 (K,)

    @classmethod
    def for_fleet(cls, fleet: list[UEConfig]) -> "QueueBank":
        k = len(fleet)
        return cls(
            q_ue=np.zeros(k, dtype=np.int64),
            q_es=[np.zeros(ue.n_profiles, dtype=np.int64) for ue in fleet],
            z=np.zeros(k), y=np.zeros(k), s=np.zeros(k), o=0.0,
            p_counts=[np.zeros(ue.n_profiles, dtype=np.int64) for ue in fleet],
            p_obs=np.zeros(k, dtype=np.int64))

    def p_hat(self, k: int) -> np.ndarray:
        if self.p_obs[k] == 0:
            n = len(self.p_counts[k])
            return np.full(n, 1.0 / n)
        return self.p_counts[k] / float(self.p_obs[k])


def total_queue(bank: QueueBank, k: int) -> float:
    """Backlog seen by one device: own queue plus usage-weighted server queues."""
    return float(bank.q_ue[k]) + float(np.dot(bank.p_hat(k), bank.q_es[k]))


@dataclass
class SlotOutcome:
    """Audited result of one queue advance, before virtual-queue updates."""

    arrivals: np.ndarray           # (K,)
    n_ue: np.ndarray               # offered device service (K,)
    served: np.ndarray             # DUs leaving each device queue (K,)
    offloaded: np.ndarray          # subset of served that entered ES queues (K,)
    local_done: np.ndarray         # subset classified on the device (K,)
    es_done: list                  # per UE: (L_k,) DUs classified at the ES
    lemma2_margins: list = field(default_factory=list)
    lemma1_checks: list = field(default_factory=list)  # (name, drift_margin)


def advance_slot(bank: QueueBank, ue_actions, es_action, arrivals,
                 fleet, es_cfg, sim, energies) -> SlotOutcome:
    """Apply one slot of queue dynamics, then the virtual-queue updates.

    ``energies`` carries (e_ue, e_s): realized per-device slot energy (tx plus
    computation) and server slot energy, needed by the energy virtual queues.
    DUs are conserved: they leave the system only by classification.
    """
    tau = sim.slot_duration
    k_n = len(fleet)
    arrivals = np.asarray(arrivals, dtype=np.int64)
    n_ue = np.zeros(k_n, dtype=np.int64)
    served = np.zeros(k_n, dtype=np.int64)
    offloaded = np.zeros(k_n, dtype=np.int64)
    local_done = np.zeros(k_n, dtype=np.int64)
    es_done = [np.zeros(ue.n_profiles, dtype=np.int64) for ue in fleet]
    margins = []

    # Server queues drain first; this slot's offloaded DUs only become
    # servable next slot.
    n_es_offered = [np.zeros(ue.n_profiles, dtype=np.int64) for ue in fleet]
    for (k, i), f_ki in es_action.f_split.items():
        if f_ki <= 0.0:
            continue
        n_es = n_server(fleet[k].lut[i], f_ki, tau)
        n_es_offered[k][i] = n_es
        q_prev = int(bank.q_es[k][i])
        done = min(n_es, q_prev)
        es_done[k][i] = done
        bank.q_es[k][i] = q_prev - done

    for k, ue in enumerate(fleet):
        act = ue_actions[k]
        prof = ue.lut[act.rho_index]
        if act.d == 1:
            n = n_offload(prof, act.f_d, act.rate, tau)
        else:
            n = n_local(prof, act.f_d, tau)
        n_ue[k] = n
        q_prev = int(bank.q_ue[k])
        moved = min(n, q_prev)
        served[k] = moved
        if act.d == 1:
            offloaded[k] = moved
            bank.q_es[k][act.rho_index] += moved
        else:
            local_done[k] = moved
        bank.q_ue[k] = q_prev - moved + int(arrivals[k])
        margins.append(lemma2_slack(q_prev, float(bank.q_ue[k]),
                                    float(arrivals[k]), float(n)))
        # ES queue bound, against the pre-drain length.  Idle queues (no
        # service, no arrival) satisfy it with exactly zero slack; skip them.
        for i in range(ue.n_profiles):
            arrived = act.d == 1 and i == act.rho_index
            n_es = int(n_es_offered[k][i])
            if not arrived and n_es == 0:
                continue
            q_es_prev = float(bank.q_es[k][i]) + es_done[k][i]
            if arrived:
                q_es_prev -= moved
            margins.append(lemma2_slack(q_es_prev, float(bank.q_es[k][i]),
                                        float(moved) if arrived else 0.0,
                                        float(n_es)))

    outcome = SlotOutcome(arrivals=arrivals, n_ue=n_ue, served=served,
                          offloaded=offloaded, local_done=local_done,
                          es_done=es_done, lemma2_margins=margins)

    q_tot_next = np.array([total_queue(bank, k) for k in range(k_n)])
    acc_charged = np.array([fleet[k].lut[ue_actions[k].rho_index].accuracy
                            for k in range(k_n)])
    e_ue, e_s = energies
    outcome.lemma1_checks = update_virtual(bank, fleet, es_cfg, sim,
                                           q_tot_next, acc_charged, e_ue, e_s)

    # Usage estimates follow the virtual updates; the indicator that feeds
    # server queues only fires on offloading slots.
    for k in range(k_n):
        if ue_actions[k].d == 1:
            bank.p_obs[k] += 1
            bank.p_counts[k][ue_actions[k].rho_index] += 1

    if bank.q_ue.min() < 0 or any(q.min() < 0 for q in bank.q_es):
        raise AssertionError("negative physical queue after update")
    return outcome


def update_virtual(bank: QueueBank, fleet, es_cfg, sim, q_tot_next,
                   acc_charged, e_ue, e_s):
    """Advance the virtual queues and return their drift-bound slacks.

    Latency queues run under every policy.  Accuracy queues run under the
    energy-minimizing policies; device/server energy queues run under the
    accuracy-maximizing one.
    """
    tau = sim.slot_duration
    checks = []
    made = sim.policy == "mu_made"
    for k, ue in enumerate(fleet):
        q_avg = ue.constraints.queue_target(ue.arrival_mean, tau)
        inc = ue.step_sizes.mu * (q_tot_next[k] - q_avg)
        z_prev = float(bank.z[k])
        bank.z[k] = max(0.0, z_prev + inc)
        checks.append((f"z[{k}]", lemma1_slack(z_prev, float(bank.z[k]), inc)))
        if made:
            inc = ue.step_sizes.lam * (e_ue[k] - ue.constraints.e_avg_j)
            s_prev = float(bank.s[k])
            bank.s[k] = max(0.0, s_prev + inc)
            checks.append((f"s[{k}]", lemma1_slack(s_prev, float(bank.s[k]), inc)))
        else:
            inc = ue.step_sizes.nu * (ue.constraints.g_avg - acc_charged[k])
            y_prev = float(bank.y[k])
            bank.y[k] = max(0.0, y_prev + inc)
            checks.append((f"y[{k}]", lemma1_slack(y_prev, float(bank.y[k]), inc)))
    if made:
        inc = es_cfg.eta * (e_s - es_cfg.energy_constraint)
        o_prev = bank.o
        bank.o = max(0.0, o_prev + inc)
        checks.append(("o", lemma1_slack(o_prev, bank.o, inc)))
    return checks
