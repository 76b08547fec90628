"""The slot loop: draw fading and arrivals, run the policy, advance queues.

``run`` executes one configuration for a full horizon and reduces the
post-warmup slots to a RunSummary; ``sweep`` repeats it across a grid of the
trade-off parameter V with independent random streams per point.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import policies
from .channel import comp_energy, make_gain_generator, tx_energy
from .model import ESConfig, SimConfig, UEConfig
from .queueing import QueueBank, advance_slot, delay_estimate, total_queue

DRIFT_SLACK_TOL = -1e-9  # normalized lemma slack below this counts as a violation


@dataclass
class SlotRecord:
    """Audited outcome of one slot, JSON-serializable via ``to_dict``."""

    slot: int
    ue: list                 # per UE dict: action, energies, queues, virtual queues
    es: dict                 # f_s, f_split, e_s, queue lengths, o
    e_tot: float
    drift_slack_min: float   # worst normalized lemma slack this slot

    def to_dict(self):
        return {"slot": self.slot, "ue": self.ue, "es": self.es,
                "e_tot": self.e_tot, "drift_slack_min": self.drift_slack_min}


@dataclass
class RunSummary:
    policy: str
    v: float
    seed: int
    horizon: int
    warmup: int
    es_energy_j: float
    ue_energy_j: list
    ue_tx_energy_j: list
    ue_comp_energy_j: list
    ue_delay_s: list
    ue_accuracy: list
    ue_offload_frac: list
    ue_q_tot_mean: list
    g_avg: list
    d_avg_s: list
    e_avg_j: list
    es_e_avg_j: float | None
    delay_slack_s: list
    accuracy_slack: list
    energy_slack_j: list
    virtual_final_over_t: dict
    converged: bool
    drift_violations: int

    @property
    def k(self):
        return len(self.ue_energy_j)

    def to_dict(self):
        from dataclasses import asdict
        return asdict(self)


def _effective_fleet(fleet, sim):
    if sim.policy == "fixed_accuracy":
        return [policies.restrict_to_rho(ue, sim.rho_fixed) for ue in fleet]
    return list(fleet)


def _arrival_source(sim, fleet, rngs):
    if sim.arrival_model == "poisson":
        def draw():
            return np.array([rng.poisson(ue.arrival_mean)
                             for rng, ue in zip(rngs, fleet)], dtype=np.int64)
        return draw
    # Deterministic stream matching the mean: emit the integer part of a
    # running fractional accumulator.
    acc = np.zeros(len(fleet))

    def draw():
        out = np.zeros(len(fleet), dtype=np.int64)
        for k, ue in enumerate(fleet):
            acc[k] += ue.arrival_mean
            out[k] = int(math.floor(acc[k]))
            acc[k] -= out[k]
        return out
    return draw


def run(fleet, es_cfg: ESConfig, sim: SimConfig, collect_records=False,
        rng_stream=()):
    """Execute one simulation; returns (RunSummary, [SlotRecord]).

    Deterministic for a given (rng_seed, rng_stream).  Records are collected
    only on request; summaries are always accumulated incrementally.
    """
    fleet = _effective_fleet(fleet, sim)
    k_n = len(fleet)
    tau = sim.slot_duration
    root = np.random.SeedSequence(sim.rng_seed, spawn_key=tuple(rng_stream))
    seqs = root.spawn(2 * k_n)
    gains_gen = [make_gain_generator(ue.channel, np.random.default_rng(seqs[k]), tau)
                 for k, ue in enumerate(fleet)]
    arrival_rngs = [np.random.default_rng(seqs[k_n + k]) for k in range(k_n)]
    draw_arrivals = _arrival_source(sim, fleet, arrival_rngs)

    fixed_rates = None
    if sim.policy == "hybrid_fixed_rate":
        fixed_rates = [policies.min_stable_rate(ue, tau) for ue in fleet]

    bank = QueueBank.for_fleet(fleet)
    records = []
    measured = 0
    sum_e_tx = np.zeros(k_n)
    sum_e_comp = np.zeros(k_n)
    sum_es = 0.0
    sum_q_tot = np.zeros(k_n)
    sum_acc = np.zeros(k_n)
    sum_d = np.zeros(k_n)
    drift_violations = 0
    n_virtual = 2 * k_n + (1 if sim.policy == "mu_made" else 0)
    traces = np.zeros((n_virtual, sim.horizon))

    for t in range(sim.horizon):
        gains = np.array([g.next_gain().gain_sq for g in gains_gen])
        state = policies.SlotState(
            slot=t, gain_sq=gains, q_ue=bank.q_ue.copy(),
            q_es=[q.copy() for q in bank.q_es],
            z=bank.z.copy(), y=bank.y.copy(), s=bank.s.copy(), o=bank.o,
            p_hat=[bank.p_hat(k) for k in range(k_n)])

        actions = []
        for k in range(k_n):
            if sim.policy in ("mu_meda", "fixed_accuracy"):
                act, _ = policies.meda_ue_step(k, state, fleet, es_cfg, sim)
            elif sim.policy == "mu_made":
                act, _ = policies.made_ue_step(k, state, fleet, es_cfg, sim)
            else:
                act, _ = policies.hybrid_fixed_rate_step(k, state, fleet, es_cfg,
                                                         sim, fixed_rates[k])
            actions.append(act)
        if sim.policy == "mu_made":
            es_action = policies.made_es_step(state, fleet, es_cfg, sim)
        else:
            es_action = policies.meda_es_step(state, fleet, es_cfg, sim)

        e_tx = np.array([tx_energy(a.rate, gains[k], fleet[k], tau)
                         for k, a in enumerate(actions)])
        e_comp = np.array([comp_energy(a.f_d, fleet[k].kappa, tau)
                           for k, a in enumerate(actions)])
        e_ue = e_tx + e_comp
        e_s = comp_energy(es_action.f_s, es_cfg.kappa, tau)
        e_tot = ((1.0 - es_cfg.gamma) * e_s
                 + es_cfg.gamma * sum(fleet[k].delta * e_ue[k] for k in range(k_n)))

        arrivals = draw_arrivals()
        outcome = advance_slot(bank, actions, es_action, arrivals, fleet,
                               es_cfg, sim, (e_ue, e_s))

        slack_min = math.inf
        for _, slack in outcome.lemma1_checks:
            if slack < slack_min:
                slack_min = slack
            if slack < DRIFT_SLACK_TOL:
                drift_violations += 1
        for slack in outcome.lemma2_margins:
            if slack < slack_min:
                slack_min = slack
            if slack < DRIFT_SLACK_TOL:
                drift_violations += 1

        row = 0
        for k in range(k_n):
            traces[row, t] = bank.z[k]
            row += 1
        for k in range(k_n):
            traces[row, t] = bank.s[k] if sim.policy == "mu_made" else bank.y[k]
            row += 1
        if sim.policy == "mu_made":
            traces[row, t] = bank.o

        if not (np.isfinite(e_tot) and np.isfinite(bank.z).all()
                and np.isfinite(bank.y).all() and np.isfinite(bank.s).all()
                and np.isfinite(bank.o)):
            raise RuntimeError(f"non-finite state at slot {t}")

        if t >= sim.warmup:
            measured += 1
            sum_e_tx += e_tx
            sum_e_comp += e_comp
            sum_es += e_s
            sum_acc += [fleet[k].lut[actions[k].rho_index].accuracy
                        for k in range(k_n)]
            sum_d += [a.d for a in actions]
            sum_q_tot += [total_queue(bank, k) for k in range(k_n)]

        if collect_records:
            ue_rows = []
            for k in range(k_n):
                a = actions[k]
                ue_rows.append({
                    "d": a.d, "rho_index": a.rho_index, "rho": a.rho,
                    "f_d": a.f_d, "rate": a.rate,
                    "e_tx_j": float(e_tx[k]), "e_comp_j": float(e_comp[k]),
                    "offloaded": int(outcome.offloaded[k]),
                    "local_done": int(outcome.local_done[k]),
                    "arrivals": int(arrivals[k]),
                    "q_ue": int(bank.q_ue[k]),
                    "q_tot": total_queue(bank, k),
                    "z": float(bank.z[k]),
                    "y": float(bank.y[k]), "s": float(bank.s[k]),
                    "accuracy": fleet[k].lut[a.rho_index].accuracy,
                })
            es_row = {
                "f_s": es_action.f_s,
                "f_split": {f"{k}:{i}": v for (k, i), v in es_action.f_split.items()
                            if v > 0.0},
                "e_s_j": float(e_s),
                "q_es": [[int(x) for x in bank.q_es[k]] for k in range(k_n)],
                "o": float(bank.o),
            }
            records.append(SlotRecord(slot=t, ue=ue_rows, es=es_row,
                                      e_tot=float(e_tot),
                                      drift_slack_min=float(slack_min)))

    m = max(1, measured)
    q_tot_mean = sum_q_tot / m
    delays = [delay_estimate(q_tot_mean[k], fleet[k].arrival_mean, tau)
              for k in range(k_n)]
    acc_mean = sum_acc / m
    ue_energy = (sum_e_tx + sum_e_comp) / m
    t_total = float(sim.horizon)
    virtual_rates = {}
    for k in range(k_n):
        virtual_rates[f"z[{k}]"] = float(bank.z[k]) / t_total
        if sim.policy == "mu_made":
            virtual_rates[f"s[{k}]"] = float(bank.s[k]) / t_total
        else:
            virtual_rates[f"y[{k}]"] = float(bank.y[k]) / t_total
    if sim.policy == "mu_made":
        virtual_rates["o"] = bank.o / t_total

    converged = detect_convergence(traces, max(1, sim.horizon // 4))

    g_avg = [ue.constraints.g_avg for ue in fleet]
    d_avg = [ue.constraints.d_avg_s for ue in fleet]
    e_avg = [ue.constraints.e_avg_j for ue in fleet]
    summary = RunSummary(
        policy=sim.policy, v=sim.v, seed=sim.rng_seed,
        horizon=sim.horizon, warmup=sim.warmup,
        es_energy_j=float(sum_es / m),
        ue_energy_j=[float(x) for x in ue_energy],
        ue_tx_energy_j=[float(x) for x in sum_e_tx / m],
        ue_comp_energy_j=[float(x) for x in sum_e_comp / m],
        ue_delay_s=[float(x) for x in delays],
        ue_accuracy=[float(x) for x in acc_mean],
        ue_offload_frac=[float(x) for x in sum_d / m],
        ue_q_tot_mean=[float(x) for x in q_tot_mean],
        g_avg=g_avg, d_avg_s=d_avg, e_avg_j=e_avg,
        es_e_avg_j=es_cfg.energy_constraint,
        delay_slack_s=[None if d_avg[k] is None else d_avg[k] - delays[k]
                       for k in range(k_n)],
        accuracy_slack=[None if g_avg[k] is None else float(acc_mean[k]) - g_avg[k]
                        for k in range(k_n)],
        energy_slack_j=[None if e_avg[k] is None else e_avg[k] - float(ue_energy[k])
                        for k in range(k_n)],
        virtual_final_over_t=virtual_rates,
        converged=converged,
        drift_violations=drift_violations)
    return summary, records


def detect_convergence(traces, window: int) -> bool:
    """Compare the last two window means of every virtual-queue trace.

    True when each relative change is below 1e-2.
    """
    traces = np.atleast_2d(np.asarray(traces, dtype=float))
    if traces.shape[1] < 2 * window or window < 1:
        return False
    last = traces[:, -window:].mean(axis=1)
    prev = traces[:, -2 * window:-window].mean(axis=1)
    rel = np.abs(last - prev) / np.maximum(1.0, np.abs(last))
    return bool(np.max(rel) < 1e-2)


def _sweep_point(args):
    fleet, es_cfg, sim, v, idx = args
    summary, _ = run(fleet, es_cfg, replace(sim, v=v), rng_stream=(idx,))
    return summary


def sweep(fleet, es_cfg, sim, v_list, jobs=1):
    """Independent runs across the V grid, ordered by the input list."""
    work = [(fleet, es_cfg, sim, float(v), i) for i, v in enumerate(v_list)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, work))
    return [_sweep_point(w) for w in work]


def default_v_grid():
    """Logarithmic default grid for trade-off sweeps: 1e2 .. 1e7, 11 points."""
    return list(np.logspace(2, 7, 11))
