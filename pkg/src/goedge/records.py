"""CSV and line-delimited record formats.

The summary CSV is the interchange surface consumed by the plotting
frontend; its header is fixed and documented in docs/formats.md.  Slot logs
are one JSON object per line, in slot order.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

RUN_LEVEL_COLUMNS = [
    "policy", "v", "seed", "g_avg", "d_avg_s", "e_avg_j",
    "es_energy_j", "ue_energy_j_mean", "ue_delay_s_mean",
    "ue_accuracy_mean", "ue_offload_frac_mean",
]
UE_METRICS = ["energy_j", "delay_s", "accuracy", "offload_frac"]


def summary_columns(k: int) -> list[str]:
    cols = list(RUN_LEVEL_COLUMNS)
    for i in range(k):
        cols.extend(f"ue{i}_{m}" for m in UE_METRICS)
    return cols


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def summary_row(s) -> dict:
    k = s.k
    row = {
        "policy": s.policy,
        "v": s.v,
        "seed": s.seed,
        "g_avg": s.g_avg[0] if s.g_avg else None,
        "d_avg_s": s.d_avg_s[0] if s.d_avg_s else None,
        "e_avg_j": s.e_avg_j[0] if s.e_avg_j else None,
        "es_energy_j": s.es_energy_j,
        "ue_energy_j_mean": sum(s.ue_energy_j) / k,
        "ue_delay_s_mean": sum(s.ue_delay_s) / k,
        "ue_accuracy_mean": sum(s.ue_accuracy) / k,
        "ue_offload_frac_mean": sum(s.ue_offload_frac) / k,
    }
    for i in range(k):
        row[f"ue{i}_energy_j"] = s.ue_energy_j[i]
        row[f"ue{i}_delay_s"] = s.ue_delay_s[i]
        row[f"ue{i}_accuracy"] = s.ue_accuracy[i]
        row[f"ue{i}_offload_frac"] = s.ue_offload_frac[i]
    return row


def write_summary_csv(path, summaries):
    """One row per run; all rows must describe fleets of the same size."""
    summaries = list(summaries)
    if not summaries:
        raise ValueError("no summaries to write")
    k = summaries[0].k
    if any(s.k != k for s in summaries):
        raise ValueError("mixed fleet sizes in one summary CSV")
    cols = summary_columns(k)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for s in summaries:
            row = summary_row(s)
            writer.writerow([_fmt(row[c]) for c in cols])


def read_summary_csv(path) -> list[dict]:
    """Parse a summary CSV back to typed dicts (floats, None for blanks)."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty CSV")
        for raw in reader:
            row = {}
            for key, val in raw.items():
                if key == "policy":
                    row[key] = val
                elif val == "" or val is None:
                    row[key] = None
                elif key == "seed":
                    row[key] = int(val)
                else:
                    row[key] = float(val)
            rows.append(row)
    return rows


def write_offload_hist_csv(path, summary):
    """Per-UE offloading percentages in [0, 100], one bar per row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ue", "offload_pct"])
        for k, frac in enumerate(summary.ue_offload_frac):
            writer.writerow([k, _fmt(100.0 * frac)])


def read_offload_hist_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [{"ue": int(r["ue"]), "offload_pct": float(r["offload_pct"])}
                for r in reader]


def write_energy_trace_csv(path, records, k: int):
    """Per-slot device energies for instantaneous-consumption figures."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["slot"] + [f"ue{i}_energy_j" for i in range(k)])
        for rec in records:
            writer.writerow([rec.slot] + [
                _fmt(rec.ue[i]["e_tx_j"] + rec.ue[i]["e_comp_j"])
                for i in range(k)])


def write_slot_log(path, records):
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True))
            fh.write("\n")


def read_slot_log(path) -> list[dict]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def write_manifest(path, **fields):
    Path(path).write_text(json.dumps(fields, indent=2, sort_keys=True) + "\n")
