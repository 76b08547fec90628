"""Domain types, built-in lookup tables, and configuration loading.

Everything downstream (channel, queueing, solvers, policies, engine) consumes
the frozen dataclasses defined here.  Units are SI throughout: seconds, Hz,
Watts, Joules, bits.  Queue contents are counted in data units (DU), one DU
being one classification input.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, asdict
from pathlib import Path

import yaml

POLICIES = ("mu_meda", "mu_made", "fixed_accuracy", "hybrid_fixed_rate")
ARRIVAL_MODELS = ("poisson", "deterministic")
FADING_MODES = ("iid_rayleigh", "clarke")

# Thermal noise floor at -174 dBm/Hz, the usual link-budget assumption.
DEFAULT_NOISE_PSD = 3.98e-21  # W/Hz
DEFAULT_P_TX_MAX = 0.1  # W


class ConfigError(ValueError):
    """Configuration rejection carrying the offending field path."""

    def __init__(self, fieldpath, message):
        self.fieldpath = fieldpath
        super().__init__(f"{fieldpath}: {message}")


@dataclass(frozen=True)
class CompressionProfile:
    """One row of an encoder bank: accuracy and throughput of a compression factor.

    ``rho`` is the per-dimension downsampling degree.  The J-coefficients are
    data units per clock cycle for the three processing paths: compress+zip
    for offloading, compress+classify on the device, classify at the server.
    """

    rho: int
    accuracy: float          # fraction in (0, 1]
    pixels: int              # compressed image size in px
    bits_per_pixel: float    # average bits/px after zipping
    j_offload: float         # DU per cycle, device compression path
    j_local: float           # DU per cycle, device local-classification path
    j_server: float          # DU per cycle, server classification path

    @property
    def w_bits(self) -> float:
        return self.pixels * self.bits_per_pixel


def du_bits(profile: CompressionProfile) -> float:
    """Bits needed to store one compressed DU: pixels times bits per pixel."""
    return profile.pixels * profile.bits_per_pixel


# Built-in encoder banks.  Columns: rho, accuracy, pixels, bits/px,
# j_offload, j_local, j_server.  The per-rho pixel counts and bits/px are
# shared by both banks; accuracies and device-side throughputs differ.
_COMMON = {
    2: (128 * 128 * 3, 1.08, 1.20e-7),
    4: (64 * 64 * 3, 2.27, 2.17e-7),
    8: (32 * 32 * 3, 4.72, 2.87e-7),
    16: (16 * 16 * 3, 9.06, 3.57e-7),
    32: (8 * 8 * 3, 8.0, 5.00e-7),
    64: (4 * 4 * 3, 8.0, 6.25e-7),
}

_DEEP_CE_ROWS = {
    # rho: (accuracy, j_offload, j_local)
    2: (0.973, 1.44e-7, 8.35e-8),
    4: (0.965, 1.26e-7, 9.04e-8),
    8: (0.934, 1.16e-7, 8.90e-8),
    16: (0.918, 1.07e-7, 8.73e-8),
    32: (0.830, 1.35e-7, 1.06e-7),
    64: (0.670, 1.32e-7, 1.09e-7),
}

_SHORT_CE_ROWS = {
    2: (0.973, 1.44e-7, 8.35e-8),
    4: (0.958, 1.68e-7, 1.10e-7),
    8: (0.915, 1.88e-7, 1.26e-7),
    16: (0.913, 1.95e-7, 1.38e-7),
    32: (0.770, 2.25e-7, 1.55e-7),
    64: (0.500, 2.25e-7, 1.65e-7),
}


def _build_bank(rows) -> tuple[CompressionProfile, ...]:
    out = []
    for rho, (acc, jd, jl) in rows.items():
        px, bpp, js = _COMMON[rho]
        out.append(CompressionProfile(rho, acc, px, bpp, jd, jl, js))
    return tuple(out)


DEEP_CE = _build_bank(_DEEP_CE_ROWS)
SHORT_CE = _build_bank(_SHORT_CE_ROWS)
LUT_PRESETS = {
    "deep_ce": DEEP_CE,
    "short_ce": SHORT_CE,
    # Concurrent use of both banks; duplicate rho values are intentional,
    # ES queues are keyed by row index, not by rho.
    "both": DEEP_CE + SHORT_CE,
}


@dataclass(frozen=True)
class ChannelScenario:
    """Flat-fading link description.  ``pathloss_gain`` is the mean power gain."""

    distance_m: float
    bandwidth_hz: float
    carrier_hz: float
    pathloss_gain: float            # sigma_0^2, dimensionless
    noise_psd: float = DEFAULT_NOISE_PSD
    fading_mode: str = "iid_rayleigh"
    doppler_hz: float | None = None  # clarke mode only; None = 1/(2 pi tau)

    name: str | None = None


CHANNEL_PRESETS = {
    "A": dict(distance_m=50.0, bandwidth_hz=2.5e6, carrier_hz=6e9,
              pathloss_gain=1.06e-10),
    "B": dict(distance_m=500.0, bandwidth_hz=2.5e6, carrier_hz=9e9,
              pathloss_gain=2.72e-14),
}


@dataclass(frozen=True)
class ConstraintSet:
    """Long-term targets for one device.

    The delay target maps to a queue-length target via Little's law; a direct
    ``q_avg`` override wins when given.  ``e_avg_j`` is the per-slot device
    energy budget used by the maximum-accuracy policy.
    """

    d_avg_s: float | None = None
    g_avg: float | None = None
    e_avg_j: float | None = None
    q_avg: float | None = None

    def queue_target(self, arrival_mean: float, tau: float) -> float:
        if self.q_avg is not None:
            return self.q_avg
        if self.d_avg_s is None:
            raise ConfigError("constraints", "need d_avg_s or q_avg")
        return self.d_avg_s * arrival_mean / tau


@dataclass(frozen=True)
class StepSizes:
    mu: float = 1.0     # latency virtual queue
    nu: float = 1.0     # accuracy virtual queue
    lam: float = 1.0    # device-energy virtual queue


@dataclass(frozen=True)
class UEConfig:
    id: int
    lut: tuple[CompressionProfile, ...]
    freq_set: tuple[float, ...]      # Hz, ascending
    kappa: float                     # effective switched capacitance
    channel: ChannelScenario
    delta: float                     # energy-importance weight, fleet sums to 1
    arrival_mean: float              # DU per slot
    constraints: ConstraintSet
    p_tx_max: float = DEFAULT_P_TX_MAX
    bandwidth: float | None = None   # Hz, defaults to channel bandwidth
    step_sizes: StepSizes = field(default_factory=StepSizes)

    @property
    def bandwidth_hz(self) -> float:
        return self.bandwidth if self.bandwidth is not None else self.channel.bandwidth_hz

    @property
    def n_profiles(self) -> int:
        return len(self.lut)


@dataclass(frozen=True)
class ESConfig:
    freq_set: tuple[float, ...]   # Hz, ascending
    kappa: float
    gamma: float = 0.5            # UE-vs-ES energy weight
    eta: float = 1.0              # server-energy virtual queue step size
    energy_constraint: float | None = None  # J/slot, mu_made only


@dataclass(frozen=True)
class SimConfig:
    slot_duration: float = 0.05
    horizon: int = 20000
    warmup: int = 5000
    v: float = 1.0e5
    policy: str = "mu_meda"
    rho_fixed: int | None = None     # fixed_accuracy only
    force_offload: bool = False
    rng_seed: int = 1
    arrival_model: str = "poisson"


# ---------------------------------------------------------------------------
# validation


def _require(cond, fieldpath, message):
    if not cond:
        raise ConfigError(fieldpath, message)


def validate_profile(p: CompressionProfile, fieldpath="lut"):
    _require(0.0 < p.accuracy <= 1.0, f"{fieldpath}.accuracy", "must be in (0, 1]")
    _require(p.pixels > 0, f"{fieldpath}.pixels", "must be > 0")
    _require(p.bits_per_pixel > 0, f"{fieldpath}.bits_per_pixel", "must be > 0")
    for name in ("j_offload", "j_local", "j_server"):
        _require(getattr(p, name) > 0, f"{fieldpath}.{name}", "must be > 0")


def validate_lut(lut, fieldpath="lut"):
    _require(len(lut) > 0, fieldpath, "must not be empty")
    for i, p in enumerate(lut):
        validate_profile(p, f"{fieldpath}[{i}]")
    # Accuracy should not increase with heavier compression.  Banks mixing
    # encoder families repeat rho values and are exempt; within one family
    # an inversion is worth flagging, though not rejecting.
    rhos = [p.rho for p in lut]
    if len(set(rhos)) == len(rhos):
        by_rho = sorted(lut, key=lambda p: p.rho)
        if any(a.accuracy < b.accuracy for a, b in zip(by_rho, by_rho[1:])):
            warnings.warn(f"{fieldpath}: accuracy is not non-increasing in rho",
                          stacklevel=2)


def validate_fleet(fleet, es, sim):
    _require(len(fleet) > 0, "ues", "must not be empty")
    _require(sim.policy in POLICIES, "sim.policy", f"must be one of {POLICIES}")
    _require(sim.arrival_model in ARRIVAL_MODELS, "sim.arrival_model",
             f"must be one of {ARRIVAL_MODELS}")
    _require(sim.slot_duration > 0, "sim.slot_duration_s", "must be > 0")
    _require(sim.horizon > 0, "sim.horizon", "must be > 0")
    _require(0 <= sim.warmup < sim.horizon, "sim.warmup", "must be in [0, horizon)")
    _require(sim.v >= 0, "sim.v", "must be >= 0")
    _require(len(es.freq_set) > 0, "es.freq_set_hz", "must not be empty")
    _require(all(f > 0 for f in es.freq_set), "es.freq_set_hz", "must be > 0")
    _require(es.kappa > 0, "es.kappa", "must be > 0")
    _require(0.0 <= es.gamma <= 1.0, "es.gamma", "must be in [0, 1]")
    if sim.policy == "mu_made":
        _require(es.energy_constraint is not None and es.energy_constraint > 0,
                 "es.energy_constraint_j", "required (> 0) for mu_made")
    for k, ue in enumerate(fleet):
        path = f"ues[{k}]"
        validate_lut(ue.lut, f"{path}.lut")
        _require(len(ue.freq_set) > 0, f"{path}.freq_set_hz", "must not be empty")
        _require(all(f > 0 for f in ue.freq_set), f"{path}.freq_set_hz", "must be > 0")
        _require(ue.kappa > 0, f"{path}.kappa", "must be > 0")
        _require(ue.p_tx_max > 0, f"{path}.p_tx_max_w", "must be > 0")
        _require(ue.delta > 0, f"{path}.delta", "must be > 0")
        _require(ue.arrival_mean >= 0, f"{path}.arrival_mean", "must be >= 0")
        _require(ue.channel.pathloss_gain > 0, f"{path}.channel.pathloss_gain",
                 "must be > 0")
        _require(ue.channel.noise_psd > 0, f"{path}.channel.noise_psd", "must be > 0")
        _require(ue.channel.fading_mode in FADING_MODES, f"{path}.channel.fading",
                 f"must be one of {FADING_MODES}")
        _require(ue.bandwidth_hz > 0, f"{path}.bandwidth_hz", "must be > 0")
        ue.constraints.queue_target(ue.arrival_mean, sim.slot_duration)
        if sim.policy in ("mu_meda", "fixed_accuracy", "hybrid_fixed_rate"):
            _require(ue.constraints.g_avg is not None, f"{path}.constraints.g_avg",
                     f"required for {sim.policy}")
        if sim.policy == "mu_made":
            _require(ue.constraints.e_avg_j is not None and ue.constraints.e_avg_j > 0,
                     f"{path}.constraints.e_avg_j", "required (> 0) for mu_made")
    if sim.policy == "fixed_accuracy":
        _require(sim.rho_fixed is not None, "sim.rho_fixed",
                 "required for fixed_accuracy")
        for k, ue in enumerate(fleet):
            _require(any(p.rho == sim.rho_fixed for p in ue.lut),
                     f"ues[{k}].lut", f"has no row with rho={sim.rho_fixed}")


def normalize_deltas(fleet):
    """Rescale the energy-importance weights to sum to one, warning if needed."""
    total = sum(ue.delta for ue in fleet)
    if abs(total - 1.0) <= 1e-9:
        return list(fleet)
    warnings.warn(f"delta weights sum to {total:g}, normalizing to 1", stacklevel=2)
    return [replace_delta(ue, ue.delta / total) for ue in fleet]


def replace_delta(ue: UEConfig, delta: float) -> UEConfig:
    from dataclasses import replace
    return replace(ue, delta=delta)


# ---------------------------------------------------------------------------
# document parsing


def _parse_profile(row, fieldpath):
    if not isinstance(row, dict):
        raise ConfigError(fieldpath, "LUT row must be a mapping")
    required = ("rho", "accuracy", "pixels", "bits_per_pixel",
                "j_offload", "j_local", "j_server")
    missing = [f for f in required if f not in row]
    if missing:
        raise ConfigError(fieldpath, f"missing fields {missing}")
    try:
        return CompressionProfile(
            rho=int(row["rho"]), accuracy=float(row["accuracy"]),
            pixels=int(row["pixels"]), bits_per_pixel=float(row["bits_per_pixel"]),
            j_offload=float(row["j_offload"]), j_local=float(row["j_local"]),
            j_server=float(row["j_server"]))
    except (TypeError, ValueError) as e:
        raise ConfigError(fieldpath, f"bad value: {e}") from None


def _parse_lut(spec, fieldpath, base_dir):
    if isinstance(spec, str):
        if spec in LUT_PRESETS:
            return LUT_PRESETS[spec]
        raise ConfigError(fieldpath, f"unknown preset {spec!r}; have {sorted(LUT_PRESETS)}")
    if isinstance(spec, dict) and "path" in spec:
        path = Path(spec["path"])
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        if not path.exists():
            raise ConfigError(fieldpath, f"LUT file not found: {path}")
        rows = yaml.safe_load(path.read_text())
        return tuple(_parse_profile(r, f"{fieldpath}[{i}]") for i, r in enumerate(rows))
    if isinstance(spec, list):
        return tuple(_parse_profile(r, f"{fieldpath}[{i}]") for i, r in enumerate(spec))
    raise ConfigError(fieldpath, "expected preset name, row list, or {path: ...}")


def _parse_channel(spec, fieldpath):
    if not isinstance(spec, dict):
        raise ConfigError(fieldpath, "must be a mapping")
    spec = dict(spec)
    name = spec.pop("preset", None)
    base = dict(CHANNEL_PRESETS[name]) if name in CHANNEL_PRESETS else {}
    if name is not None and name not in CHANNEL_PRESETS:
        raise ConfigError(f"{fieldpath}.preset",
                          f"unknown preset {name!r}; have {sorted(CHANNEL_PRESETS)}")
    fading = spec.pop("fading", "iid_rayleigh")
    doppler = spec.pop("doppler_hz", None)
    base.update(spec)
    for f in ("distance_m", "bandwidth_hz", "carrier_hz", "pathloss_gain"):
        if f not in base:
            raise ConfigError(f"{fieldpath}.{f}", "missing")
    return ChannelScenario(
        distance_m=float(base["distance_m"]),
        bandwidth_hz=float(base["bandwidth_hz"]),
        carrier_hz=float(base["carrier_hz"]),
        pathloss_gain=float(base["pathloss_gain"]),
        noise_psd=float(base.get("noise_psd", DEFAULT_NOISE_PSD)),
        fading_mode=str(fading),
        doppler_hz=None if doppler is None else float(doppler),
        name=name)


def _get(d, key, fieldpath, default=None, required=False):
    if key not in d:
        if required:
            raise ConfigError(f"{fieldpath}.{key}", "missing")
        return default
    return d[key]


def load_config(source, base_dir=None):
    """Parse and validate a configuration document.

    ``source`` may be a path to a YAML file, a YAML string, or an already
    parsed mapping.  Returns ``(fleet, es, sim)`` with delta weights
    normalized to sum to one.
    """
    if isinstance(source, (str, Path)) and (isinstance(source, Path) or "\n" not in source):
        path = Path(source)
        if path.exists():
            base_dir = path.parent
            source = path.read_text()
    if isinstance(source, (str, Path)):
        try:
            doc = yaml.safe_load(str(source))
        except yaml.YAMLError as e:
            raise ConfigError("<document>", f"not valid YAML: {e}") from None
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ConfigError("<document>", "top level must be a mapping")

    sim_doc = _get(doc, "sim", "<document>", default={})
    if not isinstance(sim_doc, dict):
        raise ConfigError("sim", "must be a mapping")
    tau = float(_get(sim_doc, "slot_duration_s", "sim", default=0.05))
    try:
        sim = SimConfig(
            slot_duration=tau,
            horizon=int(_get(sim_doc, "horizon", "sim", default=20000)),
            warmup=int(_get(sim_doc, "warmup", "sim", default=5000)),
            v=float(_get(sim_doc, "v", "sim", default=1.0e5)),
            policy=str(_get(sim_doc, "policy", "sim", default="mu_meda")),
            rho_fixed=(None if _get(sim_doc, "rho_fixed", "sim") is None
                       else int(sim_doc["rho_fixed"])),
            force_offload=bool(_get(sim_doc, "force_offload", "sim", default=False)),
            rng_seed=int(_get(sim_doc, "rng_seed", "sim", default=1)),
            arrival_model=str(_get(sim_doc, "arrival_model", "sim", default="poisson")))
    except (TypeError, ValueError) as e:
        raise ConfigError("sim", f"bad value: {e}") from None

    es_doc = _get(doc, "es", "<document>", required=True)
    if not isinstance(es_doc, dict):
        raise ConfigError("es", "must be a mapping")
    freqs = _get(es_doc, "freq_set_hz", "es", required=True)
    if not isinstance(freqs, list) or not freqs:
        raise ConfigError("es.freq_set_hz", "must be a non-empty list")
    e_cons = _get(es_doc, "energy_constraint_j", "es")
    es = ESConfig(
        freq_set=tuple(sorted(float(f) for f in freqs)),
        kappa=float(_get(es_doc, "kappa", "es", required=True)),
        gamma=float(_get(es_doc, "gamma", "es", default=0.5)),
        eta=float(_get(es_doc, "eta", "es", default=1.0)),
        energy_constraint=None if e_cons is None else float(e_cons))

    ues_doc = _get(doc, "ues", "<document>", required=True)
    if not isinstance(ues_doc, list) or not ues_doc:
        raise ConfigError("ues", "must be a non-empty list")
    fleet = []
    for k, ue_doc in enumerate(ues_doc):
        path = f"ues[{k}]"
        if not isinstance(ue_doc, dict):
            raise ConfigError(path, "must be a mapping")
        lut = _parse_lut(_get(ue_doc, "lut", path, required=True), f"{path}.lut", base_dir)
        ue_freqs = _get(ue_doc, "freq_set_hz", path, required=True)
        if not isinstance(ue_freqs, list) or not ue_freqs:
            raise ConfigError(f"{path}.freq_set_hz", "must be a non-empty list")
        cons_doc = _get(ue_doc, "constraints", path, default={})
        cons = ConstraintSet(
            d_avg_s=None if cons_doc.get("d_avg_s") is None else float(cons_doc["d_avg_s"]),
            g_avg=None if cons_doc.get("g_avg") is None else float(cons_doc["g_avg"]),
            e_avg_j=None if cons_doc.get("e_avg_j") is None else float(cons_doc["e_avg_j"]),
            q_avg=None if cons_doc.get("q_avg") is None else float(cons_doc["q_avg"]))
        steps_doc = _get(ue_doc, "step_sizes", path, default={})
        steps = StepSizes(mu=float(steps_doc.get("mu", 1.0)),
                          nu=float(steps_doc.get("nu", 1.0)),
                          lam=float(steps_doc.get("lambda", steps_doc.get("lam", 1.0))))
        bw = _get(ue_doc, "bandwidth_hz", path)
        fleet.append(UEConfig(
            id=int(_get(ue_doc, "id", path, default=k)),
            lut=lut,
            freq_set=tuple(sorted(float(f) for f in ue_freqs)),
            kappa=float(_get(ue_doc, "kappa", path, required=True)),
            channel=_parse_channel(_get(ue_doc, "channel", path, required=True),
                                   f"{path}.channel"),
            delta=float(_get(ue_doc, "delta", path, default=1.0 / len(ues_doc))),
            arrival_mean=float(_get(ue_doc, "arrival_mean", path, default=2.0)),
            constraints=cons,
            p_tx_max=float(_get(ue_doc, "p_tx_max_w", path, default=DEFAULT_P_TX_MAX)),
            bandwidth=None if bw is None else float(bw),
            step_sizes=steps))

    fleet = normalize_deltas(fleet)
    validate_fleet(fleet, es, sim)
    return fleet, es, sim


def serialize_config(fleet, es, sim) -> str:
    """Dump a configuration back to YAML; load_config of the result is identity."""
    doc = {
        "sim": {
            "slot_duration_s": sim.slot_duration,
            "horizon": sim.horizon,
            "warmup": sim.warmup,
            "v": sim.v,
            "policy": sim.policy,
            "rho_fixed": sim.rho_fixed,
            "force_offload": sim.force_offload,
            "rng_seed": sim.rng_seed,
            "arrival_model": sim.arrival_model,
        },
        "es": {
            "freq_set_hz": list(es.freq_set),
            "kappa": es.kappa,
            "gamma": es.gamma,
            "eta": es.eta,
            "energy_constraint_j": es.energy_constraint,
        },
        "ues": [],
    }
    for ue in fleet:
        ch = {
            "distance_m": ue.channel.distance_m,
            "bandwidth_hz": ue.channel.bandwidth_hz,
            "carrier_hz": ue.channel.carrier_hz,
            "pathloss_gain": ue.channel.pathloss_gain,
            "noise_psd": ue.channel.noise_psd,
            "fading": ue.channel.fading_mode,
            "doppler_hz": ue.channel.doppler_hz,
        }
        if ue.channel.name is not None:
            ch["preset"] = ue.channel.name
        doc["ues"].append({
            "id": ue.id,
            "lut": [asdict(p) for p in ue.lut],
            "freq_set_hz": list(ue.freq_set),
            "kappa": ue.kappa,
            "p_tx_max_w": ue.p_tx_max,
            "bandwidth_hz": ue.bandwidth,
            "delta": ue.delta,
            "arrival_mean": ue.arrival_mean,
            "channel": ch,
            "constraints": {
                "d_avg_s": ue.constraints.d_avg_s,
                "g_avg": ue.constraints.g_avg,
                "e_avg_j": ue.constraints.e_avg_j,
                "q_avg": ue.constraints.q_avg,
            },
            "step_sizes": {"mu": ue.step_sizes.mu, "nu": ue.step_sizes.nu,
                           "lambda": ue.step_sizes.lam},
        })
    return yaml.safe_dump(doc, sort_keys=False)
