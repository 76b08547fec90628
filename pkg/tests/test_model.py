"""Domain types, LUT presets, and configuration parsing."""

import math

import pytest

from goedge.model import (CHANNEL_PRESETS, CompressionProfile, ConfigError,
                          DEEP_CE, LUT_PRESETS, SHORT_CE, du_bits, load_config,
                          serialize_config)

MINIMAL_DOC = """
sim: {horizon: 100, warmup: 10, policy: mu_meda}
es: {freq_set_hz: [4.5e9], kappa: 1.097e-27}
ues:
  - lut:
      - {rho: 8, accuracy: 0.93, pixels: 3072, bits_per_pixel: 4.72,
         j_offload: 1.16e-7, j_local: 8.9e-8, j_server: 2.87e-7}
    freq_set_hz: [1.4e9]
    kappa: 1.097e-27
    channel: {preset: B}
    constraints: {d_avg_s: 0.2, g_avg: 0.9}
"""

TABLE_V_DOC = """
sim: {horizon: 100, warmup: 10, policy: mu_meda}
es: {freq_set_hz: [4.5e8, 4.5e9], kappa: 1.097e-27}
ues:
  - {lut: both, freq_set_hz: [1.4e8, 1.4e9], kappa: 1.097e-26,
     channel: {preset: A}, constraints: {d_avg_s: 0.2, g_avg: 0.92}}
  - {lut: both, freq_set_hz: [1.4e8, 1.4e9], kappa: 2.194e-26,
     channel: {preset: A}, constraints: {d_avg_s: 0.2, g_avg: 0.92}}
  - {lut: both, freq_set_hz: [1.4e8, 1.4e9], kappa: 3.291e-26,
     channel: {preset: B}, constraints: {d_avg_s: 0.2, g_avg: 0.92}}
"""


def test_du_bits_deep_rho2():
    row = next(p for p in DEEP_CE if p.rho == 2)
    assert du_bits(row) == pytest.approx(53084.16, rel=1e-12)
    assert row.pixels == 128 * 128 * 3


def test_du_bits_rho64():
    row = next(p for p in DEEP_CE if p.rho == 64)
    assert du_bits(row) == pytest.approx(384.0, rel=1e-12)


def test_du_bits_unit_case():
    p = CompressionProfile(rho=1, accuracy=1.0, pixels=1, bits_per_pixel=1.0,
                           j_offload=1e-7, j_local=1e-7, j_server=1e-7)
    assert du_bits(p) == 1.0


def test_preset_bits_strictly_decreasing_in_rho():
    for lut in (DEEP_CE, SHORT_CE):
        rows = sorted(lut, key=lambda p: p.rho)
        ws = [du_bits(p) for p in rows]
        assert all(a > b for a, b in zip(ws, ws[1:]))


def test_preset_accuracy_non_increasing_in_rho():
    for lut in (DEEP_CE, SHORT_CE):
        rows = sorted(lut, key=lambda p: p.rho)
        accs = [p.accuracy for p in rows]
        assert all(a >= b for a, b in zip(accs, accs[1:]))


def test_channel_presets_match_published_table():
    assert CHANNEL_PRESETS["A"]["pathloss_gain"] == 1.06e-10
    assert CHANNEL_PRESETS["B"]["pathloss_gain"] == 2.72e-14
    assert CHANNEL_PRESETS["A"]["bandwidth_hz"] == 2.5e6
    assert CHANNEL_PRESETS["B"]["distance_m"] == 500.0


def test_load_minimal_config():
    fleet, es, sim = load_config(MINIMAL_DOC)
    assert len(fleet) == 1
    assert fleet[0].n_profiles == 1
    assert fleet[0].delta == 1.0
    assert es.freq_set == (4.5e9,)
    assert sim.policy == "mu_meda"


def test_load_table_v_style_fleet():
    fleet, es, sim = load_config(TABLE_V_DOC)
    assert len(fleet) == 3
    assert [ue.channel.name for ue in fleet] == ["A", "A", "B"]
    assert fleet[1].kappa == pytest.approx(20 * 1.097e-27)
    assert fleet[2].kappa == pytest.approx(30 * 1.097e-27)
    assert len(fleet[0].lut) == len(LUT_PRESETS["both"])
    assert sum(ue.delta for ue in fleet) == pytest.approx(1.0)


def test_delta_normalization_warns():
    doc = TABLE_V_DOC.replace("kappa: 1.097e-26,", "kappa: 1.097e-26, delta: 1.0,") \
                     .replace("kappa: 2.194e-26,", "kappa: 2.194e-26, delta: 0.5,") \
                     .replace("kappa: 3.291e-26,", "kappa: 3.291e-26, delta: 0.5,")
    with pytest.warns(UserWarning, match="normalizing"):
        fleet, _, _ = load_config(doc)
    assert sum(ue.delta for ue in fleet) == pytest.approx(1.0)
    assert fleet[0].delta == pytest.approx(0.5)


def test_roundtrip_identity():
    fleet, es, sim = load_config(TABLE_V_DOC)
    doc = serialize_config(fleet, es, sim)
    fleet2, es2, sim2 = load_config(doc)
    assert fleet2 == fleet
    assert es2 == es
    assert sim2 == sim


def test_empty_lut_rejected():
    doc = MINIMAL_DOC.replace("""lut:
      - {rho: 8, accuracy: 0.93, pixels: 3072, bits_per_pixel: 4.72,
         j_offload: 1.16e-7, j_local: 8.9e-8, j_server: 2.87e-7}""", "lut: []")
    with pytest.raises(ConfigError):
        load_config(doc)


def test_empty_freq_set_rejected():
    doc = MINIMAL_DOC.replace("freq_set_hz: [1.4e9]", "freq_set_hz: []")
    with pytest.raises(ConfigError, match="freq_set"):
        load_config(doc)


def test_schema_violation_names_field():
    doc = MINIMAL_DOC.replace("j_offload: 1.16e-7, ", "")
    with pytest.raises(ConfigError, match=r"ues\[0\].lut"):
        load_config(doc)


def test_bad_policy_rejected():
    doc = MINIMAL_DOC.replace("policy: mu_meda", "policy: bogus")
    with pytest.raises(ConfigError, match="sim.policy"):
        load_config(doc)


def test_made_requires_energy_budgets():
    doc = MINIMAL_DOC.replace("policy: mu_meda", "policy: mu_made")
    with pytest.raises(ConfigError, match="energy_constraint"):
        load_config(doc)


def test_accuracy_inversion_warns_but_loads():
    doc = MINIMAL_DOC.replace("lut:\n      - ", """lut:
      - {rho: 4, accuracy: 0.50, pixels: 12288, bits_per_pixel: 2.27,
         j_offload: 1.26e-7, j_local: 9.0e-8, j_server: 2.17e-7}
      - """)
    with pytest.warns(UserWarning, match="non-increasing"):
        fleet, _, _ = load_config(doc)
    assert fleet[0].n_profiles == 2
