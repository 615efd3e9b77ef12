import pytest
from hypothesis import given, settings, strategies as st

from subnetsim.config import (
    ConfigParseError,
    ConfigValidationError,
    SimConfig,
    dump_config,
    load_config,
    parse_config,
)


def test_minimal_document_gets_hall_defaults():
    cfg = parse_config("num_subnetworks = 30\naps_per_subnetwork = 20\n")
    assert cfg.num_subnetworks == 30
    assert cfg.antennas_per_ap == 1
    assert cfg.total_antennas == 20
    assert cfg.sensors_per_subnetwork == 5
    assert cfg.hall_side_m == 100.0 and cfg.hall_height_m == 15.0
    assert cfg.subnetwork_radius_m == 5.0 and cfg.min_center_separation_m == 10.0
    assert cfg.ap_height_m == 5.0 and cfg.sensor_height_m == 1.5
    assert cfg.bandwidth_hz == 1e8 and cfg.packet_duration_s == 50e-6
    assert cfg.packet_error_rate == 1e-6 and cfg.uplink_fraction == 0.4
    assert cfg.noise_psd_dbm_hz == -174.0 and cfg.noise_figure_db == 9.0
    assert cfg.lbt_threshold_dbm == -72.0
    assert cfg.clutter_size_m == 2.0 and cfg.effective_clutter_height_m == 10.0
    assert cfg.carrier_freq_ghz == 6.0
    assert cfg.num_drops == 1000


def test_indivisible_antenna_split_rejected():
    with pytest.raises(ConfigValidationError, match="mod"):
        parse_config("num_subnetworks = 30\naps_per_subnetwork = 7\n")


def test_packet_error_rate_out_of_range():
    with pytest.raises(ConfigValidationError, match="packet_error_rate"):
        parse_config("num_subnetworks = 1\naps_per_subnetwork = 1\npacket_error_rate = 0.7\n")


@pytest.mark.parametrize("line, match", [
    ("uplink_fraction = 0.0", "uplink_fraction"),
    ("clutter_density = 1.0", "clutter_density"),
    ("hall_side_m = -1.0", "hall_side_m"),
    ("sensors_per_subnetwork = 25", "zero-forcing"),
    ("power_mode = \"csma\"", "power_mode"),
])
def test_invariant_violations(line, match):
    with pytest.raises(ConfigValidationError, match=match):
        parse_config(f"num_subnetworks = 2\naps_per_subnetwork = 5\n{line}\n")


def test_unknown_key_rejected():
    with pytest.raises(ConfigParseError, match="bogus"):
        parse_config("num_subnetworks = 1\naps_per_subnetwork = 1\nbogus = 3\n")


def test_parse_error_names_line():
    with pytest.raises(ConfigParseError, match="line 2"):
        parse_config("num_subnetworks = 1\naps_per_subnetwork = = 1\n")


def test_wrong_type_names_field():
    with pytest.raises(ConfigParseError, match="num_drops"):
        parse_config("num_subnetworks = 1\naps_per_subnetwork = 1\nnum_drops = 1.5\n")


def test_missing_required_key():
    with pytest.raises(ConfigValidationError, match="aps_per_subnetwork"):
        parse_config("num_subnetworks = 1\n")


def test_load_config_reports_path(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("num_subnetworks = 1\n")
    with pytest.raises(ConfigValidationError, match="bad.toml"):
        load_config(p)


@settings(max_examples=60, deadline=None)
@given(
    B=st.integers(1, 100),
    A=st.sampled_from([1, 2, 4, 5, 10, 20]),
    mode=st.sampled_from(["fixed", "apr"]),
    power=st.floats(-40, 10, allow_nan=False),
    threshold=st.floats(-100, -40, allow_nan=False),
    seed=st.integers(0, 2**64 - 1),
    density=st.floats(0.01, 0.99),
    include=st.booleans(),
)
def test_round_trip(B, A, mode, power, threshold, seed, density, include):
    cfg = SimConfig(num_subnetworks=B, aps_per_subnetwork=A, power_mode=mode,
                    tx_power_dbm=power, lbt_threshold_dbm=threshold, master_seed=seed,
                    clutter_density=density, include_deferred_interference=include)
    assert parse_config(dump_config(cfg)) == cfg


def test_shipped_scenarios_parse():
    from pathlib import Path

    files = sorted((Path(__file__).parent.parent / "configs").glob("*.toml"))
    assert len(files) == 48
    for f in files:
        load_config(f)
