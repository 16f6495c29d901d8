import json

import pytest
from pydantic import ValidationError

from loopsim.config import (CONSTANTS, JunctionParams, LoopsimConfig, PhysicalConstants, SimulationMode,
                            apply_overrides, config_hash, load_config, load_raw, validate_config)
from loopsim.errors import ConfigError


class TestDefaults:
    def test_shipped_config_has_no_violations(self, config):
        assert config.violations() == []
        assert validate_config() == []

    def test_spd_detection_energy_is_exact(self, config):
        assert config.synapse.spd.detection_energy == pytest.approx(3.6e-18, rel=1e-12)

    def test_calibrated_junctions_are_overdamped(self, config):
        assert config.transducer.jsf.beta_c == pytest.approx(0.3, rel=1e-3)
        assert not config.transducer.jsf.hysteretic

    def test_jro_is_latching(self, config):
        assert config.neuron.transmitter.jro.beta_c > 1


class TestValidation:
    def test_coupling_violation_is_named(self):
        found = validate_config(overrides=["synapse.mutual_inductance=2e-6"])
        assert any(v.path == "synapse.mutual_inductance" and "coupling" in v.message for v in found)

    def test_chain_fault_is_named(self):
        found = validate_config(overrides=["neuron.transmitter.ntron.channel_current=1e-3"])
        assert any(v.path == "neuron.transmitter.ntron.channel_current" and "chain fault" in v.message
                   for v in found)

    def test_unknown_key_is_a_schema_violation(self):
        found = validate_config(overrides=["synapse.nonsense=1"])
        assert any("synapse.nonsense" in v.path for v in found)

    def test_physical_constants_are_not_configurable(self):
        found = validate_config(overrides=["constants.flux_quantum=2.1e-15"])
        assert [v.path for v in found] == ["constants"]

    def test_flux_quantum_must_match_h_over_2e(self):
        assert CONSTANTS.flux_quantum == pytest.approx(2.067833848e-15, rel=1e-9)
        with pytest.raises(ValidationError):
            PhysicalConstants(flux_quantum=2.1e-15)

    def test_run_settings_have_config_keys(self):
        config = load_config(overrides=["t_end=2e-06", "mode=device"])
        assert config.t_end == 2e-6
        assert config.mode == SimulationMode.DEVICE
        assert load_config().t_end is None
        assert validate_config(overrides=["t_end=-1"])[0].path == "t_end"

    def test_hysteretic_junction_needs_underdamping(self):
        with pytest.raises(ValidationError):
            JunctionParams(critical_current=10e-6, shunt_resistance=5.0, capacitance=1e-15, hysteretic=True)

    def test_with_beta_c_round_trips(self):
        jj = JunctionParams.with_beta_c(40e-6, 2.0, 0.3)
        assert jj.beta_c == pytest.approx(0.3, rel=1e-12)

    def test_anchor_table_must_be_monotone(self, config):
        data = config.model_dump(mode="json")
        data["calibration"]["anchors"][2]["fluxons"] = 1
        with pytest.raises(ValidationError):
            LoopsimConfig.model_validate(data)


class TestLoader:
    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "seed": 1,\n  "solver": {\n}}}\n')
        with pytest.raises(ConfigError) as err:
            load_config(path)
        assert err.value.line is not None
        assert err.value.source == str(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    def test_user_file_layers_over_defaults(self, tmp_path):
        path = tmp_path / "user.json"
        path.write_text(json.dumps({"seed": 42, "synapse": {"si_resistance": 1.0}}))
        cfg = load_config(path)
        assert cfg.seed == 42
        assert cfg.synapse.si_resistance == 1.0
        assert cfg.synapse.mutual_inductance == pytest.approx(97e-9)

    def test_overrides_take_precedence(self, tmp_path):
        path = tmp_path / "user.json"
        path.write_text(json.dumps({"seed": 42}))
        assert load_config(path, overrides=["seed=7"]).seed == 7

    def test_overrides_address_list_items(self):
        data = apply_overrides(load_raw(), ["calibration.anchors.0.fluxons=10"])
        assert data["calibration"]["anchors"][0]["fluxons"] == 10

    def test_malformed_override(self):
        with pytest.raises(ConfigError):
            apply_overrides({}, ["seed"])

    def test_hash_tracks_content(self):
        assert config_hash(load_config()) == config_hash(load_config())
        assert config_hash(load_config(overrides=["seed=3"])) != config_hash(load_config())
