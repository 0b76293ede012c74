import pytest

from config.errors import ConfigError
from config.run_config import RunConfig, load_config, parse_config_text, suggest_key
from samplers.schemas import SamplerKind
from tests.helpers import write_lines


class TestLoadConfig:

    def test_flag_beats_file(self, tmp_path):
        path = write_lines(tmp_path, ["# run", "lr_w = 1e-3", "epochs = 4"], name="run.cfg")
        cfg = load_config(path, {"lr_w": "3e-4", "epochs": None})
        assert cfg.training().lr_w == pytest.approx(3e-4)
        assert cfg.training().epochs == 4

    def test_empty_file_is_defaults(self, tmp_path):
        path = write_lines(tmp_path, [], name="empty.cfg")
        assert load_config(path) == RunConfig()

    def test_no_file(self):
        assert load_config(None, {"seed": "5"}).seed == 5

    def test_unknown_key_suggests_alias(self, tmp_path):
        path = write_lines(tmp_path, ["learningrate = 0.01"], name="bad.cfg")
        with pytest.raises(ConfigError) as info:
            load_config(path)
        assert info.value.key == "learningrate"
        assert info.value.suggestion == "lr_w"
        assert "lr_w" in str(info.value)

    def test_typo_suggests_close_key(self):
        assert suggest_key("lr_thta") == "lr_theta"
        with pytest.raises(ConfigError):
            load_config(None, {"lr_thta": "0.1"})

    def test_invalid_values(self):
        with pytest.raises(ConfigError):
            load_config(None, {"epochs": "0"})
        with pytest.raises(ConfigError):
            load_config(None, {"split_ratios": "3,1"})
        with pytest.raises(ConfigError):
            load_config(None, {"samplers": "rns;wns"})
        with pytest.raises(ConfigError):
            load_config(None, {"tau_0": "0.05", "tau_min": "0.1"})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "nope.cfg"))

    def test_line_without_equals(self):
        with pytest.raises(ConfigError):
            parse_config_text("lr_w 0.1", source="x.cfg")


class TestProjections:

    def test_training_overrides(self):
        cfg = load_config(None, {"k": "2", "dim": "8", "dense_adam": "true", "seed": "9"})
        training = cfg.training()
        assert (training.k, training.dim, training.seed, training.dense_adam) == (2, 8, 9, True)

    def test_sampler_lists(self):
        cfg = load_config(None, {"samplers": "rns; pns:beta=0.5", "sampler": "dns:c=4"})
        assert [s.kind for s in cfg.sampler_specs()] == [SamplerKind.RNS, SamplerKind.PNS]
        assert cfg.sampler_spec().candidates == 4

    def test_ratios_and_schedule(self):
        cfg = load_config(None, {"split_ratios": "8,1,1", "tau_0": "2.0", "tau_decay": "0.5"})
        assert cfg.ratios() == (8, 1, 1)
        assert cfg.schedule().tau_0 == 2.0
        assert cfg.search_options().schedule.decay == 0.5

    def test_missing_data(self):
        with pytest.raises(ConfigError) as info:
            RunConfig().require_data()
        assert info.value.key == "data"

    def test_resolved_includes_training(self):
        resolved = load_config(None, {"epochs": "3"}).resolved()
        assert resolved["training"]["epochs"] == 3
        assert resolved["epochs"] == 3
