import json

import pytest

from hermdeform import config
from hermdeform.algebra import Alpha


def test_defaults_without_file():
    cfg = config.get_config()
    assert cfg == {
        "n_max_ceiling": 16,
        "verify_n_max": 8,
        "verify_s_max": 4,
        "workers": 4,
        "format": "plain",
    }


def test_save_and_reload(isolated_config):
    assert config.save_config({"n_max_ceiling": 10, "format": "latex"}) is True
    assert isolated_config.exists()
    cfg = config.get_config()
    assert cfg["n_max_ceiling"] == 10
    assert cfg["format"] == "latex"
    assert cfg["verify_s_max"] == config.DEFAULT_VERIFY_S_MAX


@pytest.mark.parametrize("content", ["{not json", "[1, 2, 3]"])
def test_broken_file_falls_back(isolated_config, capsys, content):
    isolated_config.parent.mkdir(parents=True)
    isolated_config.write_text(content, encoding="utf-8")
    assert config.get_config()["n_max_ceiling"] == config.DEFAULT_N_MAX_CEILING
    assert "Warning" in capsys.readouterr().err


@pytest.mark.parametrize("key,value", [
    ("n_max_ceiling", -1),
    ("n_max_ceiling", "16"),
    ("workers", 0),
    ("workers", True),
    ("verify_s_max", -2),
    ("format", "yaml"),
])
def test_invalid_entry_keeps_default(isolated_config, capsys, key, value):
    config.save_config({key: value, "verify_n_max": 3})
    cfg = config.get_config()
    defaults = {
        "n_max_ceiling": config.DEFAULT_N_MAX_CEILING,
        "workers": config.DEFAULT_WORKERS,
        "verify_s_max": config.DEFAULT_VERIFY_S_MAX,
        "format": config.DEFAULT_FORMAT,
    }
    assert cfg[key] == defaults[key]
    assert cfg["verify_n_max"] == 3
    assert key in capsys.readouterr().err


def test_verify_grid_capped_by_ceiling(capsys):
    config.save_config({"n_max_ceiling": 5, "verify_n_max": 8})
    cfg = config.get_config()
    assert cfg["n_max_ceiling"] == 5
    assert cfg["verify_n_max"] == 5
    assert "verify_n_max" in capsys.readouterr().err


def test_save_failure(tmp_path, monkeypatch, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    monkeypatch.setattr(config, "CONFIG_DIR", blocker)
    monkeypatch.setattr(config, "CONFIG_FILE", blocker / "config.json")
    assert config.save_config({"workers": 2}) is False
    assert "Warning" in capsys.readouterr().err


def test_saved_file_is_readable_json(isolated_config):
    config.save_config({"workers": 2})
    assert json.loads(isolated_config.read_text(encoding="utf-8")) == {"workers": 2}


class TestValidators:
    def test_n_max(self):
        assert config.validate_n_max(0) == 0
        assert config.validate_n_max(16) == 16
        assert config.validate_n_max(20, ceiling=20) == 20
        with pytest.raises(ValueError):
            config.validate_n_max(-1)
        with pytest.raises(ValueError):
            config.validate_n_max(17)

    def test_alpha(self):
        assert config.validate_alpha("-") is Alpha.MINUS
        with pytest.raises(ValueError):
            config.validate_alpha("0")

    @pytest.mark.parametrize("family", ["H", "M"])
    def test_symbolic_allowed(self, family):
        assert config.validate_s("sym", family) is None

    @pytest.mark.parametrize("family", ["C", "W", "D"])
    def test_symbolic_rejected(self, family):
        with pytest.raises(ValueError):
            config.validate_s("sym", family)

    def test_numeric(self):
        assert config.validate_s("3", "C") == 3
        for bad in ("-1", "x", "1.5"):
            with pytest.raises(ValueError):
                config.validate_s(bad, "M")
