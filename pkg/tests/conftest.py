"""共通フィクスチャ"""

import pytest

from hermdeform import config


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """設定ファイルをホームディレクトリではなく一時ディレクトリに向ける"""
    config_dir = tmp_path / "config"
    monkeypatch.setattr(config, "CONFIG_DIR", config_dir)
    monkeypatch.setattr(config, "CONFIG_FILE", config_dir / "config.json")
    return config_dir / "config.json"
