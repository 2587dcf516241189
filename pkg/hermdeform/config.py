"""hermdeform - 設定管理"""

import json
import sys
from pathlib import Path

from .algebra import Alpha

# デフォルト設定
DEFAULT_N_MAX_CEILING = 16  # n_max の上限（係数は階乗で増える）
DEFAULT_VERIFY_N_MAX = 8
DEFAULT_VERIFY_S_MAX = 4
DEFAULT_WORKERS = 4
DEFAULT_FORMAT = "plain"

CONFIG_DIR = Path.home() / ".hermdeform"
CONFIG_FILE = CONFIG_DIR / "config.json"

# 記号的な s を許す族
SYMBOLIC_FAMILIES = ("H", "M")

# 整数設定の下限
INT_MINIMUMS = {
    "n_max_ceiling": 0,
    "verify_n_max": 0,
    "verify_s_max": 0,
    "workers": 1,
}
FORMAT_CHOICES = ("plain", "latex", "json", "csv")


def _checked_value(key: str, value):
    """
    設定ファイルの 1 項目を検査する

    Raises:
        ValueError: 型または範囲が不正な場合
    """
    if key in INT_MINIMUMS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"{key} は整数を指定してください（指定値: {value!r}）")
        if value < INT_MINIMUMS[key]:
            raise ValueError(f"{key} は {INT_MINIMUMS[key]} 以上を指定してください（指定値: {value}）")
    elif key == "format" and value not in FORMAT_CHOICES:
        raise ValueError(f"format は {', '.join(FORMAT_CHOICES)} のいずれかです（指定値: {value!r}）")
    return value


def get_config() -> dict:
    """
    設定ファイルを読み込む。存在しない場合はデフォルト値を返す。

    Returns:
        dict: 設定辞書
    """
    defaults = {
        "n_max_ceiling": DEFAULT_N_MAX_CEILING,
        "verify_n_max": DEFAULT_VERIFY_N_MAX,
        "verify_s_max": DEFAULT_VERIFY_S_MAX,
        "workers": DEFAULT_WORKERS,
        "format": DEFAULT_FORMAT,
    }

    if CONFIG_FILE.exists():
        try:
            with open(CONFIG_FILE, "r", encoding="utf-8") as f:
                user_config = json.load(f)
            if not isinstance(user_config, dict):
                raise ValueError("top-level value is not an object")
            for key, value in user_config.items():
                try:
                    defaults[key] = _checked_value(key, value)
                except ValueError as e:
                    print(f"Warning: Ignoring {key} in {CONFIG_FILE}: {e}", file=sys.stderr)
            if defaults["verify_n_max"] > defaults["n_max_ceiling"]:
                print(
                    f"Warning: verify_n_max {defaults['verify_n_max']} exceeds n_max_ceiling "
                    f"{defaults['n_max_ceiling']}; using the ceiling",
                    file=sys.stderr,
                )
                defaults["verify_n_max"] = defaults["n_max_ceiling"]
        except (json.JSONDecodeError, ValueError, OSError) as e:
            print(f"Warning: Could not read config file {CONFIG_FILE}: {e}", file=sys.stderr)

    return defaults


def save_config(config: dict) -> bool:
    """
    設定をファイルに保存する。

    Args:
        config: 保存する設定辞書

    Returns:
        bool: 保存成功ならTrue
    """
    try:
        CONFIG_DIR.mkdir(parents=True, exist_ok=True)
        with open(CONFIG_FILE, "w", encoding="utf-8") as f:
            json.dump(config, f, indent=2, ensure_ascii=False)
        return True
    except OSError as e:
        print(f"Warning: Could not save config file {CONFIG_FILE}: {e}", file=sys.stderr)
        return False


def validate_n_max(n_max: int, ceiling: int = DEFAULT_N_MAX_CEILING) -> int:
    """
    n_max をバリデーションする。

    Raises:
        ValueError: 0 未満または上限を超える場合
    """
    if n_max < 0:
        raise ValueError(f"n は 0 以上を指定してください（指定値: {n_max}）")
    if n_max > ceiling:
        raise ValueError(
            f"n は {ceiling} 以下を指定してください（指定値: {n_max}）。"
            "上限は --ceiling で変更できます"
        )
    return n_max


def validate_alpha(text: str) -> Alpha:
    """"+1", "1", "-1", "+", "-" を Alpha にする"""
    return Alpha.parse(text)


def validate_s(text: str, family: str) -> int | None:
    """
    s の指定をバリデーションする。

    Args:
        text: "sym" または 0 以上の整数
        family: 対象の族（H, M, C, W, D）

    Returns:
        int | None: 数値の s、記号的なら None

    Raises:
        ValueError: 族と s の組み合わせが不正な場合
    """
    if text == "sym":
        if family not in SYMBOLIC_FAMILIES:
            raise ValueError(f"族 {family} では s=sym は使えません。0 以上の整数を指定してください")
        return None
    try:
        value = int(text)
    except ValueError:
        raise ValueError(f"s は 0 以上の整数か sym を指定してください（指定値: {text}）") from None
    if value < 0:
        raise ValueError(f"s は 0 以上の整数を指定してください（指定値: {value}）")
    return value
