"""Calibration defaults.

All tunable constants (seeds, bin counts, probe meshes, budgets, acceptance
bands) live in defaults.cfg next to this module.  The file is flat
``key = value`` lines; values are parsed as int, float, bool or string.
A user file passed to load() overrides individual keys.
"""

from __future__ import annotations

import importlib.resources
from pathlib import Path


def _parse_value(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_config_text(text: str) -> dict:
    """Parse flat key = value lines; '#' starts a comment."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = _parse_value(value)
    return out


def load_defaults() -> dict:
    text = importlib.resources.files("spherepts").joinpath("defaults.cfg").read_text()
    cfg = parse_config_text(text)
    if cfg.get("config_version") != 1:
        raise ValueError(f"unsupported config_version {cfg.get('config_version')!r}")
    return cfg


def load(user_path: str | Path | None = None) -> dict:
    """Packaged defaults, with keys overridden by the optional user file."""
    cfg = load_defaults()
    if user_path is not None:
        user = parse_config_text(Path(user_path).read_text())
        unknown = set(user) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(user)
    return cfg
