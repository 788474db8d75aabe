"""Config-file loading with LRU caching.

Tunable pipeline parameters live as JSON under ``config/``.  Engines read
them through :func:`load_config` and let callers override single values
with :func:`setting`.
"""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any

PROJECT_ROOT = Path(__file__).resolve().parents[1]
CONFIG_DIR = PROJECT_ROOT / "config"


@lru_cache(maxsize=32)
def load_config(name: str) -> dict[str, Any]:
    """Load and cache a JSON parameter set by name (without ``.json`` extension)."""
    path = CONFIG_DIR / f"{name}.json"
    if not path.exists():
        raise FileNotFoundError(f"Config set not found: {path}")
    with path.open("r", encoding="utf-8") as handle:
        payload = json.load(handle)
    if not isinstance(payload, dict):
        raise ValueError(f"Config set {name!r} must be a JSON object.")
    return payload


def setting(name: str, *keys: str, override: Any = None) -> Any:
    """Return *override* when given, else the nested value ``config[name][keys...]``."""
    if override is not None:
        return override
    value: Any = load_config(name)
    for key in keys:
        try:
            value = value[key]
        except (KeyError, TypeError) as exc:
            raise KeyError(f"Config set {name!r} has no entry {'.'.join(keys)!r}.") from exc
    return value
