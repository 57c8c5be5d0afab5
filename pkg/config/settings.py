"""
Configuration management for gkmquiver
"""

import copy
import json
import os
from typing import Dict, Any, Optional, Union
from pathlib import Path
from utils.logger import setup_logger

logger = setup_logger(__name__)

CONFIG_DIR = Path(__file__).parent
USER_CONFIG_PATH = CONFIG_DIR / "user_config.json"


def get_default_config() -> Dict[str, Any]:
    """Return default configuration"""
    return {
        "oracle": {
            "budget": 1000000
        },
        "output": {
            "format": "json"
        },
        "sweep": {
            "max_n": 4,
            "max_N": 5,
            "max_points": 64,
            "suites": ["fixpoints", "edges", "graph", "abbv"]
        },
        "logging": {
            "level": "WARNING"
        }
    }


def _deep_merge(base: Dict[str, Any], updates: Dict[str, Any]) -> Dict[str, Any]:
    for key, value in updates.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_merge(base[key], value)
        else:
            base[key] = value
    return base


def load_config(path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """
    Load user configuration merged over the defaults

    Args:
        path: Explicit config file; falls back to $GKMQUIVER_CONFIG and
            then config/user_config.json

    Returns:
        Configuration dictionary (defaults when no file is present)
    """
    config = get_default_config()
    if path is None:
        path = os.environ.get("GKMQUIVER_CONFIG") or USER_CONFIG_PATH
    path = Path(path)

    if not path.exists():
        logger.debug(f"No configuration at {path}, using defaults")
        return config

    try:
        with open(path, 'r', encoding='utf-8') as f:
            user_config = json.load(f)
        logger.info(f"Loaded configuration from {path}")
        return _deep_merge(config, user_config)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Error loading configuration: {e}")
        return get_default_config()


def update_config(config: Dict[str, Any], updates: Dict[str, Any]) -> Dict[str, Any]:
    """Return a copy of config with updates deep-merged in"""
    return _deep_merge(copy.deepcopy(config), updates)
