"""Phase oscillators coupled through chains of excitable cells."""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, run_config

__version__ = "0.1.0"


def run_config_json(ini_text):
    """Run an INI experiment config and return its record as a dict."""
    import json

    return json.loads(run_config(ini_text))
