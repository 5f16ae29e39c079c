"""Python bindings for the vsxc forecasting core."""

import json

from ._vsxc import (
    VsxcError,
    decompose,
    default_config_json,
    granger,
    kalman_smooth,
    ljung_box,
    mann_kendall,
    synthetic,
    vmd,
)
from . import _vsxc

__all__ = [
    "VsxcError",
    "decompose",
    "default_config",
    "granger",
    "kalman_smooth",
    "ljung_box",
    "mann_kendall",
    "run_ablation",
    "run_pipeline",
    "synthetic",
    "vmd",
]


def default_config():
    return json.loads(default_config_json())


def run_pipeline(config=None, seed=None):
    """Run the full forecasting pipeline and return the report as a dict."""
    text = json.dumps(config) if config else ""
    return json.loads(_vsxc.run_pipeline_json(text, seed))


def run_ablation(config=None, seed=None):
    """Run the periodic x residual model grid and return the report as a dict."""
    text = json.dumps(config) if config else ""
    return json.loads(_vsxc.run_ablation_json(text, seed))
