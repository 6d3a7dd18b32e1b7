"""Shared fixtures: cross-sections, catalog potentials and solver configs."""
import os

import numpy as np
import pytest
import yaml

from wguide.catalog import ASYMMETRIC_STRIP, SQUARE, SYMMETRIC_STRIP, build_potential
from wguide.threshold_solver import DiscretizationConfig

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
TEMPLATES = os.path.join(ROOT, "templates")


@pytest.fixture
def symmetric_strip():
    return SYMMETRIC_STRIP


@pytest.fixture
def asymmetric_strip():
    return ASYMMETRIC_STRIP


@pytest.fixture
def square():
    return SQUARE


@pytest.fixture
def box():
    return build_potential("box", 2, {"amplitude": -1.0})


@pytest.fixture
def fast_cfg():
    return DiscretizationConfig(j_max=10, nodes_per_panel=12)


@pytest.fixture
def config_dict():
    return {
        "cross_section": {"n": 2, "interval": [-np.pi / 2, np.pi / 2]},
        "potential": {"name": "box", "params": {"amplitude": -1.0}},
        "experiment": {"alpha": 0.0, "h": [0.2]},
        "solver": {"mode": "direct", "j_max": 10, "nodes_per_panel": 12},
        "output": {"formats": ["csv", "json"]},
    }


@pytest.fixture
def write_config(tmp_path):
    """Write a mapping as config.yaml under tmp_path and return its path."""

    def _write(config, name="config.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(config), encoding="utf-8")
        return str(path)

    return _write
