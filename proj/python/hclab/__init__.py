"""Numerical lab for the Hypercyclicity Criterion.

Operators are addressed by zoo id ("rolewicz:2.0", "salas:ones", ...).
Balls are literals like "e1+0.5e3:0.1" or (center, radius) pairs, matrices
are literals like "e1xe2" or numpy arrays. Reports come back as dicts with
the same keys as the CLI's JSON output.
"""

import json as _json

from . import _core
from ._core import DimensionError, Error, GuardBandError, InvalidArgument, materialize, required_dim, zoo

__all__ = [
    "Error",
    "InvalidArgument",
    "DimensionError",
    "GuardBandError",
    "zoo",
    "materialize",
    "required_dim",
    "check_certificate",
    "intersects",
    "first_hit",
    "criterion_condition",
    "construct_witness",
    "default_config",
    "run_battery",
    "prop212_battery",
]


def check_certificate(op, K=10, tol=1e-8, generators=3, seq="k", d=0):
    return _json.loads(_core.check_certificate(op, K, tol, generators, seq, d))


def intersects(op, n, U, V, d=0):
    return _json.loads(_core.intersects(op, n, U, V, d))


def first_hit(op, U, V, n_max=64, d=0):
    return _json.loads(_core.first_hit(op, U, V, n_max, d))


def criterion_condition(op, U, V, W, n_max=64, d=0):
    return _json.loads(_core.criterion_condition(op, U, V, W, n_max, d))


def construct_witness(op, A, B, eps=0.5, d=64, mode="auto"):
    return _json.loads(_core.construct_witness(op, A, B, eps, d, mode))


def default_config():
    return _json.loads(_core.default_config())


def _config(overrides):
    if overrides is None:
        return None
    cfg = default_config()
    cfg.update(overrides)
    return _json.dumps(cfg)


def run_battery(op, config=None):
    """config: dict of BatteryConfig keys overriding the defaults."""
    return _json.loads(_core.run_battery(op, _config(config)))


def prop212_battery(op, seq="k", config=None):
    return _json.loads(_core.prop212_battery(op, seq, _config(config)))
