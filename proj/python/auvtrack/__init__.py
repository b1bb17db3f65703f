"""Cooperative bearing-only target tracking with sequential planning."""

import json

from ._core import (
    estimate,
    fiedler,
    slot_byte_budget,
    sweep,
    thorp_absorption,
    transmission_loss,
    validate,
)
from ._core import run as _run

__all__ = [
    "estimate",
    "fiedler",
    "run",
    "slot_byte_budget",
    "sweep",
    "thorp_absorption",
    "transmission_loss",
    "validate",
]


def run(path, seed=None):
    """Run a scenario file; returns (summary dict, rounds CSV text)."""
    summary, csv = _run(str(path), seed)
    return json.loads(summary), csv
