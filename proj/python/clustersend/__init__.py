"""Fault-tolerant cluster-to-cluster sending.

Lower bounds, protocol selection, deterministic simulation and adversarial
verification, backed by the C++ core.
"""

import json as _json

from ._core import (
    ConfigError,
    IntegrityError,
    bounds_json,
    guarded_term,
    min_schedule_size,
    run_scenario,
    select_protocol,
    sigma,
    sigma_report,
    tau,
    tau_report,
    validate,
    verify_scenario,
)

__all__ = [
    "ConfigError",
    "IntegrityError",
    "bounds",
    "bounds_json",
    "guarded_term",
    "min_schedule_size",
    "run",
    "run_scenario",
    "select_protocol",
    "sigma",
    "sigma_report",
    "tau",
    "tau_report",
    "validate",
    "verify_scenario",
]


def run(scenario):
    """Execute one run; accepts a dict or json text, returns the transcript dict."""
    if not isinstance(scenario, str):
        scenario = _json.dumps(scenario)
    return _json.loads(run_scenario(scenario))


def bounds(scenario):
    """Lower bounds and protocol selection; accepts a dict or json text."""
    if not isinstance(scenario, str):
        scenario = _json.dumps(scenario)
    return _json.loads(bounds_json(scenario))
