"""Randers metrics, radial profiles, a grid Poisson solver and verification suites."""

import json

from ._core import (
    InputError,
    MetricConstants,
    NumericalError,
    RandersStructure,
    V_cn,
    sigma_closed,
    solve_pde,
    solve_radial,
    suite_names,
    verify_json,
    w_c,
)

__all__ = [
    "InputError",
    "MetricConstants",
    "NumericalError",
    "RandersStructure",
    "V_cn",
    "sigma_closed",
    "solve_pde",
    "solve_radial",
    "suite_names",
    "verify",
    "w_c",
]


def verify(suite="all", seed=None, samples=1000, tol_scale=1.0, threads=1):
    """Run one suite (or all) and return the parsed JSON report."""
    kwargs = {"suite": suite, "samples": samples, "tol_scale": tol_scale, "threads": threads}
    if seed is not None:
        kwargs["seed"] = seed
    return json.loads(verify_json(**kwargs))
