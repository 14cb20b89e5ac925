"""Spread-out contact process toolkit: exact, Monte Carlo, and expansion
numerics for the discretized contact process, with a config-driven runner."""

from _spreadout import (
    CapError,
    InvariantError,
    ModelParams,
    ValidationError,
    __version__,
    estimate_two_point,
    exact_two_point,
    find_lambda_c,
    forward_solve,
    invert_to_pi,
    lace_constants,
    make_params,
    run_config,
)

__all__ = [
    "CapError",
    "InvariantError",
    "ModelParams",
    "ValidationError",
    "__version__",
    "estimate_two_point",
    "exact_two_point",
    "find_lambda_c",
    "forward_solve",
    "invert_to_pi",
    "lace_constants",
    "make_params",
    "run_config",
]


def field_value(field, n, x):
    """Value of a field dict at slice ``n`` and offset tuple ``x``."""
    d, R = field["d"], field["R"]
    side = 2 * R + 1
    idx = 0
    for c in x:
        if c < -R or c > R:
            return 0.0
        idx = idx * side + (c + R)
    return field["data"][n * side**d + idx]
