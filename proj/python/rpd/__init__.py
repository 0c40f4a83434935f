"""Randomized block-coordinate primal-dual solver toolkit.

Thin Python surface over the C++ core: the prox library, the step-size
condition constants, and spec-driven experiment runs.
"""

from ._rpd import (  # noqa: F401
    ConditionError,
    ProxFn,
    SpecError,
    alpha_hat,
    check,
    project_consensus,
    prox_conjugate,
    prox_metric,
    reference,
    run,
    scaled_norm,
    theta_alpha,
)

__all__ = [
    "ConditionError",
    "ProxFn",
    "SpecError",
    "alpha_hat",
    "check",
    "project_consensus",
    "prox_conjugate",
    "prox_metric",
    "reference",
    "run",
    "scaled_norm",
    "theta_alpha",
]
