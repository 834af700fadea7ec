"""Differentially private conditional independence tests.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (
    gcm_test,
    generate,
    infer_bound,
    priv_gcm_test,
    run_experiment,
    sensitivity_crt,
    sensitivity_gcm,
    synthetic_trial,
)

__version__ = "0.1.0"

__all__ = [
    "gcm_test",
    "generate",
    "infer_bound",
    "priv_gcm_test",
    "run_experiment",
    "sensitivity_crt",
    "sensitivity_gcm",
    "synthetic_trial",
    "__version__",
]
