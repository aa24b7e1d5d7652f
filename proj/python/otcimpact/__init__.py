"""Price impact estimation for trade and quote tapes."""

from ._core import (
    OtcImpactError,
    SignedTrade,
    SynthTape,
    __version__,
    autocorr,
    bound_lower,
    bound_upper,
    c_true,
    fit_stretched,
    label_accuracy,
    make_dataset,
    n_eff,
    r_true,
    response,
    run_cli,
    solve_propagator,
    venue_propagators,
)

__all__ = [
    "OtcImpactError",
    "SignedTrade",
    "SynthTape",
    "__version__",
    "autocorr",
    "bound_lower",
    "bound_upper",
    "c_true",
    "fit_stretched",
    "label_accuracy",
    "make_dataset",
    "n_eff",
    "r_true",
    "response",
    "run_cli",
    "solve_propagator",
    "venue_propagators",
]
