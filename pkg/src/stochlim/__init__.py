"""stochlim: a desk-scale verification lab for weak-coupling asymptotics.

Modules by concern:

``funcspace``   closed-form test functions and spectral reduction
``quadrature``  the adaptive integration engine and principal values
``oscint``      rescaled oscillatory integrals, expansions, slope fits
``coeffs``      noise-strength constants by two independent routes
``fock``        indefinite-metric one-particle space and Fock ladder
``models``      closed-form model vacuum expectations and the correction ODE
``oracle``      independent verification machinery (closed forms, scipy,
                dense propagators)
``cli``         batch front-end over a flat key = value configuration
"""

from .errors import (
    AccuracyError,
    CapabilityError,
    ConfigError,
    IllConditionedFitError,
    InsufficientDataError,
    StochlimError,
    TruncationOverflowError,
    UnsupportedInputError,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "CapabilityError",
    "ConfigError",
    "IllConditionedFitError",
    "InsufficientDataError",
    "StochlimError",
    "TruncationOverflowError",
    "UnsupportedInputError",
    "__version__",
]
