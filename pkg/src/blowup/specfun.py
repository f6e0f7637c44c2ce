"""Self-contained log-Gamma and Beta functions.

Every closed-form norm in this package reduces to B(x, y) for positive
arguments, and the solvability windows push the first Beta argument toward
0 where Gamma blows up.  Both functions therefore work in log space:

    ln B(x, y) = ln Gamma(x) + ln Gamma(y) - ln Gamma(x + y)

and only the final result is exponentiated.  No external special-function
library is used; the quadrature oracle in ``blowup.oracles`` provides an
independent check of B against its defining integral.
"""

from __future__ import annotations

import math

__all__ = ["log_gamma", "beta", "log_beta"]

# Lanczos approximation, g = 7, 9 terms.  Classic double-precision table
# (Godfrey's least-squares fit, reproduced e.g. by Boost and the GSL docs);
# relative error of Gamma is a few ulp for real arguments >= 0.5.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0.

    Arguments below 0.5 are lifted with ln Gamma(x) = ln Gamma(x+1) - ln x,
    which stays accurate down to the underflow limit.  Raises ValueError for
    nonpositive or non-finite input.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"log_gamma requires finite x > 0, got {x!r}")

    shift = 0.0
    while x < 0.5:
        shift -= math.log(x)
        x += 1.0

    z = x - 1.0
    series = _LANCZOS_COEFFS[0]
    for k in range(1, len(_LANCZOS_COEFFS)):
        series += _LANCZOS_COEFFS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return shift + _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(series)


def log_beta(x: float, y: float) -> float:
    """ln B(x, y) for x, y > 0."""
    if not (math.isfinite(x) and math.isfinite(y)) or x <= 0.0 or y <= 0.0:
        raise ValueError(f"beta requires finite x, y > 0, got x={x!r}, y={y!r}")
    return log_gamma(x) + log_gamma(y) - log_gamma(x + y)


def beta(x: float, y: float) -> float:
    """Euler Beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y).

    Equals the integral of t^(x-1) (1-t)^(y-1) over (0, 1), which converges
    iff x > 0 and y > 0; nonpositive arguments raise ValueError.  Symmetric
    in (x, y) by construction.
    """
    return math.exp(log_beta(x, y))
