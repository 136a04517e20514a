"""Exponent bounds and exact counts for integers divisible by their base-b digit product."""

from .counting import (
    CountQuery,
    CountResult,
    SmoothProduct,
    brute_count,
    hybrid_count,
    slope_estimate,
    smooth_products,
)
from .digits import (
    BaseContext,
    DigitProduct,
    DigitTally,
    context,
    digit_product,
    digits_of,
    is_member,
    nu,
    tally,
)
from .lower_bounds import (
    AlphaProfile,
    WitnessBatch,
    construct_witnesses,
    feasibility,
    maximize,
    multinomial_rate,
    objective,
)
from .upper_bounds import (
    ExponentSolution,
    NonconvergenceError,
    delta_tradeoff,
    eta_curve,
    gamma_tradeoff,
    solve_upper,
)
from .zeta import ZetaEval, F, G, zeta_eval

__version__ = "0.1.0"

__all__ = [
    "AlphaProfile",
    "BaseContext",
    "CountQuery",
    "CountResult",
    "DigitProduct",
    "DigitTally",
    "ExponentSolution",
    "F",
    "G",
    "NonconvergenceError",
    "SmoothProduct",
    "WitnessBatch",
    "ZetaEval",
    "brute_count",
    "construct_witnesses",
    "context",
    "delta_tradeoff",
    "digit_product",
    "digits_of",
    "eta_curve",
    "feasibility",
    "gamma_tradeoff",
    "hybrid_count",
    "is_member",
    "maximize",
    "multinomial_rate",
    "nu",
    "objective",
    "slope_estimate",
    "smooth_products",
    "solve_upper",
    "tally",
    "zeta_eval",
]
