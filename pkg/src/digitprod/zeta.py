"""The finite digit power sum, its derivatives, and the two root functions.

zeta_eval(ctx, s) sums d**-s over the digits 1..b-1; F and G are strictly
increasing functions of s whose unique positive roots locate the optimal
trade-off parameter for the nonzero-digit and all-digit count bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .digits import BaseContext


@dataclass(frozen=True)
class ZetaEval:
    """Values of the digit power sum and its first two s-derivatives at s."""

    s: float
    zeta: float
    dzeta: float
    ddzeta: float


def _check_s(s: float) -> float:
    s = float(s)
    if not math.isfinite(s) or s < 0:
        raise ValueError(f"s must be finite and >= 0, got {s!r}")
    return s


def zeta_eval(ctx: BaseContext, s: float) -> ZetaEval:
    """Evaluate sum(d**-s), -sum(log(d) d**-s), sum(log(d)^2 d**-s) for d in 1..b-1.

    Terms are accumulated from d = b-1 downward (smallest first) with exact
    float summation.
    """
    s = _check_s(s)
    z_terms = []
    d1_terms = []
    d2_terms = []
    for d in range(ctx.b - 1, 0, -1):
        w = float(d) ** (-s)
        ld = math.log(d)
        z_terms.append(w)
        d1_terms.append(ld * w)
        d2_terms.append(ld * ld * w)
    return ZetaEval(
        s=s,
        zeta=math.fsum(z_terms),
        dzeta=-math.fsum(d1_terms),
        ddzeta=math.fsum(d2_terms),
    )


def F(ctx: BaseContext, s: float) -> float:
    """(1+s) zeta'/(1+zeta) - log((1+zeta)/b); root gives the nonzero-digit exponent."""
    z = zeta_eval(ctx, s)
    return (1.0 + z.s) * z.dzeta / (1.0 + z.zeta) - math.log((1.0 + z.zeta) / ctx.b)


def G(ctx: BaseContext, s: float) -> float:
    """(1+s) zeta'/zeta - log(zeta/b); root gives the all-digit exponent."""
    z = zeta_eval(ctx, s)
    return (1.0 + z.s) * z.dzeta / z.zeta - math.log(z.zeta / ctx.b)


def F_prime(ctx: BaseContext, s: float) -> float:
    """Derivative of F; positive for all s >= 0 by Cauchy-Schwarz on the term weights."""
    z = zeta_eval(ctx, s)
    zp1 = 1.0 + z.zeta
    return (1.0 + z.s) * (zp1 * z.ddzeta - z.dzeta * z.dzeta) / (zp1 * zp1)


def G_prime(ctx: BaseContext, s: float) -> float:
    """Derivative of G; positive for all s >= 0."""
    z = zeta_eval(ctx, s)
    return (1.0 + z.s) * (z.zeta * z.ddzeta - z.dzeta * z.dzeta) / (z.zeta * z.zeta)
