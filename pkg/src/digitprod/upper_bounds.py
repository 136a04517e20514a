"""Solve the root equations for the upper-bound exponents eta.

For the nonzero-digit variant the exponent comes from the unique positive
root of F; for the all-digit variant from the root of G when G(0) < 0, and
from the closed-form endpoint beta = 0 otherwise (which happens exactly for
b = 3, where G is positive everywhere).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .digits import BaseContext, Variant, _check_variant
from .zeta import F, F_prime, G, G_prime, zeta_eval

SOLVER_TOL = 1e-12
BISECTION_WIDTH = 1e-6
MAX_ITERATIONS = 300


class NonconvergenceError(RuntimeError):
    """Root refinement failed to reach tolerance; carries the last bracket."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(f"{message} (last bracket: [{bracket[0]!r}, {bracket[1]!r}])")
        self.bracket = bracket


@dataclass(frozen=True)
class ExponentSolution:
    """A solved upper-bound exponent for one base and digit-product variant."""

    base: int
    variant: Variant
    s_star: float
    eta: float
    residual: float
    bracket: tuple[float, float]
    iterations: int


def _eta_at(ctx: BaseContext, variant: Variant, beta: float) -> float:
    """Exponent value 1 + log((shift + zeta(beta))/b) / ((1+beta) log b).

    shift is 1 for the nonzero variant and 0 for the all variant.
    """
    shift = 1.0 if variant == "nonzero" else 0.0
    z = zeta_eval(ctx, beta).zeta
    return 1.0 + math.log((shift + z) / ctx.b) / ((1.0 + beta) * math.log(ctx.b))


def _solve_root(f, fp, *, max_iterations: int = MAX_ITERATIONS) -> tuple[float, float, tuple[float, float], int]:
    """Find the unique positive root of a strictly increasing f with f(0) < 0.

    Brackets by doubling, bisects down to width BISECTION_WIDTH, then polishes
    with Newton steps safeguarded to stay inside the bracket. Returns
    (root, residual, initial_bracket, iterations).
    """
    iterations = 0
    lo, flo = 0.0, f(0.0)
    if flo >= 0.0:
        raise ValueError("expected f(0) < 0")
    hi = 1.0
    fhi = f(hi)
    while fhi <= 0.0:
        lo, flo = hi, fhi
        hi *= 2.0
        fhi = f(hi)
        iterations += 1
        if iterations > 100:
            raise NonconvergenceError("could not bracket a sign change", (lo, hi))
    bracket = (lo, hi)

    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        iterations += 1
        if fm < 0.0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if iterations > max_iterations:
            raise NonconvergenceError("bisection did not converge", (lo, hi))

    s = 0.5 * (lo + hi)
    fs = f(s)
    iterations += 1
    while True:
        if iterations > max_iterations:
            raise NonconvergenceError("Newton polish did not converge", (lo, hi))
        # keep the bracket valid around the current iterate
        if fs < 0.0:
            lo = s
        else:
            hi = s
        deriv = fp(s)
        step_ok = deriv > 0.0
        if step_ok:
            s_new = s - fs / deriv
            if not (lo < s_new < hi):
                step_ok = False
        if not step_ok:
            s_new = 0.5 * (lo + hi)
        delta = abs(s_new - s)
        s = s_new
        fs = f(s)
        iterations += 1
        if delta < SOLVER_TOL and abs(fs) < SOLVER_TOL:
            return s, abs(fs), bracket, iterations


def solve_upper(ctx: BaseContext, variant: Variant) -> ExponentSolution:
    """Solve for the upper-bound exponent of the given variant.

    nonzero: root of F, eta from the (1 + zeta)/b form.
    all: root of G when G(0) < 0; otherwise the curve is increasing on
    [0, inf) and the optimum sits at the endpoint beta = 0, which evaluates
    in closed form (for b = 3 this is log 2 / log 3).
    """
    _check_variant(variant)
    if variant == "nonzero":
        f = lambda s: F(ctx, s)
        fp = lambda s: F_prime(ctx, s)
    else:
        if G(ctx, 0.0) > 0.0:
            eta = _eta_at(ctx, "all", 0.0)
            return ExponentSolution(
                base=ctx.b,
                variant=variant,
                s_star=0.0,
                eta=eta,
                residual=0.0,
                bracket=(0.0, 0.0),
                iterations=0,
            )
        f = lambda s: G(ctx, s)
        fp = lambda s: G_prime(ctx, s)
    s_star, residual, bracket, iterations = _solve_root(f, fp)
    eta = _eta_at(ctx, variant, s_star)
    return ExponentSolution(
        base=ctx.b,
        variant=variant,
        s_star=s_star,
        eta=eta,
        residual=residual,
        bracket=bracket,
        iterations=iterations,
    )


def gamma_tradeoff(ctx: BaseContext, alpha: float, beta: float) -> float:
    """alpha*beta + log(1 + zeta(beta)) / log b, the nonzero-variant trade-off."""
    _check_tradeoff_args(alpha, beta)
    z = zeta_eval(ctx, beta).zeta
    return alpha * beta + math.log(1.0 + z) / math.log(ctx.b)


def delta_tradeoff(ctx: BaseContext, alpha: float, beta: float) -> float:
    """alpha*beta + log(zeta(beta)) / log b, the all-variant trade-off."""
    _check_tradeoff_args(alpha, beta)
    z = zeta_eval(ctx, beta).zeta
    return alpha * beta + math.log(z) / math.log(ctx.b)


def eta_curve(
    ctx: BaseContext, variant: Variant, beta_grid: list[float]
) -> list[tuple[float, float]]:
    """Evaluate the one-variable exponent objective along an ascending beta grid.

    The solver's root should be the argmin of this curve; exposing the curve
    lets callers confirm that independently.
    """
    _check_variant(variant)
    prev = None
    for beta in beta_grid:
        if beta < 0:
            raise ValueError(f"grid values must be >= 0, got {beta!r}")
        if prev is not None and beta <= prev:
            raise ValueError("grid must be strictly ascending")
        prev = beta
    return [(beta, _eta_at(ctx, variant, beta)) for beta in beta_grid]


def _check_tradeoff_args(alpha: float, beta: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if beta < 0.0:
        raise ValueError(f"beta must be >= 0, got {beta!r}")
