"""Lower-bound exponent machinery: feasible digit-frequency profiles, the
entropy-rate objective, its constrained maximization, and explicit member
construction.

A profile assigns a nonnegative weight alpha[d] to each digit d. It is
feasible when every weighted digit d >= 2 factors entirely over the primes
dividing b and, for each such prime p, the weighted valuation budget
sum(alpha[d] * nu_p(d)) stays within 1. Feasible profiles yield guaranteed
members of the nonzero-variant set via n = b**s * m with m an arrangement
of a digit block drawn from the profile.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .digits import BaseContext, DigitTally, is_member, nu

DEFAULT_SEED = 1729
DEFAULT_CAP = 64.0
BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class AlphaProfile:
    """A digit-weight vector with its feasibility report and objective value."""

    base: int
    alpha: tuple[float, ...]
    feasible: bool
    violations: tuple[str, ...]
    objective: float | None = None
    is_limit: bool = False
    trace: tuple[float, ...] = ()


@dataclass(frozen=True)
class WitnessBatch:
    """Explicitly constructed members n = b**s * m, all verified <= x."""

    base: int
    x: int
    s: int
    tallies: DigitTally
    members: tuple[int, ...]


def supported_digits(ctx: BaseContext) -> tuple[int, ...]:
    """Digits d in 2..b-1 whose prime factors all divide b."""
    divisors = set(ctx.b_prime_divisors)
    out = []
    for d in range(2, ctx.b):
        vec = ctx.digit_exponents[d]
        assert vec is not None
        if all(e == 0 or p in divisors for p, e in zip(ctx.base_primes, vec)):
            out.append(d)
    return tuple(out)


def _budget_loads(ctx: BaseContext, alpha) -> dict[int, float]:
    """Weighted valuation load per prime dividing b: sum over d>=2 of alpha[d]*nu_p(d)."""
    loads = {}
    for p in ctx.b_prime_divisors:
        loads[p] = math.fsum(alpha[d] * nu(p, d) for d in range(2, ctx.b) if alpha[d] != 0.0)
    return loads


def feasibility(ctx: BaseContext, alpha) -> AlphaProfile:
    """Check a weight vector against the support, budget, and sign constraints.

    Returns a profile without an objective value; violations are named
    "negative d=...", "support d=...", or "budget p=...".
    """
    alpha = [float(a) for a in alpha]
    if len(alpha) != ctx.b:
        raise ValueError(f"alpha must have length {ctx.b}, got {len(alpha)}")
    if any(not math.isfinite(a) for a in alpha):
        raise ValueError("alpha entries must be finite")
    violations = []
    for d, a in enumerate(alpha):
        if a < 0:
            violations.append(f"negative d={d}")
    supported = set(supported_digits(ctx))
    for d in range(2, ctx.b):
        if alpha[d] > 0 and d not in supported:
            violations.append(f"support d={d}")
    for p, load in _budget_loads(ctx, alpha).items():
        if load > 1.0 + BUDGET_TOL:
            violations.append(f"budget p={p}")
    return AlphaProfile(
        base=ctx.b,
        alpha=tuple(alpha),
        feasible=not violations,
        violations=tuple(violations),
    )


def objective(ctx: BaseContext, alpha) -> float:
    """Entropy-rate value of a feasible profile.

    With T the total weight over all digits 0..b-1, returns
    (T log T - sum(alpha[d] log alpha[d])) / ((1 + T) log b), with
    0 log 0 = 0. Both sums run over every digit including d = 0.
    """
    report = feasibility(ctx, alpha)
    if not report.feasible:
        raise ValueError(f"infeasible alpha: {', '.join(report.violations)}")
    total = math.fsum(report.alpha)
    if total <= 0.0:
        raise ValueError("alpha must have positive total weight")
    entropy = total * math.log(total) - math.fsum(
        a * math.log(a) for a in report.alpha if a > 0.0
    )
    return entropy / ((1.0 + total) * math.log(ctx.b))


def _objective_free(free_values, log_b: float) -> float:
    """Objective over the free coordinates only (zeros dropped)."""
    total = float(np.sum(free_values))
    if total <= 0.0:
        return 0.0
    pos = free_values[free_values > 0.0]
    entropy = total * math.log(total) - float(np.sum(pos * np.log(pos)))
    return entropy / ((1.0 + total) * log_b)


def _project(point, cap: float, budget_rows, max_sweeps: int = 200):
    """Dykstra projection onto {0 <= x <= cap} intersected with the budget half-spaces."""
    x = np.clip(point, 0.0, cap)
    if not budget_rows:
        return x
    corrections = [np.zeros_like(x) for _ in range(len(budget_rows) + 1)]
    for _ in range(max_sweeps):
        x_prev = x.copy()
        y = x + corrections[0]
        x = np.clip(y, 0.0, cap)
        corrections[0] = y - x
        for i, row in enumerate(budget_rows, start=1):
            y = x + corrections[i]
            excess = float(row @ y) - 1.0
            if excess > 0.0:
                x = y - row * (excess / float(row @ row))
            else:
                x = y
            corrections[i] = y - x
        if float(np.max(np.abs(x - x_prev))) < 1e-13:
            break
    return np.clip(x, 0.0, cap)


def _num_gradient(values, log_b: float, cap: float) -> np.ndarray:
    """Central-difference gradient, one-sided against the box boundaries."""
    g = np.zeros_like(values)
    base_h = 1e-7
    for i in range(len(values)):
        h = base_h * max(1.0, abs(values[i]))
        lo = values[i] - h >= 0.0
        hi = values[i] + h <= cap
        vp = values.copy()
        vm = values.copy()
        if lo and hi:
            vp[i] += h
            vm[i] -= h
            g[i] = (_objective_free(vp, log_b) - _objective_free(vm, log_b)) / (2 * h)
        elif hi:
            vp[i] += h
            g[i] = (_objective_free(vp, log_b) - _objective_free(values, log_b)) / h
        else:
            vm[i] -= h
            g[i] = (_objective_free(values, log_b) - _objective_free(vm, log_b)) / h
    return g


def _ascend(start, log_b: float, cap: float, budget_rows, tol: float, max_iter: int):
    """Projected gradient ascent with backtracking; the value sequence never decreases."""
    x = _project(np.asarray(start, dtype=float), cap, budget_rows)
    value = _objective_free(x, log_b)
    trace = [value]
    step = 1.0
    for _ in range(max_iter):
        grad = _num_gradient(x, log_b, cap)
        improved = False
        t = step
        while t > 1e-14:
            cand = _project(x + t * grad, cap, budget_rows)
            cand_value = _objective_free(cand, log_b)
            if cand_value > value:
                x, value = cand, cand_value
                trace.append(value)
                step = min(t * 2.0, 8.0)
                improved = True
                break
            t *= 0.5
        if not improved:
            break
        if len(trace) >= 2 and trace[-1] - trace[-2] < tol:
            break
    return x, value, trace


def _polish(x, log_b: float, cap: float, budget_rows):
    """Local refinement of the active-set optimum via an SQP solve."""
    constraints = [
        {"type": "ineq", "fun": (lambda v, r=row: 1.0 - float(r @ v))}
        for row in budget_rows
    ]
    res = minimize(
        lambda v: -_objective_free(np.asarray(v), log_b),
        x,
        method="SLSQP",
        bounds=[(0.0, cap)] * len(x),
        constraints=constraints,
        options={"maxiter": 200, "ftol": 1e-14},
    )
    if not res.success:
        return None
    cand = _project(np.asarray(res.x, dtype=float), cap, budget_rows)
    return cand, _objective_free(cand, log_b)


def maximize(
    ctx: BaseContext,
    *,
    cap: float = DEFAULT_CAP,
    starts: int = 32,
    tol: float = 1e-8,
    seed: int = DEFAULT_SEED,
    max_iter: int = 400,
) -> AlphaProfile:
    """Best feasible profile found for the lower-bound objective.

    When b is prime no digit d >= 2 is admissible and the objective approaches
    log 2 / log b as the weights on digits 0 and 1 grow without bound; that
    supremum is returned directly, flagged with is_limit, with the box-capped
    vector as the reported witness. For composite b a multi-start projected
    gradient ascent runs over the free coordinates, each run polished by a
    local SQP refinement; ties are broken toward the lexicographically
    smallest vector at 1e-6 resolution.
    """
    supported = supported_digits(ctx)
    if not supported:
        sup_value = math.log(2.0) / math.log(ctx.b)
        alpha = [0.0] * ctx.b
        alpha[0] = alpha[1] = cap
        return AlphaProfile(
            base=ctx.b,
            alpha=tuple(alpha),
            feasible=True,
            violations=(),
            objective=sup_value,
            is_limit=True,
        )

    free_idx = [0, 1, *supported]
    n_free = len(free_idx)
    log_b = math.log(ctx.b)
    budget_rows = []
    for p in ctx.b_prime_divisors:
        row = np.array([float(nu(p, d)) if d >= 2 else 0.0 for d in free_idx])
        if row.any():
            budget_rows.append(row)

    rng = random.Random(seed)
    start_points = [
        np.array([cap, cap] + [0.0] * (n_free - 2)),
        np.full(n_free, 0.5),
        np.array([2.0, 2.0] + [0.25] * (n_free - 2)),
    ]
    for _ in range(starts):
        point = np.array([rng.uniform(0.0, 4.0) for _ in range(n_free)])
        point[0] = rng.uniform(0.0, cap)
        point[1] = rng.uniform(0.0, cap)
        start_points.append(point)

    candidates = []
    for point in start_points:
        x, value, trace = _ascend(point, log_b, cap, budget_rows, tol, max_iter)
        polished = _polish(x, log_b, cap, budget_rows)
        if polished is not None and polished[1] > value:
            x, value = polished
            trace = [*trace, value]
        candidates.append((value, x, trace))

    best_value = max(value for value, _, _ in candidates)
    tied = [
        (tuple(round(float(v), 6) for v in x), x, trace)
        for value, x, trace in candidates
        if best_value - value <= 1e-9
    ]
    tied.sort(key=lambda item: item[0])
    _, best_x, best_trace = tied[0]

    alpha = [0.0] * ctx.b
    for i, d in enumerate(free_idx):
        alpha[d] = max(0.0, float(best_x[i]))
    # squeeze float dust so the reported vector is strictly inside the budgets
    for p, load in _budget_loads(ctx, alpha).items():
        if load > 1.0:
            scale = 1.0 / load
            for d in range(2, ctx.b):
                if alpha[d] > 0 and nu(p, d) > 0:
                    alpha[d] *= scale
    report = feasibility(ctx, alpha)
    assert report.feasible, report.violations
    return AlphaProfile(
        base=ctx.b,
        alpha=report.alpha,
        feasible=True,
        violations=(),
        objective=objective(ctx, report.alpha),
        trace=tuple(best_trace),
    )


def construct_witnesses(
    ctx: BaseContext,
    x: int,
    alpha,
    sample: int,
    seed: int | None = None,
) -> WitnessBatch:
    """Emit `sample` verified members n <= x built as b**s times a digit block.

    s is the largest exponent with b**(s + N) <= x for the block length N
    derived from the profile (N_d = floor(alpha[d] * s)); each emitted block
    is a uniformly random arrangement of the digit multiset, leading zeros
    allowed. Every n is re-verified for membership and the bound before
    return; a failure there means the constraint arithmetic is broken and
    raises rather than returning quietly.
    """
    report = feasibility(ctx, alpha)
    if not report.feasible:
        raise ValueError(f"infeasible alpha: {', '.join(report.violations)}")
    if x < ctx.b:
        raise ValueError(f"x must be at least b = {ctx.b}, got {x}")
    total = math.fsum(report.alpha)
    if total <= 0.0:
        raise ValueError("alpha must have positive total weight")
    if sample < 1:
        raise ValueError("sample must be positive")

    b = ctx.b
    s = int(math.log(x) / ((1.0 + total) * math.log(b)))

    def block_counts(s_val: int) -> list[int]:
        return [int(a * s_val) for a in report.alpha]

    counts = block_counts(s)
    # guard against float fuzz in the floor: shrink s until b**(s+N) <= x
    while s > 0 and b ** (s + sum(counts)) > x:
        s -= 1
        counts = block_counts(s)
    if sum(counts[1:]) == 0:
        raise ValueError(
            "x is too small for this profile: the digit block has no nonzero digit"
        )

    multiset = [d for d, c in enumerate(counts) for _ in range(c)]
    rng = random.Random(DEFAULT_SEED if seed is None else seed)
    scale = b**s
    members = []
    for _ in range(sample):
        rng.shuffle(multiset)
        m = 0
        for d in multiset:
            m = m * b + d
        n = scale * m
        if n > x or not is_member(ctx, n, "nonzero"):
            raise RuntimeError(
                f"constructed witness {n} violates the contract for x={x}; "
                "the constraint arithmetic is inconsistent"
            )
        members.append(n)
    return WitnessBatch(
        base=b,
        x=x,
        s=s,
        tallies=DigitTally(tuple(counts)),
        members=tuple(members),
    )


def multinomial_rate(tally: DigitTally) -> float:
    """log of the number of distinct arrangements of the tallied digit multiset.

    Computed as lgamma(N+1) - sum(lgamma(N_d+1)); divided by a growing block
    scale this converges to the entropy numerator of the objective.
    """
    n = tally.total
    return math.lgamma(n + 1) - math.fsum(math.lgamma(c + 1) for c in tally.counts)
