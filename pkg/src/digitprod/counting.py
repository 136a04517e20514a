"""Exact counting of digit-product-divisible integers.

brute_count scans every n <= x directly (the oracle). hybrid_count gets the
same number by partitioning members over their digit product q, which is
always a product of digits and hence has all prime factors below the base:
small q classes are counted with a most-significant-first digit DP over
(remaining positions, partial-product divisor of q, residue mod q), while
large q classes are counted by scanning the multiples of q and testing the
digit product directly. Both sides are exact integer arithmetic throughout.
"""

from __future__ import annotations

import math
import os
import time
from bisect import bisect_right
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .digits import BaseContext, Variant, _check_variant, context, digits_of

DEFAULT_THRESHOLD = 1024
DEFAULT_ORACLE_CEILING = 10**9
MAX_DIGITS = 18
_CHUNK = 1 << 21
_INT64_MAX = (1 << 63) - 1

Method = Literal["brute", "hybrid", "auto"]
AUTO_BRUTE_LIMIT = 10**6


@dataclass(frozen=True)
class CountQuery:
    """One counting request; threshold None means the module default."""

    base: int
    variant: Variant
    x: int
    method: Method = "auto"
    threshold: int | None = None


@dataclass(frozen=True)
class CountResult:
    query: CountQuery
    count: int
    per_product_breakdown: dict[int, int] | None
    elapsed: float


@dataclass(frozen=True)
class SmoothProduct:
    """An integer all of whose prime factors are below the base."""

    value: int
    exponents: tuple[int, ...]


def _validate_query(query: CountQuery) -> BaseContext:
    ctx = context(query.base)
    _check_variant(query.variant)
    if query.x < 1:
        raise ValueError(f"x must be a positive integer, got {query.x}")
    if query.threshold is not None and query.threshold < 1:
        raise ValueError(f"threshold must be >= 1, got {query.threshold}")
    return ctx


# ---------------------------------------------------------------------------
# smooth product enumeration
# ---------------------------------------------------------------------------

_smooth_cache: dict[int, tuple[int, list[SmoothProduct], list[int]]] = {}


def smooth_products(ctx: BaseContext, limit: int) -> list[SmoothProduct]:
    """All integers <= limit whose prime factors are below b, ascending.

    Enumerated over exponent vectors of the primes below b, never by trial
    division over the whole range.
    """
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    cached = _smooth_cache.get(ctx.b)
    if cached is None or cached[0] < limit:
        items: list[tuple[int, tuple[int, ...]]] = []
        primes = ctx.base_primes

        def extend(i: int, value: int, expo: list[int]) -> None:
            if i == len(primes):
                items.append((value, tuple(expo)))
                return
            p = primes[i]
            e = 0
            v = value
            while v <= limit:
                expo.append(e)
                extend(i + 1, v, expo)
                expo.pop()
                v *= p
                e += 1

        extend(0, 1, [])
        items.sort()
        products = [SmoothProduct(v, e) for v, e in items]
        _smooth_cache[ctx.b] = (limit, products, [sp.value for sp in products])
        return list(products)
    _, products, values = cached
    hi = bisect_right(values, limit)
    return products[:hi]


# ---------------------------------------------------------------------------
# vectorized digit products (brute scan and multiple scan share this)
# ---------------------------------------------------------------------------


def _member_mask(ns: np.ndarray, b: int, variant: Variant) -> np.ndarray:
    """Boolean mask over ns of membership: digit product nonzero and divides n."""
    prod, zero_seen = _digit_products(ns, b)
    if variant == "all":
        return (~zero_seen) & (ns % prod == 0)
    return ns % prod == 0


def _digit_products(ns: np.ndarray, b: int) -> tuple[np.ndarray, np.ndarray]:
    """(product of nonzero digits, any-zero-digit flag) for each n in ns."""
    t = ns.copy()
    prod = np.ones_like(ns)
    zero_seen = np.zeros(ns.shape, dtype=bool)
    while True:
        alive = t > 0
        if not alive.any():
            break
        d = t % b
        t //= b
        zero_seen |= alive & (d == 0)
        np.multiply(prod, d, where=alive & (d > 1), out=prod)
    return prod, zero_seen


def brute_count(
    query: CountQuery, *, ceiling: int | None = None, keep_breakdown: bool = False
) -> CountResult:
    """Count members by direct scan of 1..x. Refuses above the oracle ceiling."""
    t0 = time.perf_counter()
    ctx = _validate_query(query)
    if ceiling is None:
        ceiling = DEFAULT_ORACLE_CEILING
    if query.x > ceiling:
        raise ValueError(
            f"x={query.x} exceeds the brute-force ceiling {ceiling}; "
            "use the hybrid method for bounds this large"
        )
    b = ctx.b
    # digit products stay below b*x, so this keeps the scan inside int64
    if query.x > _INT64_MAX // b:
        raise ValueError(f"x={query.x} is too large for exact 64-bit scan arithmetic")
    total = 0
    breakdown: dict[int, int] | None = {} if keep_breakdown else None
    lo = 1
    while lo <= query.x:
        hi = min(query.x, lo + _CHUNK - 1)
        ns = np.arange(lo, hi + 1, dtype=np.int64)
        prod, zero_seen = _digit_products(ns, b)
        mask = ns % prod == 0
        if query.variant == "all":
            mask &= ~zero_seen
        total += int(mask.sum())
        if breakdown is not None and mask.any():
            values, counts = np.unique(prod[mask], return_counts=True)
            for v, c in zip(values.tolist(), counts.tolist()):
                breakdown[v] = breakdown.get(v, 0) + c
        lo = hi + 1
    return CountResult(query, total, breakdown, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# hybrid counter: digit DP per small product class
# ---------------------------------------------------------------------------


def _divisors_from_exponents(primes, exponents) -> list[int]:
    divs = [1]
    for p, e in zip(primes, exponents):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


class _ProductCounter:
    """Counts n <= x with digit product exactly q and q | n, for one (b, variant, q).

    Tables tab[j][g, r] hold the number of ways to append j more digits from
    state (partial product g, value-so-far r mod q) and finish with product
    exactly q and residue 0. They do not depend on the bound, so they are
    grown once per needed length and reused; a query then walks the digits of
    x most-significant-first, adding table entries for every digit choice
    strictly below the bound digit, plus the shorter-length block and the
    exact bound itself.
    """

    __slots__ = (
        "b",
        "q",
        "variant",
        "divs",
        "n_div",
        "dead",
        "one_idx",
        "q_idx",
        "dtrans",
        "base_shift",
        "tabs",
        "short_cum",
    )

    def __init__(self, ctx: BaseContext, variant: Variant, sp: SmoothProduct):
        b = ctx.b
        q = sp.value
        self.b = b
        self.q = q
        self.variant = variant
        divs = _divisors_from_exponents(ctx.base_primes, sp.exponents)
        self.divs = divs
        self.n_div = len(divs)
        self.dead = self.n_div
        index = {v: i for i, v in enumerate(divs)}
        self.one_idx = index[1]
        self.q_idx = index[q]
        dtrans = np.full((self.n_div + 1, b), self.dead, dtype=np.int64)
        for gi, g in enumerate(divs):
            for d in range(b):
                if d == 0:
                    if variant == "nonzero":
                        dtrans[gi, 0] = gi
                    continue
                v = g * d
                if q % v == 0:
                    dtrans[gi, d] = index[v]
        self.dtrans = dtrans
        self.base_shift = (np.arange(q, dtype=np.int64) * b) % q
        tab0 = np.zeros((self.n_div + 1, q), dtype=np.int64)
        tab0[self.q_idx, 0] = 1
        self.tabs = [tab0]
        self.short_cum = [0, 0]  # short_cum[k] = members with fewer than k digits

    def _grow(self, length: int) -> None:
        """Ensure tables for up to `length - 1` free positions exist."""
        b, q = self.b, self.q
        digits = range(0 if self.variant == "nonzero" else 1, b)
        while len(self.tabs) < length:
            prev = self.tabs[-1]
            nxt = np.zeros_like(prev)
            body = nxt[: self.n_div]
            for d in digits:
                rt = (self.base_shift + d) % q
                body += prev[self.dtrans[: self.n_div, d]][:, rt]
            self.tabs.append(nxt)
        while len(self.short_cum) <= length:
            # numbers with exactly ell digits, ell = len(short_cum) - 1
            ell = len(self.short_cum) - 1
            tab = self.tabs[ell - 1]
            s = 0
            for d in range(1, b):
                gi = self.dtrans[self.one_idx, d]
                if gi != self.dead:
                    s += int(tab.item(gi * q + d % q))
            self.short_cum.append(self.short_cum[-1] + s)

    def count_upto(self, xd: list[int]) -> int:
        """Members <= x, where xd holds the digits of x most-significant-first."""
        length = len(xd)
        self._grow(length)
        b, q = self.b, self.q
        dead = self.dead
        dtrans = self.dtrans
        total = self.short_cum[length]
        gi = self.one_idx
        r = 0
        for i, bound_digit in enumerate(xd):
            tab = self.tabs[length - 1 - i]
            lo = 1 if i == 0 else 0
            for d in range(lo, bound_digit):
                gi2 = int(dtrans[gi, d])
                if gi2 == dead:
                    continue
                total += int(tab.item(gi2 * q + (r * b + d) % q))
            gi = int(dtrans[gi, bound_digit])
            if gi == dead:
                return total
            r = (r * b + bound_digit) % q
        if gi == self.q_idx and r == 0:
            total += 1
        return total


_counter_cache: dict[tuple[int, Variant, int], _ProductCounter] = {}


def _product_counter(ctx: BaseContext, variant: Variant, sp: SmoothProduct) -> _ProductCounter:
    key = (ctx.b, variant, sp.value)
    counter = _counter_cache.get(key)
    if counter is None:
        counter = _ProductCounter(ctx, variant, sp)
        _counter_cache[key] = counter
    return counter


# ---------------------------------------------------------------------------
# hybrid counter: multiple scan per large product class
# ---------------------------------------------------------------------------


class _ScanPool:
    """Sorted members of all product classes q in (threshold, watermark]."""

    __slots__ = ("watermark", "members_by_q", "pooled")

    def __init__(self, watermark: int, members_by_q: dict[int, np.ndarray]):
        self.watermark = watermark
        self.members_by_q = members_by_q
        if members_by_q:
            self.pooled = np.sort(np.concatenate(list(members_by_q.values())))
        else:
            self.pooled = np.empty(0, dtype=np.int64)

    def count_upto(self, x: int) -> int:
        return int(np.searchsorted(self.pooled, x, side="right"))


_scan_cache: dict[tuple[int, Variant, int], _ScanPool] = {}


def _class_members(ctx: BaseContext, variant: Variant, q: int, x: int) -> np.ndarray:
    """Multiples of q up to x whose digit product is exactly q."""
    found = []
    step = max(1, _CHUNK // 4)
    m_lo = 1
    m_max = x // q
    while m_lo <= m_max:
        m_hi = min(m_max, m_lo + step - 1)
        ns = np.arange(m_lo, m_hi + 1, dtype=np.int64) * q
        prod, zero_seen = _digit_products(ns, ctx.b)
        mask = prod == q
        if variant == "all":
            mask &= ~zero_seen
        if mask.any():
            found.append(ns[mask])
        m_lo = m_hi + 1
    if not found:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(found)


def _scan_pool(ctx: BaseContext, variant: Variant, threshold: int, x: int) -> _ScanPool:
    key = (ctx.b, variant, threshold)
    pool = _scan_cache.get(key)
    if pool is None or pool.watermark < x:
        watermark = x if pool is None else max(x, 2 * pool.watermark)
        members = {
            sp.value: _class_members(ctx, variant, sp.value, watermark)
            for sp in smooth_products(ctx, watermark)
            if sp.value > threshold
        }
        pool = _ScanPool(watermark, members)
        _scan_cache[key] = pool
    return pool


def clear_caches() -> None:
    """Drop the memoized smooth lists, DP counters, and scan pools."""
    _smooth_cache.clear()
    _counter_cache.clear()
    _scan_cache.clear()


def hybrid_count(query: CountQuery, *, keep_breakdown: bool = False) -> CountResult:
    """Count members by partitioning over the digit product; equals brute_count.

    Classes with product q <= threshold go through the digit DP; larger
    classes are counted by scanning multiples of q. The partition is exact:
    every member belongs to exactly one class.
    """
    t0 = time.perf_counter()
    ctx = _validate_query(query)
    x = query.x
    b = ctx.b
    xd = digits_of(ctx, x)[::-1]
    if len(xd) > MAX_DIGITS:
        raise ValueError(
            f"x={x} has {len(xd)} base-{b} digits, above the budget of {MAX_DIGITS}"
        )
    if x > _INT64_MAX // b:
        raise ValueError(f"x={x} is too large for exact 64-bit position arithmetic")
    threshold = DEFAULT_THRESHOLD if query.threshold is None else query.threshold

    total = 0
    breakdown: dict[int, int] | None = {} if keep_breakdown else None
    for sp in smooth_products(ctx, min(threshold, x)):
        c = _product_counter(ctx, query.variant, sp).count_upto(xd)
        total += c
        if breakdown is not None and c:
            breakdown[sp.value] = c

    if x > threshold:
        pool = _scan_pool(ctx, query.variant, threshold, x)
        total += pool.count_upto(x)
        if breakdown is not None:
            for q, members in sorted(pool.members_by_q.items()):
                c = int(np.searchsorted(members, x, side="right"))
                if c:
                    breakdown[q] = c

    return CountResult(query, total, breakdown, time.perf_counter() - t0)


def execute(query: CountQuery, *, ceiling: int | None = None, keep_breakdown: bool = False) -> CountResult:
    """Dispatch a query by method; auto uses brute up to 1e6 and hybrid beyond."""
    method = query.method
    if method == "auto":
        method = "brute" if query.x <= AUTO_BRUTE_LIMIT else "hybrid"
    if method == "brute":
        result = brute_count(replace(query, method="brute"), ceiling=ceiling, keep_breakdown=keep_breakdown)
    elif method == "hybrid":
        result = hybrid_count(replace(query, method="hybrid"), keep_breakdown=keep_breakdown)
    else:
        raise ValueError(f"unknown method {query.method!r}")
    return result


def slope_estimate(
    ctx: BaseContext, variant: Variant, k_min: int, k_max: int
) -> list[tuple[int, int, float | None]]:
    """Counts at x = b**k for k in [k_min, k_max] with successive log-slopes.

    slope_k = (log count(b**(k+1)) - log count(b**k)) / log b; the last row
    has no successor and carries None. Purely descriptive output.
    """
    _check_variant(variant)
    if k_min < 1 or k_max < k_min:
        raise ValueError(f"need 1 <= k_min <= k_max, got {k_min}..{k_max}")
    counts = []
    for k in range(k_min, k_max + 1):
        res = execute(CountQuery(ctx.b, variant, ctx.b**k, method="auto"))
        counts.append(res.count)
    rows: list[tuple[int, int, float | None]] = []
    for i, k in enumerate(range(k_min, k_max + 1)):
        if i + 1 < len(counts) and counts[i] > 0:
            slope = (math.log(counts[i + 1]) - math.log(counts[i])) / math.log(ctx.b)
        else:
            slope = None
        rows.append((k, counts[i], slope))
    return rows


# ---------------------------------------------------------------------------
# persistent count cache ("b,variant,x,count" lines)
# ---------------------------------------------------------------------------


def load_count_cache(path: str) -> dict[tuple[int, str, int], int]:
    """Read cached counts; missing file means an empty cache."""
    cache: dict[tuple[int, str, int], int] = {}
    if not os.path.exists(path):
        return cache
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            b, variant, x, count = line.split(",")
            cache[(int(b), variant, int(x))] = int(count)
    return cache


def save_count_cache(path: str, cache: dict[tuple[int, str, int], int]) -> None:
    """Write the cache as sorted "b,variant,x,count" lines."""
    with open(path, "w", encoding="ascii") as fh:
        for (b, variant, x), count in sorted(cache.items()):
            fh.write(f"{b},{variant},{x},{count}\n")
