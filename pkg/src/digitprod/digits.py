"""Base-b digit arithmetic: expansions, digit products, membership, valuations."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

Variant = Literal["all", "nonzero"]
VARIANTS: tuple[Variant, Variant] = ("all", "nonzero")


def _sieve_below(n: int) -> list[int]:
    """All primes strictly less than n, ascending."""
    if n <= 2:
        return []
    flags = bytearray([1]) * n
    flags[0] = flags[1] = 0
    p = 2
    while p * p < n:
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, n, p)))
        p += 1
    return [i for i in range(n) if flags[i]]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def nu(p: int, m: int) -> int:
    """p-adic valuation of m: the largest e with p**e dividing m."""
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    e = 0
    while m % p == 0:
        m //= p
        e += 1
    return e


@dataclass(frozen=True)
class BaseContext:
    """A validated digit base together with its derived prime data.

    Attributes:
        b: the base, at least 3.
        P_b: greatest prime strictly below b.
        base_primes: all primes below b, ascending.
        b_prime_divisors: primes dividing b, ascending.
        digit_exponents: for each digit d, the exponent vector of d over
            base_primes (None for d = 0, all zeros for d = 1).
    """

    b: int
    P_b: int = field(init=False)
    base_primes: tuple[int, ...] = field(init=False)
    b_prime_divisors: tuple[int, ...] = field(init=False)
    digit_exponents: tuple[tuple[int, ...] | None, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.b, int) or self.b < 3:
            raise ValueError(f"base must be an integer >= 3, got {self.b!r}")
        primes = tuple(_sieve_below(self.b))
        object.__setattr__(self, "base_primes", primes)
        object.__setattr__(self, "P_b", primes[-1])
        divisors = tuple(p for p in primes if self.b % p == 0)
        if not divisors:  # b itself is prime
            divisors = (self.b,)
        object.__setattr__(self, "b_prime_divisors", divisors)
        expo: list[tuple[int, ...] | None] = [None]
        for d in range(1, self.b):
            vec = []
            m = d
            for p in primes:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                vec.append(e)
            expo.append(tuple(vec))
        object.__setattr__(self, "digit_exponents", tuple(expo))


@lru_cache(maxsize=None)
def context(b: int) -> BaseContext:
    """Cached BaseContext factory."""
    return BaseContext(b)


@dataclass(frozen=True)
class DigitTally:
    """Multiplicity of each digit value in an expansion: counts[d] digits equal d."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.counts):
            raise ValueError("digit counts must be nonnegative")
        if sum(self.counts) < 1:
            raise ValueError("a tally must cover at least one digit")

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class DigitProduct:
    """A digit product value with, when nonzero, its factorization over base_primes."""

    value: int
    exponents: tuple[int, ...] | None


def digits_of(ctx: BaseContext, n: int) -> list[int]:
    """Digits of n in base ctx.b, least significant first.

    The leading (last) digit is nonzero and sum(d * b**j) reconstructs n.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    b = ctx.b
    out = []
    while n:
        n, r = divmod(n, b)
        out.append(r)
    return out


def digit_product(ctx: BaseContext, n: int, variant: Variant) -> DigitProduct:
    """Product of the digits of n.

    variant="all" multiplies every digit (zero if any digit is 0);
    variant="nonzero" multiplies only nonzero digits (empty product is 1).
    """
    _check_variant(variant)
    value = 1
    for d in digits_of(ctx, n):
        if d == 0:
            if variant == "all":
                return DigitProduct(0, None)
        else:
            value *= d
    vec = [0] * len(ctx.base_primes)
    m = value
    for i, p in enumerate(ctx.base_primes):
        while m % p == 0:
            m //= p
            vec[i] += 1
    return DigitProduct(value, tuple(vec))


def is_member(ctx: BaseContext, n: int, variant: Variant) -> bool:
    """Whether the digit product of n (per variant) is nonzero and divides n."""
    _check_variant(variant)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    b = ctx.b
    m = n
    prod = 1
    while m:
        m, d = divmod(m, b)
        if d == 0:
            if variant == "all":
                return False
        else:
            prod *= d
    return n % prod == 0


def tally(ctx: BaseContext, n: int) -> DigitTally:
    """Count how many digits of n equal each value 0..b-1."""
    counts = [0] * ctx.b
    for d in digits_of(ctx, n):
        counts[d] += 1
    return DigitTally(tuple(counts))


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
