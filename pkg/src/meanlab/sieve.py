"""Prime generation and factorization tables.

Everything here is exact integer infrastructure: a plain Eratosthenes prime
table, a smallest-prime-factor (spf) table built segment by segment, and a
factorization walk over the spf table.  Tables are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from .errors import PreconditionError, ResourceError

# Segments of 2^22 entries stay cache-resident and dominate sieve throughput.
DEFAULT_SEGMENT_SIZE = 1 << 22

# spf entries are 32-bit: halves memory versus 64-bit at target scales.
_SPF_DTYPE = np.uint32
_MAX_SPF_BOUND = (1 << 32) - 1

# Default memory budget for spf tables (bytes).
DEFAULT_MEMORY_BUDGET = 2 << 30


@dataclass(frozen=True)
class PrimeTable:
    """Ascending array of exactly the primes <= bound."""

    bound: int
    primes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)

    def upto(self, y) -> np.ndarray:
        """View of the primes <= y (y may exceed bound only if harmless)."""
        if y >= self.bound:
            return self.primes
        return self.primes[: np.searchsorted(self.primes, y, side="right")]


@dataclass(frozen=True)
class SpfTable:
    """spf[n] = smallest prime factor of n, for 2 <= n <= bound."""

    bound: int
    spf: np.ndarray = field(repr=False)
    segment_size: int = DEFAULT_SEGMENT_SIZE


@dataclass(frozen=True)
class Factorization:
    """Canonical factorization: (prime, exponent) pairs, primes ascending.

    n = 1 is the empty product.  The largest prime factor of 1 is 1 by
    convention.
    """

    pairs: tuple

    @property
    def largest_prime_factor(self) -> int:
        return self.pairs[-1][0] if self.pairs else 1

    @property
    def value(self) -> int:
        n = 1
        for p, e in self.pairs:
            n *= p**e
        return n


def build_primes(bound: int) -> PrimeTable:
    """All primes <= bound, ascending.  bound < 2 yields an empty table."""
    if bound < 0:
        raise PreconditionError("build_primes: bound must be >= 0")
    if bound < 2:
        return PrimeTable(bound, np.empty(0, dtype=np.int64))
    mask = np.ones(bound + 1, dtype=bool)
    mask[:2] = False
    for i in range(2, isqrt(bound) + 1):
        if mask[i]:
            mask[i * i :: i] = False
    return PrimeTable(bound, np.nonzero(mask)[0].astype(np.int64))


def build_spf(
    bound: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> SpfTable:
    """Smallest-prime-factor table for 2 <= n <= bound.

    Built segment by segment; the output is identical to a monolithic build
    for any segment size.
    """
    if bound < 2:
        raise PreconditionError("build_spf: bound must be >= 2")
    if bound > _MAX_SPF_BOUND:
        raise ResourceError(f"build_spf: bound {bound} exceeds 32-bit entry range")
    needed = (bound + 1) * np.dtype(_SPF_DTYPE).itemsize
    if needed > memory_budget:
        raise ResourceError(
            f"build_spf: table would need {needed} bytes, budget is {memory_budget}"
        )
    if segment_size < 2:
        raise PreconditionError("build_spf: segment_size must be >= 2")

    spf = np.zeros(bound + 1, dtype=_SPF_DTYPE)
    base = build_primes(isqrt(bound)).primes
    for lo in range(2, bound + 1, segment_size):
        hi = min(lo + segment_size, bound + 1)
        view = spf[lo:hi]
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start >= hi:
                continue
            sl = view[start - lo :: p]
            sl[sl == 0] = p
        # survivors in this segment are primes
        z = np.nonzero(view == 0)[0]
        view[z] = (z + lo).astype(_SPF_DTYPE)
    return SpfTable(bound, spf, segment_size)


def factorize(n: int, table: SpfTable) -> Factorization:
    """Canonical factorization of n via the spf table (1 <= n <= bound)."""
    if n < 1 or n > table.bound:
        raise PreconditionError(f"factorize: n={n} outside [1, {table.bound}]")
    pairs = []
    spf = table.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        pairs.append((p, e))
    return Factorization(tuple(pairs))
