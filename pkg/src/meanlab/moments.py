"""Weighted distribution of additive functions and its Gaussian comparison.

The weight of n <= x is r(n)/M(x; r).  All sums over [1, x] stream through
fixed-size segments (values are produced by the same residual-factor sieve as
the full tables), so the 10^8-scale distribution pass never materializes an
x-length array.  Per-segment sums use numpy's pairwise accumulation and the
segment totals are combined with math.fsum, which keeps high-order moments
accurate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from math import isqrt
from typing import Optional

import numpy as np

from .errors import PreconditionError
from .funcspec import AddSpec, MultSpec, _values_range
from .primesums import AdditiveStats, PrimeTable, additive_stats, check_condition
from .sieve import build_primes

STREAM_SEGMENT_SIZE = 1 << 22


@dataclass
class DistReport:
    """Empirical weighted distribution against the normal law on a z-grid."""

    x: int
    E: float
    D: float
    mu: float
    theta: float
    z_grid: np.ndarray = field(repr=False)
    F_values: np.ndarray = field(repr=False)
    Phi_values: np.ndarray = field(repr=False)
    sup_distance: float = math.nan


@dataclass
class MomentReport:
    """One weighted central moment against the matching normal moment."""

    m: int
    G_m: float
    nu_m: float
    normalized: float
    budget: float


def phi(z: float) -> float:
    """Standard normal distribution function."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def gaussian_moment(m: int) -> float:
    """m-th moment of the standard normal law: 0 for odd m, (m-1)!! even."""
    if m < 0:
        raise ValueError("gaussian_moment: m must be >= 0")
    if m % 2 == 1:
        return 0.0
    v = 1.0
    for k in range(1, m, 2):
        v *= k
    return v


def _check_weight(r: MultSpec):
    if not r.is_real:
        raise PreconditionError("weighted distribution requires a real weight r")
    if not r.is_nonnegative:
        warnings.warn("weight spec is not flagged non-negative; the weighted "
                      "distribution may not be monotone", stacklevel=3)


def _segments(h: AddSpec, r: MultSpec, x: int, segment_size: int):
    """Yield (h-values, r-values) over consecutive segments of [1, x]."""
    base = build_primes(isqrt(x)).primes
    for lo in range(1, x + 1, segment_size):
        hi = min(lo + segment_size, x + 1)
        hseg = _values_range(h, lo, hi, base, is_mult=False, dtype=np.float64)
        rseg = _values_range(r, lo, hi, base, is_mult=True, dtype=np.float64)
        yield hseg, rseg


def dist_F(z: float, h: AddSpec, r: MultSpec, x: int,
           segment_size: int = STREAM_SEGMENT_SIZE) -> float:
    """F_x(z) = (1/M(x;r)) * sum of r(n) over n <= x with h(n) <= z."""
    _check_weight(r)
    num_parts, den_parts = [], []
    for hseg, rseg in _segments(h, r, x, segment_size):
        num_parts.append(float(np.sum(rseg[hseg <= z])))
        den_parts.append(float(np.sum(rseg)))
    den = math.fsum(den_parts)
    if den == 0.0:
        raise PreconditionError("dist_F: M(x; r) = 0 (degenerate measure)")
    return math.fsum(num_parts) / den


def _warn_hypotheses(h: AddSpec, r: MultSpec, x: int, stats: AdditiveStats,
                     primes: Optional[PrimeTable]):
    """Gaussian-comparison hypotheses: bounded-below weight on the top prime
    range, non-degenerate spread, bounded prime values, small power tail."""
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    lo = math.exp(math.sqrt(math.log(x)))
    ps = primes.upto(x)
    seg = ps[np.searchsorted(ps, lo, side="right"):]
    if len(seg):
        rmin = float(np.min(np.real(np.asarray(r.prime_values(seg)))))
        if rmin < 0.1:
            warnings.warn(f"min r(p) over the top prime range is {rmin:.4g}; "
                          "the Gaussian comparison assumes it is bounded below",
                          stacklevel=3)
    if stats.D < 1.0:
        warnings.warn(f"D(x) = {stats.D:.4g} < 1", stacklevel=3)
    if stats.mu > 1.0:
        warnings.warn(f"mu(x) = {stats.mu:.4g} > 1", stacklevel=3)
    from .primesums import Params
    rep = check_condition("C3_1_iv", Params(), None, r, x, h=h, primes=primes)
    if not rep.holds:
        warnings.warn(f"prime-power tail sum {rep.measured_constant:.4g} is "
                      "large", stacklevel=3)


def ek_report(h: AddSpec, r: MultSpec, x: int,
              z_grid: Optional[np.ndarray] = None, *,
              primes: Optional[PrimeTable] = None,
              segment_size: int = STREAM_SEGMENT_SIZE,
              check: bool = True) -> DistReport:
    """Evaluate F at E + z D over the grid and compare with Phi.

    A single streaming pass bins every n by searchsorted thresholds; the
    distribution values come out of one cumulative sum at the end.
    """
    _check_weight(r)
    if z_grid is None:
        z_grid = np.linspace(-4.0, 4.0, 201)
    z_grid = np.asarray(z_grid, dtype=np.float64)
    stats = additive_stats(x, h, r, primes=primes)
    if check:
        _warn_hypotheses(h, r, x, stats, primes)
    thresholds = stats.E + z_grid * stats.D
    if np.any(np.diff(thresholds) < 0):
        raise PreconditionError("ek_report: z_grid must be non-decreasing")
    counts = np.zeros(len(thresholds) + 1)
    den_parts = []
    for hseg, rseg in _segments(h, r, x, segment_size):
        pos = np.searchsorted(thresholds, hseg, side="left")
        counts += np.bincount(pos, weights=rseg, minlength=len(thresholds) + 1)
        den_parts.append(float(np.sum(rseg)))
    den = math.fsum(den_parts)
    if den == 0.0:
        raise PreconditionError("ek_report: M(x; r) = 0 (degenerate measure)")
    F = np.cumsum(counts[:-1]) / den
    Phi = np.array([phi(z) for z in z_grid])
    sup = float(np.max(np.abs(F - Phi)))
    return DistReport(x=x, E=stats.E, D=stats.D, mu=stats.mu,
                      theta=stats.theta, z_grid=z_grid, F_values=F,
                      Phi_values=Phi, sup_distance=sup)


def moment_G(m: int, h: AddSpec, r: MultSpec, x: int, *,
             primes: Optional[PrimeTable] = None,
             segment_size: int = STREAM_SEGMENT_SIZE,
             allow_non_strongly_additive: bool = False,
             check: bool = True) -> MomentReport:
    """G_m = (1/M(x;r)) sum_{n<=x} r(n) (h(n) - E)^m, reported against the
    normal moment nu_m with budget theta (log 1/theta)^{m/2}.

    h must be strongly additive unless explicitly overridden; the moment
    asymptotics are stated for that class.
    """
    if m < 1:
        raise ValueError("moment_G: m must be >= 1")
    if not h.strongly_additive and not allow_non_strongly_additive:
        raise PreconditionError(
            "moment_G: h is not strongly additive "
            "(pass allow_non_strongly_additive=True to override)")
    _check_weight(r)
    stats = additive_stats(x, h, r, primes=primes)
    if check:
        _warn_hypotheses(h, r, x, stats, primes)
    num_parts, den_parts = [], []
    for hseg, rseg in _segments(h, r, x, segment_size):
        num_parts.append(float(np.sum(rseg * (hseg - stats.E) ** m)))
        den_parts.append(float(np.sum(rseg)))
    den = math.fsum(den_parts)
    if den == 0.0:
        raise PreconditionError("moment_G: M(x; r) = 0 (degenerate measure)")
    g = math.fsum(num_parts) / den
    nu = gaussian_moment(m)
    normalized = abs(g / stats.D**m - nu)
    if stats.theta < 1.0:
        budget = stats.theta * math.log(1.0 / stats.theta) ** (m / 2.0)
    else:
        budget = math.nan
    return MomentReport(m=m, G_m=g, nu_m=nu, normalized=normalized,
                        budget=budget)


def tail_check(t: float, h: AddSpec, r: MultSpec, x: int, *,
               primes: Optional[PrimeTable] = None,
               segment_size: int = STREAM_SEGMENT_SIZE) -> float:
    """sum_{n<=x} r(n) e^{t |h(n)-E|/D} / (e^{t^2} M(x; r)).

    The exponential-moment argument promises this is bounded for
    0 <= t <= 1/mu; the measured value is returned.
    """
    _check_weight(r)
    stats = additive_stats(x, h, r, primes=primes)
    if t < 0 or t > 1.0 / stats.mu:
        raise PreconditionError(
            f"tail_check: t={t} outside [0, 1/mu] = [0, {1.0 / stats.mu:.4g}]")
    num_parts, den_parts = [], []
    for hseg, rseg in _segments(h, r, x, segment_size):
        num_parts.append(float(np.sum(
            rseg * np.exp(t * np.abs(hseg - stats.E) / stats.D))))
        den_parts.append(float(np.sum(rseg)))
    den = math.fsum(den_parts)
    if den == 0.0:
        raise PreconditionError("tail_check: M(x; r) = 0 (degenerate measure)")
    return math.fsum(num_parts) / (math.exp(t * t) * den)
