"""Truncated Euler products and main-term predictors with error budgets.

The observed side of every comparison comes from exact sieved tables; the
predicted side is built here from truncated Euler products, so the two
pipelines share no code.  Products accumulate log-magnitude and phase to
survive hundreds of thousands of factors without overflow.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from math import isqrt
from typing import Optional

import numpy as np

from .errors import EvaluationError, PreconditionError
from .funcspec import MultSpec, ValueTable, eval_mult, summatory, twist
from .primesums import (Params, PrimeTable, build_primes, check_condition,
                        constants, default_params, prime_sum_Z)

EULER_GAMMA = 0.5772156649015329

_FORMULA_IDS = ("T1_6", "T1_10", "T1_13", "T2_3", "T4_5", "L2_4")


@dataclass
class Prediction:
    """A predicted main term plus the computable part of its error budget."""

    formula_id: str
    main_term: complex
    error_budget: float
    x: int
    params: Optional[Params] = None
    extras: dict = field(default_factory=dict)


@dataclass
class Comparison:
    """Observed vs predicted mean value."""

    observed: complex
    predicted: complex
    abs_err: float
    rel_err: float
    budget_ratio: float


def compare(observed, prediction: Prediction) -> Comparison:
    obs = complex(observed)
    pred = complex(prediction.main_term)
    abs_err = abs(obs - pred)
    rel_err = abs_err / abs(obs) if obs != 0 else math.inf
    budget = prediction.error_budget
    if budget > 0:
        ratio = abs_err / budget
    else:
        ratio = 0.0 if abs_err == 0 else math.inf
    return Comparison(obs, pred, abs_err, rel_err, ratio)


# ---------------------------------------------------------------------------
# local factors and Euler products
# ---------------------------------------------------------------------------

def local_factor(spec: MultSpec, p: int, x: int) -> complex:
    """sum_{p^nu <= x} f(p^nu) / p^nu (the nu = 0 term is 1)."""
    if p > x:
        raise PreconditionError(f"local_factor: p={p} exceeds x={x}")
    total = 1.0 + 0.0j
    q = p
    nu = 1
    while q <= x:
        total += complex(spec.value(p, nu)) / q
        q *= p
        nu += 1
    return total


def _log_local_product(spec: MultSpec, x: int, primes: Optional[PrimeTable],
                       tau: float = 0.0):
    """Sum of principal-branch logs of all local factors over p <= x.

    With tau != 0 the local factor is evaluated for the twisted spec.  Large
    primes (p > sqrt(x)) have two-term factors and are handled vectorized.
    """
    if x < 2:
        return 0.0 + 0.0j
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    work = twist(spec, tau) if tau != 0.0 else spec
    root = isqrt(x)
    ps = primes.upto(x)
    split = np.searchsorted(ps, root, side="right")
    total = 0.0 + 0.0j
    for p in ps[:split]:
        lf = local_factor(work, int(p), x)
        if abs(lf) < 1e-14:
            raise EvaluationError(f"near-vanishing local factor at p={int(p)}")
        total += cmath.log(lf)
    big = ps[split:]
    if len(big):
        fv = np.asarray(work.prime_values(big), dtype=np.complex128)
        lf = 1.0 + fv / big
        small = np.abs(lf) < 1e-14
        if small.any():
            raise EvaluationError(
                f"near-vanishing local factor at p={int(big[np.argmax(small)])}"
            )
        total += np.sum(np.log(lf)).item()
    return total


def euler_product(spec: MultSpec, x: int,
                  primes: Optional[PrimeTable] = None) -> complex:
    """prod_{p<=x} sum_{p^nu<=x} f(p^nu)/p^nu, accumulated in log space."""
    return cmath.exp(_log_local_product(spec, x, primes))


def min_local_factor(spec: MultSpec, x: int,
                     primes: Optional[PrimeTable] = None) -> float:
    """min over p <= x of |local factor|: surrogate for same-order-of-magnitude
    behaviour of the product against e^{Z}."""
    if x < 2:
        return math.inf
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    root = isqrt(x)
    ps = primes.upto(x)
    split = np.searchsorted(ps, root, side="right")
    best = math.inf
    for p in ps[:split]:
        best = min(best, abs(local_factor(spec, int(p), x)))
    big = ps[split:]
    if len(big):
        fv = np.asarray(spec.prime_values(big), dtype=np.complex128)
        best = min(best, float(np.min(np.abs(1.0 + fv / big))))
    return best


# ---------------------------------------------------------------------------
# predictors
# ---------------------------------------------------------------------------

def _warn_failed(condition_id, params, f, r, x, primes, **kwargs):
    """Run a hypothesis check and warn on failure.  Checks advise, they never
    abort a predictor: an uncomputable check (empty grid at tiny x) warns too."""
    try:
        report = check_condition(condition_id, params, f, r, x, primes=primes,
                                 **kwargs)
    except PreconditionError as exc:
        warnings.warn(f"hypothesis {condition_id} not computable: {exc}",
                      stacklevel=3)
        return
    if not report.holds:
        warnings.warn(
            f"hypothesis {report.condition_id} not satisfied "
            f"(measured {report.measured_constant:.4g} at y={report.worst_y})",
            stacklevel=3,
        )


def predict_1_6(f: MultSpec, params: Params, x: int, *,
                r: Optional[MultSpec] = None,
                primes: Optional[PrimeTable] = None,
                check: bool = True) -> Prediction:
    """Main term e^{-gamma*rho} * x / (Gamma(rho) log x) * (Euler product),
    with budget eps^delta * e^{Re Z(x;f)} times the same prefactor.

    The prefactor reads the x linearly (outside the exponential): the
    rho = 1, f = 1 case must reduce to the classical harmonic-product
    asymptotic, which forces that reading.
    """
    if x < 3:
        raise PreconditionError("predict_1_6: x must be >= 3")
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    if check:
        r_chk = r if r is not None else (f if f.is_nonnegative else None)
        if r_chk is not None:
            for cid in ("C1_3", "C1_4", "C1_5"):
                _warn_failed(cid, params, f, r_chk, x, primes)
        else:
            warnings.warn("predict_1_6: no majorant available; hypothesis "
                          "checks skipped", stacklevel=2)
    rho = params.rho
    pref = math.exp(-EULER_GAMMA * rho) * x / (math.gamma(rho) * math.log(x))
    main = pref * euler_product(f, x, primes)
    cset = constants(params, is_real=f.is_real)
    z = prime_sum_Z(x, f, primes)
    budget = params.eps**cset.delta_thm * math.exp(complex(z).real) * pref
    return Prediction("T1_6", main, budget, x, params,
                      {"delta": cset.delta_thm, "Z": complex(z)})


def _ratio_product(f: MultSpec, r: MultSpec, x: int,
                   primes: Optional[PrimeTable], tau: float = 0.0) -> complex:
    """prod_p [local factor of f twisted by tau] / [local factor of r]."""
    log_num = _log_local_product(f, x, primes, tau=tau)
    log_den = _log_local_product(r, x, primes)
    return cmath.exp(log_num - log_den)


def predict_1_13(f: MultSpec, r: MultSpec, x: int,
                 params: Optional[Params] = None, *,
                 r_table: Optional[ValueTable] = None,
                 primes: Optional[PrimeTable] = None,
                 check: bool = True) -> Prediction:
    """Main term M(x; r) * prod_p (local factor ratio), budget
    eps^delta * x * e^{Re Z(x;r)} / log x.

    The optional sharpening of the budget through Z(x; |f|-f) is omitted, as
    in the tau-extension it feeds.
    """
    if params is None:
        params = default_params(x)
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    if r_table is None or r_table.bound < x:
        r_table = eval_mult(r, x)
    m_r = summatory(r_table, x)
    if m_r == 0:
        raise PreconditionError("predict_1_13: M(x; r) = 0")
    if check:
        _warn_failed("C1_3", params, f, r, x, primes)
        _warn_failed("C1_4", params, f, r, x, primes,
                     exponent=params.h_exponent(comparison=True))
        _warn_failed("C1_7", params, f, r, x, primes, exponent=1.0)
        _warn_failed("C1_12", params, f, r, x, primes)
    ratio = _ratio_product(f, r, x, primes)
    main = m_r * ratio
    cset = constants(params, is_real=f.is_real)
    z_r = complex(prime_sum_Z(x, r, primes)).real
    budget = params.eps**cset.delta_thm * x * math.exp(z_r) / math.log(x)
    return Prediction("T1_13", main, budget, x, params,
                      {"delta": cset.delta_thm, "M_r": m_r, "ratio": ratio})


def predict_2_3(f: MultSpec, r: MultSpec, tau: float, x: int,
                params: Optional[Params] = None, *,
                r_table: Optional[ValueTable] = None,
                primes: Optional[PrimeTable] = None,
                check: bool = True) -> Prediction:
    """Main term x^{i tau} M(x; r) / (1 + i tau) * prod_p
    [sum f(p^nu)/p^{nu(1+i tau)}] / [sum r(p^nu)/p^nu], budget
    eps^delta * M(x; r).

    At tau = 0 this reduces bit-for-bit to the untwisted comparison.
    Hypotheses are checked against the twisted spec.
    """
    if params is None:
        params = default_params(x)
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    if r_table is None or r_table.bound < x:
        r_table = eval_mult(r, x)
    m_r = summatory(r_table, x)
    if m_r == 0:
        raise PreconditionError("predict_2_3: M(x; r) = 0")
    if check:
        ft = twist(f, tau)
        _warn_failed("C1_3", params, ft, r, x, primes)
        _warn_failed("C1_4", params, ft, r, x, primes,
                     exponent=params.h_exponent(comparison=True))
        _warn_failed("C1_7", params, ft, r, x, primes, exponent=1.0)
        _warn_failed("C1_12", params, ft, r, x, primes)
    ratio = _ratio_product(f, r, x, primes, tau=tau)
    xitau = cmath.exp(1j * tau * math.log(x))
    main = ((xitau * m_r) / (1.0 + 1j * tau)) * ratio
    cset = constants(params, is_real=f.is_real)
    budget = params.eps**cset.delta_thm * abs(complex(m_r))
    return Prediction("T2_3", main, budget, x, params,
                      {"delta": cset.delta_thm, "M_r": m_r, "ratio": ratio,
                       "tau": tau})


def _largest_prime_factor(n: int) -> int:
    if n <= 1:
        return 1
    best = 1
    d = 2
    while d * d <= n:
        while n % d == 0:
            best = d
            n //= d
        d += 1 if d == 2 else 2
    return max(best, n) if n > 1 else best


def local_sum_W(spec: MultSpec, D: int) -> complex:
    """W_f(D) = prod_{p|D} sum_{nu>=0} f(p^nu)/p^nu, tails cut at relative
    1e-16."""
    total = 1.0 + 0.0j
    n = int(D)
    d = 2
    divisors = []
    while d * d <= n:
        if n % d == 0:
            divisors.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        divisors.append(n)
    for p in divisors:
        partial = 1.0 + 0.0j
        q = p
        nu = 1
        prev = math.inf
        while True:
            term = complex(spec.value(p, nu)) / q
            partial += term
            size = abs(term)
            if size < 1e-16 * max(abs(partial), 1e-300):
                break
            if nu > 64 and size >= prev:
                raise EvaluationError(
                    f"local sum for W at p={p} is not converging")
            prev = size
            q *= p
            nu += 1
            if nu > 4096:
                raise EvaluationError(
                    f"local sum for W at p={p} did not converge in 4096 terms")
        total *= partial
    return total


def predict_4_5(r: MultSpec, D: int, params: Params, x: int, *,
                r_table: Optional[ValueTable] = None,
                primes: Optional[PrimeTable] = None,
                check: bool = True) -> Prediction:
    """Sifted mean value: main term M(x; r) / W_r(D) with budget
    M(x; r) / (log x)^{delta/2}.

    extras carries the side-by-side error data: the indicator chi of a huge
    modulus, this budget's exponent delta/2, and the competing bound
    M(x;r) (loglog 2D)^{1+A} / (log x)^c with c = b^3/(b^2+3456A^2).
    Requires every prime factor of D to be <= x.
    """
    D = int(D)
    if D < 1:
        raise PreconditionError("predict_4_5: D must be >= 1")
    pplus = _largest_prime_factor(D)
    if pplus > x:
        raise PreconditionError(
            f"predict_4_5: largest prime factor of D ({pplus}) exceeds x={x}")
    if r_table is None or r_table.bound < x:
        r_table = eval_mult(r, x)
    m_r = summatory(r_table, x)
    if check:
        _warn_failed("C4_4", params, None, r, x, primes)
    w = local_sum_W(r, D)
    if abs(w) < 1e-14:
        raise EvaluationError("predict_4_5: W_r(D) vanishes")
    main = complex(m_r) / w
    cset = constants(params, is_real=True)
    logx = math.log(x)
    budget = abs(complex(m_r)) * logx ** (-cset.delta_4_3 / 2.0)
    chi_threshold = logx ** (params.b**3 / (17.0 * params.A**3))
    chi = 1 if math.log(math.log(3.0 * D)) > chi_threshold else 0
    # iterated log floored at 1: keeps the competing bound meaningful for
    # small moduli
    ll = max(math.log(math.log(max(2.0 * D, 3.0))), 1.0)
    elliott_budget = abs(complex(m_r)) * ll ** (1.0 + params.A) \
        * logx ** (-cset.c_4_2)
    return Prediction("T4_5", main, budget, x, params,
                      {"chi": chi, "W": w, "delta": cset.delta_4_3,
                       "exponent_4_5": cset.delta_4_3 / 2.0,
                       "exponent_elliott": cset.c_4_2,
                       "elliott_budget": elliott_budget, "M_r": m_r})


def lemma_2_2_ratio(r: MultSpec, params: Params, x: int, grid_size: int = 64, *,
                    r_table: Optional[ValueTable] = None,
                    primes: Optional[PrimeTable] = None,
                    check: bool = True) -> list:
    """ratio(z) = M(z; r) log z / (z e^{Re Z(z; r)}) over a geometric z-grid
    in (x^{2 eps1}, x]; the two-sided comparability claim says this stays in
    a bounded band."""
    lo = x ** (2.0 * params.eps1)
    if lo >= x:
        raise PreconditionError(
            f"lemma_2_2_ratio: empty z-range (x^(2 eps1) = {lo:.4g} >= x); "
            "pick a smaller eps")
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    if r_table is None or r_table.bound < x:
        r_table = eval_mult(r, x)
    if check:
        _warn_failed("C1_12", params, None, r, x, primes)
    ps = primes.upto(x)
    rp = np.real(np.asarray(r.prime_values(ps)))
    zcum = np.concatenate(([0.0], np.cumsum(rp / ps)))
    out = []
    for z in np.geomspace(lo, float(x), grid_size + 1)[1:]:
        zi = int(z)
        m = summatory(r_table, zi)
        zval = zcum[np.searchsorted(ps, zi, side="right")]
        out.append((float(zi), complex(m).real * math.log(zi)
                    / (zi * math.exp(zval))))
    return out
