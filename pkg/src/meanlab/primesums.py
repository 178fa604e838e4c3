"""Prime sums, the parameter bundle, derived constants, and hypothesis checkers.

Upper-bound hypotheses that carry an unspecified implicit constant are
measured: the checker reports the supremum of LHS/RHS over a geometric grid
and compares it against a configurable threshold (default 10) instead of
hard-failing.  Hypotheses with an explicit constant (the log(1/eps) budget,
the block mass lower bounds) are decided exactly at every grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from math import isqrt
from typing import Optional

import numpy as np

from .errors import PreconditionError
from .funcspec import AddSpec, MultSpec
from .sieve import PrimeTable, build_primes

CONDITION_IDS = (
    "C1_3", "C1_4", "C1_5", "C1_7", "C1_8", "C1_12", "C4_4", "C3_1_iv", "CLASS_M",
)


@dataclass
class Params:
    """Parameter bundle governing all hypothesis checks and predictors.

    eps1 and eps2 are derived (sqrt(eps) and eps*eps1).  The exponent h
    defaults to (1-b)/(min(1,rho)-b) and may be overridden; eta defaults to
    (log x)^(-1/4) at the working bound.
    """

    a: float = 0.2
    b: float = 0.2
    A: float = 1.0
    B: float = 2.5
    rho: float = 1.0
    eps: float = 0.25
    delta1: float = 0.016
    tau: float = 0.0
    h: Optional[float] = None
    eta: Optional[float] = None

    @property
    def eps1(self) -> float:
        return math.sqrt(self.eps)

    @property
    def eps2(self) -> float:
        return self.eps * self.eps1

    def h_exponent(self, comparison: bool = False) -> float:
        """Moment exponent: explicit override, else (1-b)/(min(1,rho)-b);
        the comparison-theorem variant uses (1-b)/b.  Degenerate denominators
        (rho <= b, or b = 1) yield inf/nan rather than raising: the exponent
        is meaningless there but other derived constants remain usable."""
        if self.h is not None:
            return self.h
        if comparison:
            return (1.0 - self.b) / self.b
        denom = min(1.0, self.rho) - self.b
        if denom <= 0.0:
            return math.inf if self.b < 1.0 else math.nan
        return (1.0 - self.b) / denom

    def eta_x(self, x: int) -> float:
        if self.eta is not None:
            return self.eta
        return math.log(x) ** -0.25

    def validate(self, x: Optional[int] = None, comparison: bool = False) -> list:
        """Advisory range check; returns a list of violated conditions.

        The comparison-theorem variant narrows a to (0, 1/4] and b to
        [a, 1/2).  Violations are reported, not raised: desk-scale runs
        routinely explore parameters outside the asymptotic ranges.
        """
        bad = []
        a_hi, b_hi = (0.25, 0.5) if comparison else (0.5, 1.0)
        if not (0 < self.a <= a_hi):
            bad.append(f"a={self.a} outside (0, {a_hi}]")
        if not (self.a <= self.b < b_hi):
            bad.append(f"b={self.b} outside [a, {b_hi})")
        if self.A < 2 * self.b:
            bad.append(f"A={self.A} < 2b={2 * self.b}")
        if self.B <= 0:
            bad.append(f"B={self.B} <= 0")
        if not (0 < self.eps <= 0.5):
            bad.append(f"eps={self.eps} outside (0, 1/2]")
        if x is not None and self.eps <= 1.0 / math.sqrt(math.log(x)):
            bad.append(f"eps={self.eps} <= 1/sqrt(log x)={1.0 / math.sqrt(math.log(x)):.6g}")
        if not comparison and not (2 * self.b <= self.rho <= self.A):
            bad.append(f"rho={self.rho} outside [2b, A]")
        if self.delta1 <= 0:
            bad.append(f"delta1={self.delta1} <= 0")
        return bad

    def as_dict(self) -> dict:
        d = asdict(self)
        d["eps1"] = self.eps1
        d["eps2"] = self.eps2
        return d


def default_params(x: int, eps_floor: float = 0.02, **overrides) -> Params:
    """Documented defaults that satisfy the checkable hypotheses for r = one:
    eps = max(1/sqrt(log x), eps_floor) and b = 0.2 (the block mass bound
    with constant 4b forces b < ~1/4 at prime density 1)."""
    eps = overrides.pop("eps", max(1.0 / math.sqrt(math.log(x)), eps_floor))
    return Params(eps=min(eps, 0.5), **overrides)


@dataclass
class ConstantSet:
    """Derived constants for the main-term and error-budget formulas."""

    beta: float
    beta0: float
    delta0: float
    delta_thm: float
    h_exp: float
    w_f: float
    delta_4_3: float
    c_4_2: float


def constants(params: Params, is_real: bool = True) -> ConstantSet:
    """All derived constants.

    beta = 1 - sin(p)/p at p = pi*rho/A; beta0 uses 2*pi*b/A; delta0 =
    b*beta0/3; delta_thm = w_f*delta1; the sifting exponent delta_4_3 =
    b*beta(b,A)/12 with beta(b,A) built from pi*b/A; the competing constant
    c_4_2 = b^3/(b^2 + 3456 A^2) (valid for b <= 12*sqrt(2A)).
    """
    if params.A <= 0 or params.b <= 0 or params.rho <= 0:
        raise PreconditionError("constants: A, b, rho must be positive")
    if params.rho > params.A:
        raise PreconditionError(f"constants: rho={params.rho} exceeds A={params.A}")
    if params.b > 12.0 * math.sqrt(2.0 * params.A):
        raise PreconditionError(
            f"constants: b={params.b} exceeds 12*sqrt(2A)={12 * math.sqrt(2 * params.A):.6g}"
        )
    p_angle = math.pi * params.rho / params.A
    beta = 1.0 - math.sin(p_angle) / p_angle
    u0 = 2.0 * math.pi * params.b / params.A
    beta0 = 1.0 - math.sin(u0) / u0
    delta0 = params.b * beta0 / 3.0
    w_f = 1.0 if is_real else 0.5
    u1 = math.pi * params.b / params.A
    beta_b = 1.0 - math.sin(u1) / u1
    delta_4_3 = params.b * beta_b / 12.0
    c_4_2 = params.b**3 / (params.b**2 + 3456.0 * params.A**2)
    return ConstantSet(
        beta=beta,
        beta0=beta0,
        delta0=delta0,
        delta_thm=w_f * params.delta1,
        h_exp=params.h_exponent(),
        w_f=w_f,
        delta_4_3=delta_4_3,
        c_4_2=c_4_2,
    )


# ---------------------------------------------------------------------------
# prime sums
# ---------------------------------------------------------------------------

def prime_sum_Z(x: int, spec, primes: Optional[PrimeTable] = None):
    """Z(x; f) = sum_{p<=x} f(p)/p."""
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    ps = primes.upto(x)
    if len(ps) == 0:
        return 0.0
    vals = spec.prime_values(ps)
    return np.sum(vals / ps).item()


@dataclass
class AdditiveStats:
    """Centering and spread of an additive function under the r-weight."""

    E: float
    D: float
    mu: float
    theta: float


def additive_stats(x: int, h: AddSpec, r: MultSpec,
                   primes: Optional[PrimeTable] = None) -> AdditiveStats:
    """E = sum r(p)h(p)/p, D^2 = sum r(p)h(p)^2/p, mu = max|h(p)|/D,
    theta = mu + 1/D."""
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    ps = primes.upto(x)
    if len(ps) == 0:
        raise PreconditionError("additive_stats: no primes <= x")
    hp = np.asarray(h.prime_values(ps), dtype=np.float64)
    rp = np.real(np.asarray(r.prime_values(ps)))
    E = float(np.sum(rp * hp / ps))
    D2 = float(np.sum(rp * hp * hp / ps))
    if D2 <= 0.0:
        raise PreconditionError("additive_stats: degenerate variance (D^2 <= 0)")
    D = math.sqrt(D2)
    mu = float(np.max(np.abs(hp))) / D
    return AdditiveStats(E=E, D=D, mu=mu, theta=mu + 1.0 / D)


# ---------------------------------------------------------------------------
# condition checkers
# ---------------------------------------------------------------------------

@dataclass
class ConditionReport:
    """Outcome of one hypothesis check over a y-grid.

    measured_constant is the supremum of LHS/RHS over the grid; holds is the
    exact inequality for explicit-constant conditions and a threshold
    comparison for the implicit-constant ones.  worst_y marks the tightest
    grid point.
    """

    condition_id: str
    holds: bool
    measured_constant: float
    y_grid: np.ndarray = field(repr=False)
    worst_y: float = math.nan
    details: dict = field(default_factory=dict)

    def csv_row(self) -> str:
        return (
            f"{self.condition_id},{str(self.holds).lower()},"
            f"{repr(float(self.measured_constant))},{repr(float(self.worst_y))}"
        )


def _geom_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """n geometric points in (lo, hi], endpoint included."""
    if not (hi > lo > 0):
        raise PreconditionError(f"empty y-grid: ({lo:.6g}, {hi:.6g}]")
    return np.geomspace(lo, hi, n + 1)[1:]


def _ratio_report(condition_id, ratios, grid, threshold, lower_bound=False,
                  details=None) -> ConditionReport:
    ratios = np.asarray(ratios, dtype=np.float64)
    measured = float(np.max(ratios))
    if lower_bound:
        worst = int(grid[int(np.argmin(ratios))])
        holds = bool(np.all(ratios >= 1.0))
    else:
        worst = int(grid[int(np.argmax(ratios))])
        holds = bool(measured <= threshold)
    return ConditionReport(condition_id, holds, measured, np.asarray(grid),
                           worst, details or {})


def check_condition(condition_id: str, params: Params, f, r, x: int, *,
                    h: Optional[AddSpec] = None,
                    primes: Optional[PrimeTable] = None,
                    threshold: float = 10.0,
                    grid_points: int = 64,
                    exponent: Optional[float] = None) -> ConditionReport:
    """Measure one hypothesis for (f, r) at scale x.

    The y-grid is geometric with grid_points points in (x^eps, x], or in
    (e^{1/eps1}, x^{1/(1+eps1)}] for the block mass conditions C1_12/C4_4
    (with eta in place of eps1 for C4_4).  For C1_4 the moment exponent
    defaults to params.h_exponent(); pass exponent to probe the variant with
    a different power (the printed source is ambiguous between b and h, so
    both are computable).
    """
    if condition_id not in CONDITION_IDS:
        raise PreconditionError(f"unknown condition id: {condition_id}")
    if condition_id == "CLASS_M":
        return class_membership(f if f is not None else r, params.A, params.B, x,
                                primes=primes)
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    ps = primes.upto(x).astype(np.float64)
    logp = np.log(ps)
    eps = params.eps

    if condition_id == "C3_1_iv":
        if h is None:
            raise PreconditionError("C3_1_iv requires the additive spec h")
        total = 0.0
        for p in primes.upto(isqrt(x)):
            p = int(p)
            q = p * p
            nu = 2
            while q <= x:
                total += abs(r.value(p, nu).real) * abs(h.value(p, nu)) \
                    * math.log(q) / q
                q *= p
                nu += 1
        return ConditionReport("C3_1_iv", total <= threshold, total,
                               np.array([x]), x)

    rp = np.real(np.asarray(r.prime_values(primes.upto(x))))
    if condition_id in ("C1_12", "C4_4"):
        if condition_id == "C1_12":
            width = params.eps1
            cst = 4.0 * params.b
        else:
            width = params.eta_x(x)
            cst = params.b
        lo = math.exp(1.0 / width)
        hi = x ** (1.0 / (1.0 + width))
        grid = _geom_grid(lo, hi, grid_points)
        wcum = np.concatenate(([0.0], np.cumsum(rp * logp / ps)))
        lhs = np.empty(len(grid))
        for i, y in enumerate(grid):
            a = np.searchsorted(ps, y, side="right")
            bnd = np.searchsorted(ps, y ** (1.0 + width), side="right")
            lhs[i] = wcum[bnd] - wcum[a]
        rhs = cst * width * np.log(grid)
        return _ratio_report(condition_id, lhs / rhs, grid, threshold,
                             lower_bound=True)

    fp = np.asarray(f.prime_values(primes.upto(x)))
    diff = np.maximum(rp - np.real(fp), 0.0)

    if condition_id == "C1_3":
        cset = constants(params, is_real=f.is_real)
        lhs = float(np.sum(diff / ps))
        rhs = 0.5 * cset.beta * params.b * math.log(1.0 / eps)
        measured = lhs / rhs if rhs > 0 else (math.inf if lhs > 0 else 0.0)
        return ConditionReport("C1_3", lhs <= rhs, measured, np.array([x]), x,
                               {"lhs": lhs, "rhs": rhs})

    hexp = exponent if exponent is not None else params.h_exponent()
    cut = np.searchsorted(ps, x**eps, side="right")

    if condition_id == "C1_4":
        grid = _geom_grid(x**eps, float(x), grid_points)
        terms = diff**hexp * logp / ps
        terms[:cut] = 0.0
        tcum = np.concatenate(([0.0], np.cumsum(terms)))
        lhs = tcum[np.searchsorted(ps, grid, side="right")]
        rhs = eps ** (params.delta1 * hexp) * np.log(grid)
        return _ratio_report("C1_4", lhs / rhs, grid, threshold,
                             details={"exponent": hexp})

    if condition_id == "C1_5":
        grid = _geom_grid(x**eps, float(x), grid_points)
        terms = (rp - params.rho) * logp / ps
        tcum = np.concatenate(([0.0], np.cumsum(terms)))
        lhs = np.abs(tcum[np.searchsorted(ps, grid, side="right")])
        rhs = eps * np.log(grid)
        return _ratio_report("C1_5", lhs / rhs, grid, threshold)

    if condition_id == "C1_7":
        lhs = float(np.sum(diff[cut:] ** hexp / ps[cut:]))
        rhs = eps ** (params.delta1 * hexp)
        return ConditionReport("C1_7", lhs / rhs <= threshold, lhs / rhs,
                               np.array([x]), x, {"exponent": hexp})

    if condition_id == "C1_8":
        seg = diff[cut:]
        lhs = float(np.max(seg)) if len(seg) else 0.0
        rhs = eps**params.delta1
        return ConditionReport("C1_8", lhs / rhs <= threshold, lhs / rhs,
                               np.array([x]), x)

    raise PreconditionError(f"unhandled condition id: {condition_id}")


def class_membership(spec: MultSpec, A: float, B: float, x: int,
                     primes: Optional[PrimeTable] = None) -> ConditionReport:
    """Check max_p |f(p)| <= A and the prime-power tail sum
    sum_{nu>=2, p^nu<=x} |f(p^nu)| log(p^nu) / p^nu <= B (truncated at x)."""
    if primes is None or primes.bound < x:
        primes = build_primes(int(x))
    ps = primes.upto(x)
    max_prime = float(np.max(np.abs(np.asarray(spec.prime_values(ps))))) if len(ps) else 0.0
    tail = 0.0
    for p in primes.upto(isqrt(x)):
        p = int(p)
        q = p * p
        nu = 2
        while q <= x:
            tail += abs(complex(spec.value(p, nu))) * math.log(q) / q
            q *= p
            nu += 1
    holds = (max_prime <= A) and (tail <= B)
    return ConditionReport("CLASS_M", holds, tail, np.array([x]), x,
                           {"max_prime_value": max_prime, "tail_sum": tail,
                            "A": A, "B": B})
