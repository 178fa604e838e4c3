"""Multiplicative and additive functions defined by prime-power rules.

A :class:`MultSpec` is determined by its values at prime powers (the value at
exponent 0 is implicitly 1), a :class:`AddSpec` by prime-power contributions
summed over the factorization.  Exact tables of values on [1, x] are produced
by a residual-factor sieve: divide every n by its prime factors up to sqrt(x),
multiplying (or adding) the rule value for the exact exponent, and finish with
the single surviving prime factor > sqrt(x).

The combinator zoo (twist, coprime restriction, Dirichlet convolution,
exponential extension, convolution cofactor) operates at the prime-power
level, so evaluation stays a single sieve pass regardless of how a spec was
assembled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import isqrt
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import EvaluationError, MeanlabError, PreconditionError
from .sieve import DEFAULT_SEGMENT_SIZE, SpfTable, build_primes


def _format_number(v) -> str:
    if isinstance(v, bool):
        raise TypeError("booleans are not spec parameters")
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


@dataclass(eq=True)
class MultSpec:
    """A multiplicative function given by its rule at prime powers.

    rule(p, nu) with nu >= 1 returns f(p^nu); f(1) = 1 implicitly.  Equality
    is structural (catalog id, parameters, children), so two specs built the
    same way compare equal even though their rule callables differ.
    """

    rule: Callable[[int, int], complex] = field(compare=False, repr=False)
    is_real: bool = True
    is_nonnegative: bool = False
    catalog_id: str = "custom"
    parameters: dict = field(default_factory=dict)
    children: tuple = ()
    prime_vec: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, compare=False, repr=False
    )
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def value(self, p: int, nu: int) -> complex:
        """f(p^nu), cached per (p, nu)."""
        if nu == 0:
            return 1.0
        key = (p, nu)
        v = self._cache.get(key)
        if v is None:
            v = self.rule(p, nu)
            if not _is_finite(v):
                raise EvaluationError(
                    f"rule for {self.describe()} returned non-finite value at (p={p}, nu={nu})"
                )
            self._cache[key] = v
        return v

    def powers(self, p: int, nu_max: int) -> list:
        """[f(p), f(p^2), ..., f(p^nu_max)]."""
        return [self.value(p, nu) for nu in range(1, nu_max + 1)]

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        """Vector of f(p) over a prime array; falls back to unique+loop."""
        return _prime_values(self, primes)

    def describe(self) -> str:
        return self.catalog_id

    def expr(self) -> str:
        """Canonical expression string (grammar-expressible specs only)."""
        return _expr_of(self)


@dataclass(eq=True)
class AddSpec:
    """A real additive function given by its rule at prime powers.

    h(1) = 0; h(n) is the sum of rule(p, nu) over the factorization.  If
    strongly_additive, rule(p, nu) == rule(p, 1) for all nu.
    """

    rule: Callable[[int, int], float] = field(compare=False, repr=False)
    strongly_additive: bool = False
    catalog_id: str = "custom"
    parameters: dict = field(default_factory=dict)
    prime_vec: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, compare=False, repr=False
    )
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    is_real = True  # additive specs are real-valued by contract

    def value(self, p: int, nu: int) -> float:
        if nu == 0:
            return 0.0
        key = (p, nu)
        v = self._cache.get(key)
        if v is None:
            v = float(self.rule(p, nu))
            if not math.isfinite(v):
                raise EvaluationError(
                    f"rule for {self.describe()} returned non-finite value at (p={p}, nu={nu})"
                )
            self._cache[key] = v
        return v

    def powers(self, p: int, nu_max: int) -> list:
        return [self.value(p, nu) for nu in range(1, nu_max + 1)]

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        return _prime_values(self, primes)

    def describe(self) -> str:
        return self.catalog_id

    def expr(self) -> str:
        return _expr_of(self)


def _is_finite(v) -> bool:
    c = complex(v)
    return math.isfinite(c.real) and math.isfinite(c.imag)


def _prime_values(spec, primes: np.ndarray) -> np.ndarray:
    if len(primes) == 0:
        dtype = np.float64 if spec.is_real else np.complex128
        return np.empty(0, dtype=dtype)
    if spec.prime_vec is not None:
        return np.asarray(spec.prime_vec(primes))
    uniq, inverse = np.unique(primes, return_inverse=True)
    vals = np.array([spec.value(int(p), 1) for p in uniq])
    return vals[inverse]


def _expr_of(spec) -> str:
    cid = spec.catalog_id
    if cid in ("one", "squarefree", "omega", "bigomega"):
        return cid
    if cid in ("divisor", "omega_exp", "bigomega_exp"):
        kv = ",".join(f"{k}={_format_number(v)}" for k, v in spec.parameters.items())
        return f"{cid}:{kv}"
    if cid in ("twist", "coprime"):
        (child,) = spec.children
        (arg,) = spec.parameters.values()
        return f"{cid}({child.expr()},{_format_number(arg)})"
    if cid in ("conv", "cofactor"):
        a, b = spec.children
        return f"{cid}({a.expr()},{b.expr()})"
    if cid == "expext":
        (child,) = spec.children
        return f"expext({child.expr()})"
    raise MeanlabError(f"spec '{cid}' has no canonical expression")


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def one() -> MultSpec:
    """f(n) = 1."""
    return MultSpec(
        rule=lambda p, nu: 1.0,
        is_real=True,
        is_nonnegative=True,
        catalog_id="one",
        prime_vec=lambda ps: np.ones(len(ps)),
    )


def squarefree() -> MultSpec:
    """f(n) = mu^2(n): indicator of squarefree integers."""
    return MultSpec(
        rule=lambda p, nu: 1.0 if nu == 1 else 0.0,
        is_real=True,
        is_nonnegative=True,
        catalog_id="squarefree",
        prime_vec=lambda ps: np.ones(len(ps)),
    )


def divisor(rho: float) -> MultSpec:
    """Generalized divisor function of order rho: f(p^nu) = C(rho+nu-1, nu).

    At primes f(p) = rho, so rho plays the role of the mean prime value.
    """
    rho = float(rho)

    def rule(p, nu):
        v = 1.0
        for j in range(nu):
            v *= (rho + j) / (j + 1)
        return v

    return MultSpec(
        rule=rule,
        is_real=True,
        is_nonnegative=rho >= 0.0,
        catalog_id="divisor",
        parameters={"rho": rho},
        prime_vec=lambda ps: np.full(len(ps), rho),
    )


def omega_exp(z) -> MultSpec:
    """f(n) = z^omega(n): f(p^nu) = z for every nu >= 1."""
    zc = complex(z)
    is_real = zc.imag == 0.0
    zval = zc.real if is_real else zc

    return MultSpec(
        rule=lambda p, nu: zval,
        is_real=is_real,
        is_nonnegative=is_real and zc.real >= 0.0,
        catalog_id="omega_exp",
        parameters={"z": zval},
        prime_vec=lambda ps: np.full(len(ps), zval),
    )


def bigomega_exp(z) -> MultSpec:
    """f(n) = z^Omega(n): f(p^nu) = z^nu.  Requires |z| <= 1.9.

    The local factor at p = 2 diverges as |z| -> 2, hence the cap.
    """
    zc = complex(z)
    if abs(zc) > 1.9:
        raise ValueError(f"bigomega_exp requires |z| <= 1.9, got |z| = {abs(zc)}")
    is_real = zc.imag == 0.0
    zval = zc.real if is_real else zc

    return MultSpec(
        rule=lambda p, nu: zval**nu,
        is_real=is_real,
        is_nonnegative=is_real and zc.real >= 0.0,
        catalog_id="bigomega_exp",
        parameters={"z": zval},
        prime_vec=lambda ps: np.full(len(ps), zval),
    )


def dirichlet_identity() -> MultSpec:
    """The convolution identity: 1 at n = 1, 0 elsewhere."""
    return MultSpec(
        rule=lambda p, nu: 0.0,
        is_real=True,
        is_nonnegative=True,
        catalog_id="identity",
        prime_vec=lambda ps: np.zeros(len(ps)),
    )


def omega() -> AddSpec:
    """Number of distinct prime factors (strongly additive)."""
    return AddSpec(
        rule=lambda p, nu: 1.0,
        strongly_additive=True,
        catalog_id="omega",
        prime_vec=lambda ps: np.ones(len(ps)),
    )


def bigomega() -> AddSpec:
    """Number of prime factors counted with multiplicity."""
    return AddSpec(
        rule=lambda p, nu: float(nu),
        strongly_additive=False,
        catalog_id="bigomega",
        prime_vec=lambda ps: np.ones(len(ps)),
    )


# ---------------------------------------------------------------------------
# combinators
# ---------------------------------------------------------------------------

def twist(f: MultSpec, tau: float) -> MultSpec:
    """f_tau(n) = f(n) / n^{i tau}: each prime power picks up p^{-i nu tau}."""
    if not isinstance(f, MultSpec):
        raise ValueError("twist requires a multiplicative spec")
    tau = float(tau)
    if tau == 0.0:
        return f

    def rule(p, nu):
        return complex(f.value(p, nu)) * complex(
            math.cos(nu * tau * math.log(p)), -math.sin(nu * tau * math.log(p))
        )

    def pv(ps):
        base = np.asarray(f.prime_values(ps), dtype=np.complex128)
        return base * np.exp(-1j * tau * np.log(ps.astype(np.float64)))

    return MultSpec(
        rule=rule,
        is_real=False,
        is_nonnegative=False,
        catalog_id="twist",
        parameters={"tau": tau},
        children=(f,),
        prime_vec=pv,
    )


def restrict_coprime(f: MultSpec, D: int) -> MultSpec:
    """f_D(n) = f(n) if gcd(n, D) = 1, else 0: kills prime powers with p | D."""
    if not isinstance(f, MultSpec):
        raise ValueError("coprime restriction requires a multiplicative spec")
    D = int(D)
    if D < 1:
        raise PreconditionError("restrict_coprime: D must be >= 1")
    if D == 1:
        return f

    def rule(p, nu):
        return 0.0 if D % p == 0 else f.value(p, nu)

    def pv(ps):
        base = np.asarray(f.prime_values(ps)).copy()
        base[D % ps == 0] = 0.0
        return base

    return MultSpec(
        rule=rule,
        is_real=f.is_real,
        is_nonnegative=f.is_nonnegative,
        catalog_id="coprime",
        parameters={"D": D},
        children=(f,),
        prime_vec=pv,
    )


def convolve_spec(f: MultSpec, g: MultSpec) -> MultSpec:
    """Dirichlet convolution at the prime-power level:
    (f*g)(p^nu) = sum_{0<=j<=nu} f(p^j) g(p^{nu-j})."""

    def rule(p, nu):
        return sum(f.value(p, j) * g.value(p, nu - j) for j in range(nu + 1))

    def pv(ps):
        return np.asarray(f.prime_values(ps)) + np.asarray(g.prime_values(ps))

    return MultSpec(
        rule=rule,
        is_real=f.is_real and g.is_real,
        is_nonnegative=f.is_nonnegative and g.is_nonnegative,
        catalog_id="conv",
        children=(f, g),
        prime_vec=pv,
    )


def cofactor(r: MultSpec, s: MultSpec) -> MultSpec:
    """The t with s * t = r, solved by the triangular recurrence
    t(p^nu) = r(p^nu) - sum_{1<=j<=nu} s(p^j) t(p^{nu-j})."""
    memo: dict = {}

    def t_value(p, nu):
        if nu == 0:
            return 1.0
        key = (p, nu)
        v = memo.get(key)
        if v is None:
            v = r.value(p, nu) - sum(
                s.value(p, j) * t_value(p, nu - j) for j in range(1, nu + 1)
            )
            memo[key] = v
        return v

    def pv(ps):
        return np.asarray(r.prime_values(ps)) - np.asarray(s.prime_values(ps))

    return MultSpec(
        rule=t_value,
        is_real=r.is_real and s.is_real,
        is_nonnegative=False,
        catalog_id="cofactor",
        children=(r, s),
        prime_vec=pv,
    )


def exp_extension(prime_values: Mapping[int, float]) -> MultSpec:
    """Exponentially multiplicative spec from a finite prime -> value map:
    s(p^nu) = s(p)^nu / nu!, with s(p) = 0 for primes not in the map."""
    table = {int(p): float(v) for p, v in prime_values.items()}
    nonneg = all(v >= 0.0 for v in table.values())

    def rule(p, nu):
        sp = table.get(p, 0.0)
        if sp == 0.0:
            return 0.0
        return sp**nu / math.factorial(nu)

    return MultSpec(
        rule=rule,
        is_real=True,
        is_nonnegative=nonneg,
        catalog_id="expext_table",
        parameters={},
    )


def exp_extension_spec(f: MultSpec) -> MultSpec:
    """Exponentially multiplicative extension of f's prime values:
    s(p^nu) = f(p)^nu / nu!."""
    if not isinstance(f, MultSpec):
        raise ValueError("expext requires a multiplicative spec")

    def rule(p, nu):
        fp = f.value(p, 1)
        if fp == 0:
            return 0.0
        return fp**nu / math.factorial(nu)

    return MultSpec(
        rule=rule,
        is_real=f.is_real,
        is_nonnegative=f.is_nonnegative,
        catalog_id="expext",
        children=(f,),
        prime_vec=lambda ps: np.asarray(f.prime_values(ps)),
    )


# ---------------------------------------------------------------------------
# value tables
# ---------------------------------------------------------------------------

@dataclass
class ValueTable:
    """Exact values f(1..bound) plus prefix sums for summatory queries.

    values[0] is unused (always 0); prefix[y] = sum of values[1..y].
    """

    bound: int
    values: np.ndarray = field(repr=False)
    prefix: np.ndarray = field(repr=False)
    kind: str = "mult"

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)


def summatory(table: ValueTable, y: int):
    """M(y; f) = sum_{n<=y} f(n) from the prefix sums."""
    if y < 1 or y > table.bound:
        raise PreconditionError(f"summatory: y={y} outside [1, {table.bound}]")
    return table.prefix[int(y)].item()


def _values_range(spec, lo: int, hi: int, base_primes: np.ndarray, is_mult: bool,
                  dtype) -> np.ndarray:
    """Values of the spec on [lo, hi) via the residual-factor sieve.

    base_primes must contain every prime <= sqrt(hi - 1).  After dividing out
    those primes, each residual is 1 or a single prime > sqrt(hi - 1), so one
    vectorized lookup finishes the job.
    """
    n = hi - lo
    if is_mult:
        val = np.ones(n, dtype=dtype)
    else:
        val = np.zeros(n, dtype=dtype)
    rem = np.arange(lo, hi, dtype=np.int64)
    if lo == 0:
        rem[0] = 1  # n = 0 guard; caller never asks for it
    root = isqrt(hi - 1)
    for p in base_primes:
        p = int(p)
        if p > root:
            break
        start = ((lo + p - 1) // p) * p
        if start >= hi:
            continue
        count = (hi - 1 - start) // p + 1
        expo = np.ones(count, dtype=np.int8)
        rem[start - lo :: p] //= p
        q = p * p
        while q < hi:
            s2 = ((lo + q - 1) // q) * q
            if s2 >= hi:
                break
            expo[(s2 - start) // p :: q // p] += 1
            rem[s2 - lo :: q] //= p
            q *= p
        rv = np.array(spec.powers(p, int(expo.max())), dtype=dtype)
        if is_mult:
            val[start - lo :: p] *= rv[expo - 1]
        else:
            val[start - lo :: p] += rv[expo - 1]
    big = np.nonzero(rem > 1)[0]
    if len(big):
        pv = spec.prime_values(rem[big]).astype(dtype, copy=False)
        bad = np.nonzero(~np.isfinite(pv) if not np.iscomplexobj(pv)
                         else ~(np.isfinite(pv.real) & np.isfinite(pv.imag)))[0]
        if len(bad):
            raise EvaluationError(
                f"rule for {spec.describe()} returned non-finite value at "
                f"(p={int(rem[big][bad[0]])}, nu=1)"
            )
        if is_mult:
            val[big] *= pv
        else:
            val[big] += pv
    return val


def _values_full(spec, x: int, is_mult: bool, segment_size: int) -> np.ndarray:
    dtype = np.float64 if spec.is_real else np.complex128
    base = build_primes(isqrt(x)).primes
    out = np.empty(x + 1, dtype=dtype)
    out[0] = 0.0
    for lo in range(1, x + 1, segment_size):
        hi = min(lo + segment_size, x + 1)
        out[lo:hi] = _values_range(spec, lo, hi, base, is_mult, dtype)
    return out


def _values_via_spf(spec, x: int, spf_table: SpfTable, is_mult: bool) -> np.ndarray:
    """Same values computed through the spf table (independent code path).

    fac[n] holds the rule value of the smallest-prime-power block of n and
    cof[n] the cofactor n / p^{v_p(n)}; pointer jumping along cof accumulates
    the full product (or sum).
    """
    dtype = np.float64 if spec.is_real else np.complex128
    spf = spf_table.spf[: x + 1].astype(np.int64)
    ns = np.arange(x + 1, dtype=np.int64)
    p = spf.copy()
    p[:2] = 1
    cof = np.ones(x + 1, dtype=np.int64)
    cof[2:] = ns[2:] // p[2:]
    expo = np.ones(x + 1, dtype=np.int8)
    while True:
        active = (cof > 1) & (spf[cof] == p)
        if not active.any():
            break
        cof[active] //= p[active]
        expo[active] += 1

    fac = np.empty(x + 1, dtype=dtype)
    fac[:2] = 1.0 if is_mult else 0.0
    simple = (expo == 1) & (ns >= 2)
    fac[simple] = spec.prime_values(p[simple]).astype(dtype, copy=False)
    for n in np.nonzero((expo > 1) & (ns >= 2))[0]:
        fac[n] = spec.value(int(p[n]), int(expo[n]))

    out = fac.copy()
    cur = cof.copy()
    while True:
        active = cur > 1
        if not active.any():
            break
        if is_mult:
            out[active] *= fac[cur[active]]
        else:
            out[active] += fac[cur[active]]
        cur[active] = cof[cur[active]]
    out[0] = 0.0
    return out


def eval_mult(spec: MultSpec, x: int, sieve: Optional[SpfTable] = None,
              segment_size: int = DEFAULT_SEGMENT_SIZE * 4) -> ValueTable:
    """Exact table of f(1..x) for a multiplicative spec.

    When an spf table covering x is supplied it is used as the factorization
    backend; otherwise a residual-factor sieve runs standalone.  Both paths
    produce the same values up to floating rounding.
    """
    if x < 1:
        raise PreconditionError("eval_mult: x must be >= 1")
    if sieve is not None and sieve.bound >= x:
        values = _values_via_spf(spec, x, sieve, is_mult=True)
    else:
        values = _values_full(spec, x, is_mult=True, segment_size=segment_size)
    prefix = np.cumsum(values)
    return ValueTable(x, values, prefix, kind="mult")


def eval_add(spec: AddSpec, x: int, sieve: Optional[SpfTable] = None,
             segment_size: int = DEFAULT_SEGMENT_SIZE * 4) -> ValueTable:
    """Exact table of h(1..x) for an additive spec (h(1) = 0)."""
    if x < 1:
        raise PreconditionError("eval_add: x must be >= 1")
    if sieve is not None and sieve.bound >= x:
        values = _values_via_spf(spec, x, sieve, is_mult=False)
    else:
        values = _values_full(spec, x, is_mult=False, segment_size=segment_size)
    prefix = np.cumsum(values)
    return ValueTable(x, values, prefix, kind="add")


def convolve_table(a: ValueTable, b: ValueTable, x: int) -> ValueTable:
    """Table-level Dirichlet convolution: out(n) = sum_{d|n} a(d) b(n/d).

    O(x log x) through the divisor lattice; both tables must cover [1, x].
    """
    if a.bound < x or b.bound < x:
        raise PreconditionError(
            f"convolve_table: tables cover [1,{a.bound}], [1,{b.bound}] < x={x}"
        )
    dtype = np.complex128 if (a.is_complex or b.is_complex) else np.float64
    out = np.zeros(x + 1, dtype=dtype)
    av = a.values
    bv = b.values
    for d in range(1, x + 1):
        ad = av[d]
        if ad != 0:
            out[d :: d] += ad * bv[1 : x // d + 1]
    prefix = np.cumsum(out)
    return ValueTable(x, out, prefix, kind="mult")


# ---------------------------------------------------------------------------
# block minorant
# ---------------------------------------------------------------------------

@dataclass
class BlockMinorant:
    """Prime function s supported on multiplicative blocks of [2, x].

    Blocks are (y_k, y_{k+1}] with y_k = exp((1+eps1)^k) for k in the index
    range; on each block s(p) = 2 b r(p) / b_k where b_k is the measured
    block mass sum_{y_k<p<=y_{k+1}} r(p) log p / p normalized by eps1 log y_k.
    Blocks whose mass falls below 4b are recorded in violated_blocks and
    their denominator is clamped to 4b, which keeps 0 <= s(p) <= r(p)/2
    everywhere.
    """

    b: float
    eps1: float
    x: int
    k_min: int
    k_max: int
    boundaries: np.ndarray = field(repr=False)
    block_masses: np.ndarray = field(repr=False)
    primes: np.ndarray = field(repr=False)
    s_values: np.ndarray = field(repr=False)
    violated_blocks: tuple = ()

    @property
    def eps(self) -> float:
        return self.eps1 * self.eps1

    @property
    def eps2(self) -> float:
        return self.eps * self.eps1

    @property
    def prime_values(self) -> dict:
        return {int(p): float(s) for p, s in zip(self.primes, self.s_values)}

    def z_sum(self, z: float) -> float:
        """Sum of s(p)/p over p <= z."""
        k = np.searchsorted(self.primes, z, side="right")
        return float(np.sum(self.s_values[:k] / self.primes[:k]))


def block_minorant(r: MultSpec, b: float, eps1: float, x: int) -> BlockMinorant:
    """Construct the block-supported minorant s of r with mass level 2b.

    The index range runs from the first block above x^{eps2} (eps2 =
    eps1^3) to the last block ending below x, so the support misses
    [2, x^{eps2}] entirely.
    """
    if not (0 < eps1 < 1):
        raise PreconditionError("block_minorant: eps1 must lie in (0, 1)")
    if b <= 0:
        raise PreconditionError("block_minorant: b must be positive")
    logx = math.log(x)
    eps2 = eps1**3
    lam = math.log1p(eps1)
    k_lo = math.log(eps2 * logx) / lam if eps2 * logx > 0 else -math.inf
    k_min = max(0, math.ceil(k_lo - 1e-12))
    k_max = math.floor(math.log(logx) / lam - 1 + 1e-12)
    if k_max < k_min:
        raise PreconditionError(
            f"block_minorant: empty block index range for eps1={eps1}, x={x}"
        )
    ks = np.arange(k_min, k_max + 2)
    boundaries = np.exp((1.0 + eps1) ** ks)

    ptab = build_primes(int(math.ceil(boundaries[-1])))
    sel = (ptab.primes > boundaries[0]) & (ptab.primes <= boundaries[-1])
    primes = ptab.primes[sel]
    block = np.searchsorted(boundaries, primes, side="left") - 1

    rp = np.asarray(r.prime_values(primes), dtype=np.float64)
    weights = rp * np.log(primes) / primes
    nblocks = k_max - k_min + 1
    masses = np.bincount(block, weights=weights, minlength=nblocks)
    b_k = masses / (eps1 * np.log(boundaries[:-1]))
    violated = tuple(int(k_min + i) for i in np.nonzero(b_k < 4.0 * b)[0])

    denom = np.maximum(b_k, 4.0 * b)
    s_values = 2.0 * b * rp / denom[block]
    return BlockMinorant(
        b=float(b),
        eps1=float(eps1),
        x=int(x),
        k_min=int(k_min),
        k_max=int(k_max),
        boundaries=boundaries,
        block_masses=b_k,
        primes=primes,
        s_values=s_values,
        violated_blocks=violated,
    )


def squarefree_split(r: MultSpec, minorant: BlockMinorant):
    """(s1, t1): squarefree-supported split with s1(p) = s(p) and
    t1(p) = r(p) - s(p), zero at all higher prime powers."""
    table = minorant.prime_values

    def s1_rule(p, nu):
        return table.get(p, 0.0) if nu == 1 else 0.0

    def t1_rule(p, nu):
        return (r.value(p, 1) - table.get(p, 0.0)) if nu == 1 else 0.0

    def s1_pv(ps):
        return np.array([table.get(int(p), 0.0) for p in ps])

    def t1_pv(ps):
        base = np.asarray(r.prime_values(ps), dtype=np.float64)
        return base - s1_pv(ps)

    s1 = MultSpec(rule=s1_rule, is_real=True, is_nonnegative=True,
                  catalog_id="split_s1", prime_vec=s1_pv)
    t1 = MultSpec(rule=t1_rule, is_real=True, is_nonnegative=r.is_nonnegative,
                  catalog_id="split_t1", prime_vec=t1_pv)
    return s1, t1
