import math
import random

import numpy as np
import pytest

import meanlab as ml
from meanlab.errors import EvaluationError, MeanlabError, PreconditionError


# ---------------------------------------------------------------------------
# oracles: trial-division evaluation, independent of the sieve paths
# ---------------------------------------------------------------------------

def trial_factor(n):
    pairs = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            pairs.append((d, e))
        d += 1
    if n > 1:
        pairs.append((n, 1))
    return pairs


def naive_mult(spec, n):
    v = 1.0
    for p, e in trial_factor(n):
        v *= spec.value(p, e)
    return v


def naive_add(spec, n):
    return sum(spec.value(p, e) for p, e in trial_factor(n))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def test_eval_mult_one():
    t = ml.eval_mult(ml.one(), 10)
    assert np.allclose(t.values[1:], 1.0)
    assert ml.summatory(t, 10) == 10.0


def test_eval_mult_squarefree():
    t = ml.eval_mult(ml.squarefree(), 10)
    # mu^2(n) for 1..10: squarefree are 1,2,3,5,6,7,10
    assert t.values[1:].tolist() == [1, 1, 1, 0, 1, 1, 1, 0, 0, 1]
    assert ml.summatory(t, 10) == 7.0


def test_eval_mult_omega_exp():
    t = ml.eval_mult(ml.omega_exp(2.0), 12)
    assert t.values[12] == 4.0  # omega(12) = 2
    assert ml.summatory(t, 4) == 1 + 2 + 2 + 2


def test_eval_mult_matches_trial_division():
    random.seed(7)
    for spec in (ml.divisor(0.5), ml.omega_exp(0.5), ml.bigomega_exp(-1.0),
                 ml.convolve_spec(ml.one(), ml.squarefree())):
        t = ml.eval_mult(spec, 3000)
        for n in random.sample(range(1, 3001), 250):
            assert t.values[n] == pytest.approx(naive_mult(spec, n), rel=1e-12)


def test_eval_mult_spf_path_matches_sieve_path():
    spf = ml.build_spf(20000)
    for spec in (ml.squarefree(), ml.divisor(1.5), ml.twist(ml.one(), 0.7)):
        a = ml.eval_mult(spec, 20000)
        b = ml.eval_mult(spec, 20000, sieve=spf)
        assert np.allclose(a.values, b.values, rtol=1e-12, atol=1e-12)


def test_eval_mult_segmented_matches_monolithic():
    spec = ml.divisor(2.0)
    a = ml.eval_mult(spec, 30000, segment_size=10**9)
    b = ml.eval_mult(spec, 30000, segment_size=1024)
    assert np.array_equal(a.values, b.values)


def test_eval_mult_nonfinite_rule():
    bad = ml.MultSpec(rule=lambda p, nu: math.inf if p == 5 else 1.0)
    with pytest.raises(EvaluationError, match=r"p=5"):
        ml.eval_mult(bad, 100)


def test_eval_add_examples():
    t = ml.eval_add(ml.omega(), 12)
    assert t.values[12] == 2.0
    assert t.values[1] == 0.0
    assert ml.summatory(t, 10) == 11.0  # direct sum of omega(1..10)
    t2 = ml.eval_add(ml.bigomega(), 12)
    assert t2.values[8] == 3.0


def test_eval_add_matches_trial_division():
    t = ml.eval_add(ml.bigomega(), 2000)
    for n in range(1, 2001):
        assert t.values[n] == naive_add(ml.bigomega(), n)


def test_summatory_range_errors():
    t = ml.eval_mult(ml.one(), 10)
    with pytest.raises(PreconditionError):
        ml.summatory(t, 0)
    with pytest.raises(PreconditionError):
        ml.summatory(t, 11)


# ---------------------------------------------------------------------------
# spec algebra
# ---------------------------------------------------------------------------

def test_convolve_spec_prime_powers():
    tau2 = ml.convolve_spec(ml.one(), ml.one())
    assert tau2.value(7, 2) == 3.0  # tau(p^2) = 3
    mix = ml.convolve_spec(ml.one(), ml.squarefree())
    assert mix.value(3, 2) == 2.0
    f = ml.divisor(0.5)
    ident = ml.convolve_spec(f, ml.dirichlet_identity())
    for nu in range(1, 7):
        assert ident.value(2, nu) == pytest.approx(f.value(2, nu))


def test_convolve_table_examples():
    t1 = ml.eval_mult(ml.one(), 10)
    conv = ml.convolve_table(t1, t1, 10)
    assert conv.values[6] == 4.0  # tau(6)
    tsq = ml.eval_mult(ml.squarefree(), 10)
    conv2 = ml.convolve_table(t1, tsq, 10)
    assert conv2.values[4] == 2.0  # mu^2(1)+mu^2(2)+mu^2(4)
    ident = ml.eval_mult(ml.dirichlet_identity(), 10)
    conv3 = ml.convolve_table(t1, ident, 10)
    assert np.array_equal(conv3.values, t1.values)


def test_convolve_table_bound_mismatch():
    a = ml.eval_mult(ml.one(), 10)
    b = ml.eval_mult(ml.one(), 5)
    with pytest.raises(PreconditionError):
        ml.convolve_table(a, b, 10)


def test_convolution_spec_vs_table():
    pairs = [(ml.one(), ml.one()),
             (ml.one(), ml.squarefree()),
             (ml.squarefree(), ml.omega_exp(0.5)),
             (ml.divisor(0.5), ml.twist(ml.one(), 1.0))]
    x = 10**4
    for f, g in pairs:
        via_spec = ml.eval_mult(ml.convolve_spec(f, g), x)
        via_table = ml.convolve_table(ml.eval_mult(f, x), ml.eval_mult(g, x), x)
        assert np.max(np.abs(via_spec.values - via_table.values)) < 1e-9


def test_exp_extension():
    s = ml.exp_extension({2: 1.0, 3: 0.0, 5: 2.0})
    assert s.value(2, 2) == 0.5
    assert s.value(3, 1) == 0.0
    assert s.value(3, 4) == 0.0
    assert s.value(5, 3) == pytest.approx(8.0 / 6.0)
    assert s.value(7, 1) == 0.0  # outside the table


def test_cofactor_recurrence():
    f = ml.divisor(1.5)
    eps = ml.cofactor(f, f)
    for nu in range(1, 7):
        assert abs(eps.value(2, nu)) < 1e-15
    s = ml.exp_extension_spec(ml.one())  # s(p) = 1, s(p^2) = 1/2, ...
    t = ml.cofactor(ml.one(), s)
    assert t.value(2, 1) == 0.0
    assert t.value(2, 2) == pytest.approx(0.5)


def test_cofactor_defining_property():
    r = ml.divisor(0.7)
    s = ml.exp_extension_spec(ml.squarefree())
    t = ml.cofactor(r, s)
    conv = ml.convolve_spec(s, t)
    for p in (2, 3, 13):
        for nu in range(1, 7):
            assert conv.value(p, nu) == pytest.approx(r.value(p, nu), abs=1e-12)


def test_cofactor_roundtrip_table():
    r = ml.one()
    s = ml.exp_extension_spec(ml.omega_exp(0.5))
    t = ml.cofactor(r, s)
    x = 10**5
    lhs = ml.eval_mult(ml.convolve_spec(s, t), x)
    rhs = ml.eval_mult(r, x)
    assert np.max(np.abs(lhs.values - rhs.values)) < 1e-9


def test_twist():
    f = ml.one()
    assert ml.twist(f, 0.0) is f
    ft = ml.twist(f, 1.0)
    expected = complex(math.cos(math.log(2)), -math.sin(math.log(2)))
    assert ft.value(2, 1) == pytest.approx(expected)
    # unit modulus at every prime power
    for p, nu in ((2, 1), (3, 2), (7, 5)):
        assert abs(abs(ft.value(p, nu)) - abs(f.value(p, nu))) < 1e-14
    assert not ft.is_real


def test_twist_value_pinned():
    ft = ml.twist(ml.one(), 1.0)
    v = ft.value(2, 1)
    assert v.real == pytest.approx(0.769239, abs=1e-6)
    assert v.imag == pytest.approx(-0.638961, abs=1e-6)


def test_restrict_coprime():
    f = ml.one()
    assert ml.restrict_coprime(f, 1) is f
    fd = ml.restrict_coprime(f, 6)
    assert fd.value(2, 1) == 0.0
    assert fd.value(5, 1) == 1.0
    t = ml.eval_mult(fd, 30)
    # coprime-to-6 count up to 30 by direct gcd
    expected = sum(1 for n in range(1, 31) if math.gcd(n, 6) == 1)
    assert ml.summatory(t, 30) == expected == 10


def test_multiplicativity_fuzz():
    random.seed(42)
    specs = [ml.one(), ml.squarefree(), ml.divisor(0.5), ml.omega_exp(2.0),
             ml.bigomega_exp(1.5), ml.twist(ml.squarefree(), 0.3),
             ml.restrict_coprime(ml.divisor(2.0), 30)]
    for spec in specs:
        t = ml.eval_mult(spec, 10**4)
        checked = 0
        while checked < 10**4:
            m = random.randint(2, 100)
            n = random.randint(2, 100)
            if math.gcd(m, n) != 1:
                continue
            lhs = t.values[m * n]
            rhs = t.values[m] * t.values[n]
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))
            checked += 1


def test_bigomega_exp_cap():
    with pytest.raises(ValueError):
        ml.bigomega_exp(2.0)
    ml.bigomega_exp(1.9)


# ---------------------------------------------------------------------------
# block minorant
# ---------------------------------------------------------------------------

def test_block_minorant_basic():
    bm = ml.block_minorant(ml.one(), 0.2, 0.05, 10**6)
    # pointwise bounds hold at every prime
    assert bm.s_values.min() >= 0.0
    assert bm.s_values.max() <= 0.5 + 1e-15
    # support misses [2, x^{eps2}]
    assert bm.z_sum((10**6) ** bm.eps2) == 0.0
    # mass ratio: s(p)/(2b) within the Mertens band on blocks above 100
    yk = bm.boundaries[:-1]
    ratios = bm.s_values / (2 * 0.2)
    block_of = np.searchsorted(bm.boundaries, bm.primes, side="left") - 1
    sel = yk[block_of] > 100
    assert ratios[sel].min() >= 0.8
    assert ratios[sel].max() <= 1.25
    # raw block masses settle near 1 once blocks hold a few dozen primes
    raw = bm.block_masses[yk > 150]
    assert raw.min() >= 0.8 and raw.max() <= 1.25


def test_block_minorant_z_band():
    # wide-block regime where the support starts well above the first primes
    b = 0.2
    bm = ml.block_minorant(ml.one(), b, 0.5, 10**6)
    assert bm.violated_blocks == ()
    target = 2 * b * math.log(1.0 / bm.eps2)
    for z in np.geomspace(1000.0, 10**6, 33):
        assert abs(bm.z_sum(z) - target) <= 3 * (2 * b)


def test_block_minorant_empty_range():
    with pytest.raises(PreconditionError):
        ml.block_minorant(ml.one(), 0.2, 0.5, 4)


def test_squarefree_split_z_additivity():
    r = ml.one()
    bm = ml.block_minorant(r, 0.2, 0.05, 10**6)
    s1, t1 = ml.squarefree_split(r, bm)
    assert s1.value(2, 2) == 0.0  # squarefree support
    for z in np.geomspace(10.0, 10**6, 17):
        z = int(z)
        lhs = ml.prime_sum_Z(z, s1) + ml.prime_sum_Z(z, t1)
        rhs = ml.prime_sum_Z(z, r)
        assert abs(lhs - rhs) < 1e-12


# ---------------------------------------------------------------------------
# structural equality / canonical form
# ---------------------------------------------------------------------------

def test_spec_equality_structural():
    assert ml.divisor(0.5) == ml.divisor(0.5)
    assert ml.divisor(0.5) != ml.divisor(0.7)
    assert ml.twist(ml.one(), 1.0) == ml.twist(ml.one(), 1.0)


def test_expr_not_expressible():
    with pytest.raises(MeanlabError):
        ml.exp_extension({2: 1.0}).expr()
