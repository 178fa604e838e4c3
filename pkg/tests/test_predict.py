import cmath
import math

import numpy as np
import pytest

import meanlab as ml
from meanlab.errors import EvaluationError, PreconditionError


def quiet_params(**kw):
    kw.setdefault("eps", 0.3)
    return ml.Params(**kw)


def test_local_factor_examples():
    assert ml.local_factor(ml.one(), 2, 10) == pytest.approx(1.875)
    # p = x prime: only nu <= 1
    assert ml.local_factor(ml.one(), 7, 7) == pytest.approx(1 + 1 / 7)
    alt = ml.MultSpec(rule=lambda p, nu: (-1.0) ** nu)
    assert ml.local_factor(alt, 2, 4) == pytest.approx(0.75)
    with pytest.raises(PreconditionError):
        ml.local_factor(ml.one(), 11, 10)


def test_euler_product_examples():
    assert ml.euler_product(ml.one(), 10) == pytest.approx(
        1.875 * (13 / 9) * 1.2 * (8 / 7))
    assert ml.euler_product(ml.squarefree(), 10) == pytest.approx(
        1.5 * (4 / 3) * 1.2 * (8 / 7))
    assert ml.euler_product(ml.one(), 1) == 1.0


def test_euler_product_log_space_matches_direct():
    for spec in (ml.one(), ml.squarefree(), ml.twist(ml.squarefree(), 0.5)):
        x = 10**4
        direct = complex(1.0)
        for p in ml.build_primes(x).primes:
            direct *= ml.local_factor(spec, int(p), x)
        assert ml.euler_product(spec, x) == pytest.approx(direct, rel=1e-10)


def test_euler_product_vanishing_factor():
    # f(2) = -2 makes the factor at p = 2 vanish: 1 + (-2)/2 = 0
    bad = ml.MultSpec(rule=lambda p, nu: -2.0 if (p == 2 and nu == 1) else 0.0)
    with pytest.raises(EvaluationError, match="p=2"):
        ml.euler_product(bad, 3)


def test_min_local_factor():
    assert ml.min_local_factor(ml.one(), 100) >= 1.0
    alt = ml.MultSpec(rule=lambda p, nu: (-1.0) ** nu)
    assert ml.min_local_factor(alt, 4) == pytest.approx(2 / 3)
    assert ml.min_local_factor(ml.squarefree(), 10) == pytest.approx(8 / 7)
    assert ml.min_local_factor(ml.one(), 1) == math.inf


def test_predict_1_6_small_x():
    p = ml.predict_1_6(ml.one(), quiet_params(rho=1.0), 10)
    expected = math.exp(-0.5772156649015329) * 10 / math.log(10) \
        * (1.875 * (13 / 9) * 1.2 * (8 / 7))
    assert p.main_term == pytest.approx(expected)
    assert p.main_term.real == pytest.approx(9.057, abs=2e-3)
    assert p.error_budget > 0


def test_predict_1_6_mertens_accuracy():
    x = 10**5
    p = ml.predict_1_6(ml.one(), quiet_params(rho=1.0), x)
    observed = ml.summatory(ml.eval_mult(ml.one(), x), x)
    assert ml.compare(observed, p).rel_err < 0.05


def test_gamma_value_used_internally():
    assert math.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_predict_1_13_examples():
    # f = r collapses to M(x; r) exactly
    p = ml.predict_1_13(ml.one(), ml.one(), 1000, quiet_params(), check=False)
    assert p.main_term == complex(1000.0)
    # squarefree against one at x = 10
    p2 = ml.predict_1_13(ml.squarefree(), ml.one(), 10, quiet_params(),
                         check=False)
    assert p2.main_term.real == pytest.approx(10 * (2.742857 / 3.714286),
                                              abs=1e-4)
    comp = ml.compare(7.0, p2)
    assert comp.rel_err == pytest.approx(0.0549, abs=1e-3)


def test_predict_1_13_density():
    x = 10**5
    p = ml.predict_1_13(ml.squarefree(), ml.one(), x, quiet_params(),
                        check=False)
    observed = ml.summatory(ml.eval_mult(ml.squarefree(), x), x)
    assert ml.compare(observed, p).rel_err < 0.01


def test_local_ratio_modulus_bounded_by_one():
    # 0 <= f <= r at prime powers forces each local-factor ratio inside the
    # unit disc
    f = ml.squarefree()
    r = ml.one()
    x = 10**4
    for p in ml.build_primes(x).primes[:200]:
        num = ml.local_factor(f, int(p), x)
        den = ml.local_factor(r, int(p), x)
        assert abs(num / den) <= 1.0 + 1e-12


def test_predict_2_3_tau_zero_reduction():
    a = ml.predict_1_13(ml.squarefree(), ml.one(), 1000, quiet_params(),
                        check=False)
    b = ml.predict_2_3(ml.squarefree(), ml.one(), 0.0, 1000, quiet_params(),
                       check=False)
    assert a.main_term == b.main_term  # bit-for-bit


def test_predict_2_3_telescoping():
    # f(n) = n^{i tau}: the local-factor ratio telescopes to 1
    f = ml.twist(ml.one(), -1.0)
    p = ml.predict_2_3(f, ml.one(), 1.0, 10**4, quiet_params(), check=False)
    assert p.extras["ratio"] == pytest.approx(1.0, abs=1e-12)
    observed = ml.summatory(ml.eval_mult(f, 10**4), 10**4)
    oracle = np.sum(np.exp(1j * np.log(np.arange(1, 10**4 + 1))))
    assert observed == pytest.approx(oracle, rel=1e-9)
    comp = ml.compare(observed, p)
    assert comp.rel_err < 0.01
    phase = abs(cmath.phase(complex(observed) / p.main_term))
    assert phase < 0.02


def test_predict_2_3_conjugation_symmetry():
    f = ml.omega_exp(0.8)
    a = ml.predict_2_3(f, ml.one(), 0.5, 10**3, quiet_params(), check=False)
    b = ml.predict_2_3(f, ml.one(), -0.5, 10**3, quiet_params(), check=False)
    assert abs(a.main_term) == pytest.approx(abs(b.main_term), rel=1e-12)


def test_predict_4_5_examples():
    # D = 1: empty sifting product
    p = ml.predict_4_5(ml.one(), 1, quiet_params(), 100, check=False)
    assert p.main_term == complex(100.0)
    assert p.extras["W"] == 1.0
    # D = 6 at x = 30
    p2 = ml.predict_4_5(ml.one(), 6, quiet_params(), 30, check=False)
    assert p2.extras["W"] == pytest.approx(3.0)
    assert p2.main_term.real == pytest.approx(10.0)
    observed = ml.summatory(
        ml.eval_mult(ml.restrict_coprime(ml.one(), 6), 30), 30)
    assert observed == 10.0


def test_predict_4_5_w_equals_euler_factors():
    # W for the constant-one weight is prod_{p|D} (1 - 1/p)^{-1}
    D = 30030
    p = ml.predict_4_5(ml.one(), D, quiet_params(), 10**5, check=False)
    expected = 1.0
    for q in (2, 3, 5, 7, 11, 13):
        expected *= 1.0 / (1.0 - 1.0 / q)
    assert p.extras["W"].real == pytest.approx(expected, rel=1e-12)


def test_predict_4_5_pplus_precondition():
    with pytest.raises(PreconditionError):
        ml.predict_4_5(ml.one(), 101, quiet_params(), 100, check=False)


def test_predict_4_5_chi_and_budgets():
    p = ml.predict_4_5(ml.one(), 30030, quiet_params(b=0.2, A=1.0), 10**5,
                       check=False)
    assert p.extras["chi"] in (0, 1)
    assert p.extras["exponent_4_5"] > p.extras["exponent_elliott"]
    assert p.error_budget > 0
    assert p.extras["elliott_budget"] > 0


def test_lemma_2_2_ratio_positive_band():
    rat = ml.lemma_2_2_ratio(ml.one(), ml.Params(eps=0.04), 10**5, check=False)
    vals = [v for _, v in rat]
    assert min(vals) > 0
    assert max(vals) / min(vals) < 1.5
    with pytest.raises(PreconditionError):
        ml.lemma_2_2_ratio(ml.one(), ml.Params(eps=0.5), 10**4, check=False)


def test_compare():
    p = ml.Prediction("T1_13", complex(7.385), 1.0, 10)
    c = ml.compare(7.385, p)
    assert c.rel_err == 0.0
    c2 = ml.compare(7.0, ml.Prediction("T1_13", complex(7.385), 1.0, 10))
    assert c2.rel_err == pytest.approx(0.055, abs=1e-3)
    c3 = ml.compare(0.0, ml.Prediction("T1_13", complex(1.0), 1.0, 10))
    assert c3.rel_err == math.inf
    assert c3.abs_err == 1.0


def test_local_sum_w_divergence():
    growing = ml.MultSpec(rule=lambda p, nu: float(3**nu))
    with pytest.raises(EvaluationError):
        ml.local_sum_W(growing, 2)


def test_hypothesis_warnings_emitted():
    # a spec far from its majorant at eps = 0.45 trips the explicit budget
    f0 = ml.omega_exp(0.0)
    with pytest.warns(UserWarning, match="C1_3"):
        ml.predict_1_13(f0, ml.one(), 10**4, ml.Params(eps=0.45))
