import random

import pytest
from fractions import Fraction

from mtverify.core.arith import valuation
from mtverify.core.formalgroup import (
    PadicSeries,
    apply_honda_exact,
    exp_coefficients,
    formal_exp,
    formal_log,
    frobenius_congruence,
    g_and_h_check,
    g_series,
    h_series,
    honda_polynomial,
    honda_type_check,
    invariant_differential,
    log_coefficients,
    multiplicative_comparison,
    padic_binomial,
    padic_binomials,
    twisted_working_precision,
)
from mtverify.core.padic import Padic
from mtverify.core.report import Verdict
from mtverify.errors import HypothesisViolated, PrecisionUnsupported


def test_series_frobenius_and_derivative():
    series = PadicSeries.from_rationals(5, [0, 1, 2] + [0] * 8, 4)
    assert series.degree == 10
    assert series.frobenius().lift() == [0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 2]
    assert series.derivative().lift()[:3] == [1, 4, 0]


def test_series_compose_needs_zero_constant_term():
    outer = PadicSeries.from_rationals(5, [0, 1, 1], 4)
    with pytest.raises(ValueError, match="without constant term"):
        outer.compose(PadicSeries.from_rationals(5, [1, 1, 0], 4))


def test_series_compose():
    # (X + X^2) o (X + X^2) = X + 2X^2 + 2X^3 + X^4
    inner = PadicSeries.from_rationals(7, [0, 1, 1, 0, 0], 5)
    assert inner.compose(inner).lift() == [0, 1, 2, 2, 1]


def test_invariant_differential_low_terms(curve_11a1, curve_14a1):
    # 1 + a1 t + (a1^2 + a2) t^2 + ...
    assert invariant_differential(curve_11a1, 4)[:3] == (1, 0, -1)
    assert invariant_differential(curve_14a1, 4)[:3] == (1, 1, 1)


@pytest.mark.parametrize("fixture", ['curve_11a1', 'curve_14a1', 'curve_37a1'])
def test_differential_methods_agree(request, fixture):
    curve = request.getfixturevalue(fixture)
    assert invariant_differential(curve, 16, 'dx') == invariant_differential(curve, 16, 'dy')


def test_unknown_differential_method(curve_11a1):
    with pytest.raises(ValueError, match="Unsupported differential method"):
        invariant_differential(curve_11a1, 4, 'dz')


def test_log_and_exp_coefficients(curve_11a1, curve_14a1):
    log = log_coefficients(curve_11a1, 4)
    assert log[:4] == (0, 1, 0, Fraction(-1, 3))

    log = log_coefficients(curve_14a1, 4)
    exp = exp_coefficients(curve_14a1, 4)
    assert exp[1] == 1
    assert exp[2] == -log[2] == Fraction(-1, 2)
    assert exp[3] == 2 * log[2] ** 2 - log[3]


def test_exp_inverts_log(curve_11a1):
    log = formal_log(curve_11a1, 7, 6, 6)
    exp = formal_exp(curve_11a1, 7, 6, 6)
    identity = PadicSeries.monomial(7, 1, 6)
    composed = exp.compose(log)
    assert composed.precision >= 6
    assert composed.agrees(identity)


def test_formal_log_valuation(curve_11a1):
    assert formal_log(curve_11a1, 3, 6, 4)[3].val == -1
    with pytest.raises(ValueError, match="at least 2"):
        formal_log(curve_11a1, 3, 1, 4)


def test_formal_exp_budget(curve_14a1):
    with pytest.raises(PrecisionUnsupported, match="budget"):
        formal_exp(curve_14a1, 2, 4, 3, budget=0)


def test_honda_polynomial(curve_11a1):
    assert honda_polynomial(curve_11a1, 7) == [7, 2, 1]
    assert honda_polynomial(curve_11a1, 11) == [11, -1, 0]


def test_honda_image_detects_wrong_trace(curve_11a1):
    log = log_coefficients(curve_11a1, 10)
    right = apply_honda_exact([7, 2, 1], log, 7)
    wrong = apply_honda_exact([7, 0, 1], log, 7)
    assert right[7] == 0 or valuation(right[7], 7) >= 1
    assert wrong[7] != 0 and valuation(wrong[7], 7) == 0


@pytest.mark.parametrize("fixture,p", [
    ('curve_11a1', 5),
    ('curve_11a1', 7),
    ('curve_11a1', 11),
    ('curve_37a1', 5),
    ('curve_37a1', 7),
])
def test_honda_type(request, fixture, p):
    report = honda_type_check(request.getfixturevalue(fixture), p, 40, 3)
    assert report.verdict == Verdict.passed
    assert report.witnesses["failing_degrees"] == []


def test_honda_type_hypotheses(curve_11a1, curve_49a1):
    with pytest.raises(HypothesisViolated) as excinfo:
        honda_type_check(curve_11a1, 3, 10, 3)
    assert excinfo.value.clauses == ["p > 3"]
    with pytest.raises(HypothesisViolated, match="not additive"):
        honda_type_check(curve_49a1, 7, 10, 3)


def test_padic_binomials():
    values = padic_binomials(Padic.from_rational(7, 5, 10), 6)
    assert [v.lift() for v in values] == [1, 5, 10, 10, 5, 1, 0]
    minus_one = padic_binomials(Padic.from_rational(7, -1, 10), 4)
    for l, value in enumerate(minus_one):
        assert value.agrees(Padic.from_rational(7, (-1) ** l, 10))


def test_twisted_working_precision():
    assert twisted_working_precision(10, 3) == 39


def test_g_series_is_normalized(curve_11a1):
    g = g_series(curve_11a1, 7, 2, 6, 3)
    assert g[0].is_zero()
    assert (g[1] - 1).is_zero()


@pytest.mark.parametrize("s", [0, 2])
def test_g_and_h(curve_11a1, s):
    report = g_and_h_check(curve_11a1, 7, s, 12, 3)
    assert report.verdict == Verdict.passed
    assert report.witnesses["honda_failing_degrees"] == []
    assert report.witnesses["h_precision"] >= 3


@pytest.mark.parametrize("s", [1, 7])
def test_g_series_excludes_tau(curve_11a1, s):
    with pytest.raises(HypothesisViolated) as excinfo:
        g_series(curve_11a1, 7, s, 6, 3)
    assert excinfo.value.clauses == ["chi != tau"]


def test_g_series_small_prime(curve_11a1):
    with pytest.raises(HypothesisViolated, match="p > 3"):
        g_series(curve_11a1, 3, 0, 6, 3)


def test_multiplicative_comparison(curve_11a1):
    report = multiplicative_comparison(curve_11a1, 11, 15)
    assert report.verdict == Verdict.passed
    assert report.witnesses["non_integral_degrees"] == []


def test_multiplicative_needs_split_reduction(curve_11a1, curve_14a1):
    with pytest.raises(HypothesisViolated, match="split multiplicative"):
        multiplicative_comparison(curve_11a1, 7, 10)
    with pytest.raises(HypothesisViolated):
        multiplicative_comparison(curve_14a1, 2, 10)


@pytest.mark.parametrize("beta,p", [
    ([0, 1], 5),
    ([0, 0, Fraction(1, 2)], 3),
    ([0, 0, 0, Fraction(1, 3)], 3),
    ([0, 0, 0, 0, 0, Fraction(1, 5)], 5),
])
def test_frobenius_congruence(beta, p):
    assert frobenius_congruence(beta, p, 12)


def test_frobenius_congruence_on_the_logarithm(curve_11a1):
    assert frobenius_congruence(log_coefficients(curve_11a1, 20), 5, 20)


def test_frobenius_congruence_input_errors():
    with pytest.raises(ValueError, match="constant term"):
        frobenius_congruence([1, 1], 5, 10)
    with pytest.raises(ValueError, match="not 5-integral"):
        frobenius_congruence([0, Fraction(1, 5)], 5, 10)


def test_h_series_is_tangent_to_identity(curve_11a1):
    h = h_series(curve_11a1, 7, 2, 8, 3)
    assert h[0].is_zero()
    assert (h[1] - 1).is_zero()
    assert h.is_integral()


def test_padic_binomial_single_value():
    assert padic_binomial(Padic.from_rational(7, 5, 10), 2).lift() == 10


@pytest.mark.slow
def test_frobenius_is_multiplicative_on_monomials():
    rng = random.Random(3)
    for _ in range(40):
        p = rng.choice([5, 7, 11])
        a, b = rng.randint(0, 6), rng.randint(0, 6)
        degree = (a + b) * p + rng.randint(0, 3)
        x = PadicSeries.monomial(p, a, degree).scale(Fraction(rng.randint(1, 9), rng.randint(1, 9)))
        y = PadicSeries.monomial(p, b, degree).scale(rng.randint(-9, 9) or 1)
        assert (x * y).frobenius().lift() == (x.frobenius() * y.frobenius()).lift()


@pytest.mark.slow
@pytest.mark.parametrize("p,s,D,k", [(7, 2, 8, 2), (7, 4, 6, 3), (5, 2, 6, 2)])
def test_extra_digits_confirm_certified_digits(curve_11a1, p, s, D, k):
    def same_digits(x, y):
        return all(a.agrees(b, digits=k) for a, b in zip(x.coefficients, y.coefficients))

    assert same_digits(g_series(curve_11a1, p, s, D, k), g_series(curve_11a1, p, s, D, k + 4))
    assert same_digits(formal_exp(curve_11a1, p, D, k), formal_exp(curve_11a1, p, D, k + 4))
    assert g_and_h_check(curve_11a1, p, s, D, k).verdict == g_and_h_check(curve_11a1, p, s, D, k + 4).verdict
