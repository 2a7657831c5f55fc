import math
import random

import pytest
import mpmath as mp
from fractions import Fraction

from mtverify.core.cyclotomic import (
    CyclotomicNumber,
    apply_group_ring,
    apply_matrix,
    equals_in_field,
    eval_operator,
    operator_matrix,
    trace,
    zeta,
)
from mtverify.core.groupring import AbelianFieldSpec, GroupRingElement
from mtverify.errors import NotASubfield


def test_ring_arithmetic():
    one = zeta(5, 0)
    assert zeta(5) * zeta(5, 4) == one
    product = one
    for _ in range(5):
        product = product * zeta(5)
    assert product == one
    assert (zeta(5) * 3 - zeta(5)).coeffs[1] == 2
    with pytest.raises(ValueError, match="levels differ"):
        zeta(5) + zeta(7)
    with pytest.raises(ValueError):
        CyclotomicNumber(0)


def test_field_equality():
    assert CyclotomicNumber(5, [1, 1, 1, 1, 1]).reduce_primitive() == []
    assert equals_in_field(zeta(3), zeta(6, 2))
    assert equals_in_field(zeta(4) * zeta(4), zeta(4, 0) * -1)
    assert not equals_in_field(zeta(4), zeta(4, 3))


def test_galois_embed_specialize():
    assert zeta(7).galois(3) == zeta(7, 3)
    assert zeta(3).embed(6) == zeta(6, 2)
    with pytest.raises(ValueError):
        zeta(3).embed(4)
    assert zeta(12).specialize(4) == zeta(4)
    assert zeta(12, 5).specialize(4, 8) == zeta(8, 2)
    with pytest.raises(ValueError):
        zeta(12).specialize(5)


def test_numeric_value():
    assert abs(zeta(4).numeric() - mp.mpc(0, 1)) < 1e-12
    assert CyclotomicNumber(6, [Fraction(1, 2)]).coefficient_sum() == Fraction(1, 2)


def test_trace():
    assert equals_in_field(trace(zeta(5), 1), zeta(5, 0) * -1)
    assert trace(zeta(7), 7) == zeta(7)
    # Q(sqrt 5) inside Q(zeta_5): trace of zeta is zeta + zeta^4
    real_subfield = AbelianFieldSpec(5, (4,))
    assert trace(zeta(5), real_subfield) == zeta(5) + zeta(5, 4)
    with pytest.raises(NotASubfield):
        trace(zeta(5), 7)


def test_group_ring_action():
    spec = AbelianFieldSpec(5)
    g = GroupRingElement.sigma(spec, 2) + GroupRingElement.sigma(spec, 3)
    assert apply_group_ring(g, zeta(5)) == zeta(5, 2) + zeta(5, 3)
    with pytest.raises(ValueError, match="H must be trivial"):
        apply_group_ring(GroupRingElement.one(AbelianFieldSpec(5, (4,))), zeta(5))


def test_operator_matrix_matches_direct_evaluation():
    poly = [1, -2, 3]
    x = CyclotomicNumber(7, [1, 2, 0, 5])
    assert apply_matrix(operator_matrix(poly, 3, 7), x) == eval_operator(poly, 3, x)
    with pytest.raises(ValueError, match="does not act"):
        apply_matrix(operator_matrix(poly, 3, 5), x)


def _random_number(rng, level):
    return CyclotomicNumber(level, {i: Fraction(rng.randint(-5, 5), rng.randint(1, 4))
                                    for i in range(level) if rng.random() < 0.4})


@pytest.mark.slow
def test_exact_arithmetic_matches_complex_embedding():
    rng = random.Random(60)
    tolerance = mp.mpf(10) ** -10
    with mp.workdps(30):
        for _ in range(100):
            level = rng.randint(1, 60)
            x, y = _random_number(rng, level), _random_number(rng, level)
            a = rng.choice([u for u in range(1, level + 1) if math.gcd(u, level) == 1])
            root = mp.expjpi(mp.mpf(2 * a) / level)
            assert abs((x + y).numeric() - (x.numeric() + y.numeric())) < tolerance
            assert abs((x * y).numeric() - x.numeric() * y.numeric()) < tolerance
            value = sum((mp.mpf(c.numerator) / c.denominator * root ** i for i, c in enumerate(x.coeffs)), mp.mpc(0))
            assert abs(x.galois(a).numeric() - value) < tolerance
            remainder = x.reduce_primitive()
            reduced = sum((mp.mpf(c.numerator) / c.denominator * mp.expjpi(mp.mpf(2 * i) / level)
                           for i, c in enumerate(remainder)), mp.mpc(0))
            assert abs(reduced - x.numeric()) < tolerance
