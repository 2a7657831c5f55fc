import pytest
from fractions import Fraction

from mtverify.core.padic import Padic, teichmuller


def test_from_rational():
    x = Padic.from_rational(7, 14, 3)
    assert (x.val, x.unit, x.prec) == (1, 2, 3)

    y = Padic.from_rational(5, Fraction(1, 5), 4)
    assert (y.val, y.unit, y.prec) == (-1, 1, 4)
    assert y.lift() == Fraction(1, 5)
    assert y.relative_precision == 5


def test_from_rational_beyond_precision_is_zero():
    assert Padic.from_rational(5, 625, 3).is_zero()
    assert Padic.from_rational(5, 0, 3).is_zero()
    assert Padic(5, 0, 10, 3).is_zero()


def test_addition_tracks_valuation():
    total = Padic.from_rational(5, 3, 4) + Padic.from_rational(5, 2, 4)
    assert (total.val, total.unit, total.prec) == (1, 1, 4)
    assert (Padic.from_rational(5, 1, 4) - 1).is_zero()


def test_cancellation_loses_relative_precision():
    difference = Padic.from_rational(5, 126, 4) - Padic.from_rational(5, 1, 4)
    assert difference.val == 3
    assert difference.relative_precision == 1
    inverse = difference.inverse()
    assert inverse.val == -3
    assert inverse.prec == -2


def test_multiplication_precision():
    five = Padic.from_rational(5, 5, 4)
    square = five * five
    assert (square.val, square.unit, square.prec) == (2, 1, 5)
    assert (Padic.from_rational(5, 2, 4) * 3).residue(4) == 6


def test_inverse_and_division():
    two = Padic.from_rational(7, 2, 5)
    assert two.inverse().residue(5) == 8404
    assert (two * two.inverse()).agrees(Padic.from_rational(7, 1, 5))
    assert (1 / two).residue(5) == 8404
    assert Padic.from_rational(2, Fraction(1, 3), 4).residue(4) == 11


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        Padic.zero(5, 4).inverse()


def test_powers():
    two = Padic.from_rational(3, 2, 5)
    assert (two ** 2).residue(5) == 4
    assert (two ** 0).residue(5) == 1
    assert (two ** -1).agrees(two.inverse())


def test_residue_errors():
    with pytest.raises(ValueError, match="digits requested"):
        Padic.from_rational(5, 2, 3).residue(4)
    with pytest.raises(ValueError, match="not integral"):
        Padic.from_rational(5, Fraction(1, 5), 4).residue(2)


def test_agrees_on_certified_digits():
    coarse = Padic.from_rational(5, 1, 3)
    fine = Padic.from_rational(5, 126, 6)
    assert coarse.agrees(fine)
    assert not Padic.from_rational(5, 1, 6).agrees(fine)
    assert Padic.from_rational(5, 1, 6).agrees(fine, digits=3)
    assert not coarse.agrees(Padic.from_rational(5, 2, 6))


def test_mixed_primes():
    with pytest.raises(ValueError, match="different primes"):
        Padic.from_rational(5, 1, 3) + Padic.from_rational(7, 1, 3)


def test_equality_and_repr():
    assert Padic.from_rational(5, 3, 4) == Padic(5, 0, 3, 4)
    assert Padic.from_rational(5, 3, 4) != Padic(5, 0, 3, 5)
    assert repr(Padic.zero(5, 4)) == "O(5^4)"
    assert repr(Padic.from_rational(5, 10, 4)) == "5^1*2 + O(5^4)"


@pytest.mark.parametrize("j,p,k", [(2, 5, 3), (3, 7, 6), (10, 11, 4), (1, 13, 2)])
def test_teichmuller_is_a_root_of_unity(j, p, k):
    tau = teichmuller(j, p, k)
    residue = tau.residue(k)
    assert residue % p == j % p
    assert pow(residue, p - 1, p ** k) == 1


def test_teichmuller_value():
    assert teichmuller(2, 5, 3).residue(3) == 57
    assert teichmuller(1, 7, 5).residue(5) == 1


def test_teichmuller_needs_a_unit():
    with pytest.raises(ValueError, match="needs a unit"):
        teichmuller(5, 5, 3)


def test_exact_zero_times_scalar():
    zero = Padic.exact_zero(7)
    for scalar in (3, Fraction(1, 7), 49):
        product = zero * scalar
        assert product.is_zero()
        assert product.is_exact()
    assert (3 * zero).is_exact()
    assert (zero + 0) is zero


def test_exact_zero_against_finite_values():
    zero = Padic.exact_zero(5)
    x = Padic.from_rational(5, 3, 4)
    assert (zero + x) == x
    assert (zero * x).is_exact()
    with pytest.raises(ValueError, match="without a precision"):
        zero + 3


def test_finite_zero_times_scalar_keeps_precision():
    product = Padic.zero(5, 4) * 25
    assert product.is_zero()
    assert product.prec == 6
    assert (Padic.zero(5, 4) * Fraction(1, 5)).prec == 3
