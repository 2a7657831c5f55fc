import pytest
import mpmath as mp
from fractions import Fraction

from mtverify.core.arith import (
    canonical_residue,
    continued_fraction_denominators,
    crt_lift,
    format_rational,
    mod_rational,
    parse_rational,
    prime_power_part,
    radical,
    reconstruct_rational,
    to_fraction,
    valuation,
    working_precision,
)
from mtverify.core.linalg import det_zz, inverse_qq, matmul_qq, nullspace_qq, identity, rank_qq, solve_qq
from mtverify.errors import SingularOperator


def test_valuation():
    assert valuation(-161051, 11) == 5
    assert valuation(Fraction(3, 49), 7) == -2
    assert valuation(10, 3) == 0
    with pytest.raises(ValueError):
        valuation(0, 5)


def test_canonical_residue():
    assert canonical_residue(0, 5) == 5
    assert canonical_residue(-3, 5) == 2
    assert canonical_residue(17, 1) == 1


def test_prime_power_part_and_radical():
    assert prime_power_part(2 * 9 * 5, [3]) == 9
    assert prime_power_part(2 * 9 * 5, [3, 5]) == 45
    assert prime_power_part(7, []) == 1
    assert radical(72) == 6


def test_crt_lift():
    x = crt_lift(2, 7, 3, 11)
    assert x % 7 == 2 and x % 11 == 3
    assert crt_lift(4, 1, 3, 5) == 3
    assert crt_lift(4, 9, 3, 1) == 4


def test_mod_rational():
    assert mod_rational(Fraction(1, 5), 49, 7) * 5 % 49 == 1
    with pytest.raises(ValueError, match="not 7-integral"):
        mod_rational(Fraction(1, 7), 49, 7)


def test_rational_text_round_trip():
    assert format_rational(Fraction(-2, 5)) == "-2/5"
    assert format_rational(3) == "3/1"
    assert parse_rational(" -2/5 ") == Fraction(-2, 5)


def test_to_fraction_exact():
    assert to_fraction(mp.mpf(0.5)) == Fraction(1, 2)
    assert to_fraction(7) == Fraction(7)
    with pytest.raises(ValueError):
        to_fraction(mp.inf)


def test_reconstruct_rational():
    with working_precision(30):
        x = mp.mpf(1) / 5 + mp.mpf(10) ** -25
        assert reconstruct_rational(x, 100, mp.mpf(10) ** -20) == Fraction(1, 5)
        assert reconstruct_rational(mp.pi, 100, mp.mpf(10) ** -20) is None


def test_continued_fraction_convergents():
    numerators, denominators = continued_fraction_denominators(7, 3)
    assert numerators == [2, 7]
    assert denominators == [1, 3]
    assert continued_fraction_denominators(5, 1) == ([5], [1])


def test_exact_linear_algebra():
    rows = [[1, 2], [3, 4]]
    inverse = inverse_qq(rows)
    assert matmul_qq(rows, inverse) == identity(2)
    assert solve_qq(rows, [5, 6]) == [Fraction(-4), Fraction(9, 2)]
    assert det_zz(rows) == -2
    assert rank_qq([[1, 2], [2, 4]]) == 1
    with pytest.raises(SingularOperator):
        inverse_qq([[1, 2], [2, 4]])


def test_nullspace_vectors_are_in_kernel():
    rows = [[1, 1, 0], [0, 1, 1]]
    kernel = nullspace_qq(rows)
    assert len(kernel) == 1
    for vector in kernel:
        assert any(vector)
        assert all(sum(Fraction(a) * b for a, b in zip(row, vector)) == 0 for row in rows)
