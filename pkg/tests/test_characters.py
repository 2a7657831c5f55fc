import pytest
import mpmath as mp

from mtverify.core.arith import working_precision
from mtverify.core.characters import (
    character_values_mod_p,
    characters,
    divisors,
    field_with_roots,
    parse_character,
    primitive_characters,
    unit_group,
)


def test_unit_group_structure():
    assert unit_group(15).order == 8
    assert unit_group(8).orders == [2, 2]
    assert unit_group(1).elements() == [1]
    with pytest.raises(ValueError, match="not a unit"):
        unit_group(10).log(4)


def test_character_counts():
    assert len(characters(5)) == 4
    assert len(primitive_characters(5)) == 3
    assert len(primitive_characters(4)) == 1
    assert len(primitive_characters(12)) == 1
    assert len(characters(5, kernel=(4,))) == 2
    assert characters(5)[0].is_trivial()
    assert not any(chi.is_trivial() for chi in primitive_characters(5))


def test_parity_mod_5():
    parities = sorted(chi.parity for chi in characters(5))
    assert parities == [-1, -1, 1, 1]


def test_conjugate_and_conductor():
    for chi in characters(12):
        assert chi.conjugate().conjugate() == chi
        assert chi.conjugate().order == chi.order
        assert 12 % chi.conductor() == 0


def test_label_round_trip():
    chi = parse_character("5:1")
    assert chi.label() == "5:1"
    assert chi.order == 4
    with pytest.raises(ValueError, match="needs 1 exponents"):
        parse_character("5:1,2")
    with pytest.raises(ValueError, match="Invalid character"):
        parse_character("x:1")


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_gauss_sum_absolute_value():
    with working_precision(20):
        for chi in primitive_characters(5):
            g = chi.gauss_sum()
            assert abs(abs(g) ** 2 - 5) < mp.mpf(10) ** -15


def test_field_with_roots():
    field = field_with_roots(7, 5)
    assert field.size == 7 ** 4
    root = field.root_of_unity(5)
    assert root != field.one
    assert field.power(root, 5) == field.one
    with pytest.raises(ValueError):
        field_with_roots(5, 10)


def test_values_mod_p_are_multiplicative():
    field = field_with_roots(7, 10)
    root = field.root_of_unity(10)
    for chi in characters(11):
        evaluate = character_values_mod_p(chi, field, root, 10)
        assert evaluate(11) == field.zero
        for a in (2, 3, 7):
            for b in (5, 6):
                assert evaluate(a * b) == field.mul(evaluate(a), evaluate(b))
