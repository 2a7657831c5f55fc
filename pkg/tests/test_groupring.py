import random

import pytest
from fractions import Fraction

from mtverify.core.groupring import (
    ZZ_RING,
    AbelianFieldSpec,
    GroupRingElement,
    brute_force_is_unit,
    is_unit,
    norm_element,
    norm_lift,
    padic_ring,
    tilde_sigma,
)
from mtverify.errors import NotASubfield


@pytest.fixture
def spec5():
    return AbelianFieldSpec(5)


def test_full_cyclotomic_spec(spec5):
    assert spec5.elements == (1, 2, 3, 4)
    assert spec5.order == 4
    assert spec5.is_full
    assert str(spec5) == "m=5;H="


def test_parse_subfield():
    spec = AbelianFieldSpec.parse("m=13;H=3")
    assert spec.subgroup == frozenset({1, 3, 9})
    assert spec.order == 4
    assert spec == AbelianFieldSpec(13, (9,))
    assert AbelianFieldSpec.parse(str(spec)) == spec


@pytest.mark.parametrize("text", ["13", "m=x", "H=3"])
def test_parse_errors(text):
    with pytest.raises(ValueError, match="Invalid field spec"):
        AbelianFieldSpec.parse(text)


def test_non_unit_generator():
    with pytest.raises(ValueError, match="not a unit"):
        AbelianFieldSpec(10, (5,))


def test_subfields_and_conductor():
    assert AbelianFieldSpec(15).contains(AbelianFieldSpec(5))
    assert not AbelianFieldSpec(5).contains(AbelianFieldSpec(7))
    assert AbelianFieldSpec(10).conductor() == 5
    assert not AbelianFieldSpec(10).is_primitive()
    assert AbelianFieldSpec(4, (3,)).conductor() == 1
    assert AbelianFieldSpec(12).is_primitive()


def test_tilde_sigma_residue():
    spec10 = AbelianFieldSpec(10)
    # acts as sigma_2 modulo 5 and trivially modulo 2
    assert spec10.tilde_sigma_residue(2) == 7
    assert AbelianFieldSpec(5).tilde_sigma_residue(5) == 1
    with pytest.raises(ValueError):
        spec10.tilde_sigma_residue(0)


def test_local_groups():
    spec15 = AbelianFieldSpec(15)
    assert spec15.inertia_group(5) == frozenset({1, 4, 7, 13})
    assert len(spec15.decomposition_group(5)) == 8
    spec5 = AbelianFieldSpec(5)
    assert spec5.decomposition_group(11) == frozenset({1})
    assert spec5.decomposition_group(2) == frozenset(spec5.elements)


def test_arithmetic(spec5):
    s2 = GroupRingElement.sigma(spec5, 2)
    one = GroupRingElement.one(spec5)
    assert s2 ** 4 == one
    assert s2 * GroupRingElement.sigma(spec5, 3) == one
    assert (s2 + 2).coefficient(1) == 2
    assert (s2 + 2).augmentation() == 3
    assert (1 - s2).augmentation() == 0
    assert s2.sharp() == GroupRingElement.sigma(spec5, 3)
    assert GroupRingElement.sigma(spec5, 7) == s2


def test_inverse(spec5):
    x = GroupRingElement.sigma(spec5, 2) + 2
    assert x * x.inverse() == GroupRingElement.one(spec5)
    assert x ** -1 == x.inverse()


def test_coefficient_rings(spec5):
    with pytest.raises(ValueError, match="not an integer"):
        GroupRingElement(spec5, {1: Fraction(1, 2)}, ZZ_RING)
    x = GroupRingElement(spec5, {1: Fraction(1, 5)}, padic_ring(7, 2))
    assert x.coefficient(1) * 5 % 49 == 1
    with pytest.raises(ValueError, match="different coefficient rings"):
        x + GroupRingElement.one(spec5)


def test_projection_and_norm_lift(spec5):
    base = AbelianFieldSpec(1)
    s2 = GroupRingElement.sigma(spec5, 2)
    assert s2.project(base) == GroupRingElement.one(base)
    lifted = norm_lift(GroupRingElement.one(base), spec5)
    assert lifted == norm_element(spec5, spec5.elements)
    assert lifted.project(base) == GroupRingElement.one(base) * 4
    with pytest.raises(NotASubfield):
        s2.project(AbelianFieldSpec(7))


def test_unit_criterion_matches_determinant(spec5):
    s2 = GroupRingElement.sigma(spec5, 2)
    s4 = GroupRingElement.sigma(spec5, 4)
    candidates = [
        GroupRingElement.one(spec5) * 5,
        1 - s2,
        1 + s4,
        s2 * 3 + 1,
        tilde_sigma(11, spec5) * 2 - s4,
    ]
    for p in (3, 7, 11):
        for x in candidates:
            assert is_unit(x, p) == brute_force_is_unit(x, p)
    assert is_unit(GroupRingElement.one(spec5) * 5, 7)
    assert not is_unit(1 - s2, 7)
    assert not is_unit(1 + s4, 5)
    assert not is_unit(GroupRingElement.one(spec5) * Fraction(1, 7), 7)
    with pytest.raises(ValueError, match="needs a prime"):
        is_unit(s2)


@pytest.mark.slow
def test_unit_criterion_on_random_elements():
    rng = random.Random(11)
    specs = [AbelianFieldSpec(m) for m in (5, 7, 8, 9, 12, 13, 21)] + [AbelianFieldSpec.parse("m=13;H=3")]
    rings = [(p, k) for p in (2, 3, 5, 7) for k in (1, 2, 3)]
    for _ in range(200):
        spec = rng.choice(specs)
        p, k = rng.choice(rings)
        coeffs = {a: rng.randint(-4, 4) for a in spec.elements if rng.random() < 0.6}
        x = GroupRingElement(spec, coeffs, padic_ring(p, k))
        assert is_unit(x) == brute_force_is_unit(x), (spec, p, k, coeffs)
