import random

import pytest
import yaml
from fractions import Fraction
from unittest.mock import patch

from sympy import primerange

from mtverify.core.curve import (
    CurveData,
    ReductionKind,
    an_list,
    classify_reduction,
    compute_ap,
    count_points,
    count_points_character_sum,
    curve_from_dict,
    inverse_j_from_j_series,
    inverse_j_series,
    j_series,
    load_curve,
    local_data,
    nonsingular_point_count,
    root_number,
    tate_period,
    torsion_order,
)
from mtverify.errors import ConfigInvalid, InconsistentInvariant, NotMinimal, PrecisionUnsupported


def test_invariants_11a1(curve_11a1):
    assert curve_11a1.discriminant == -161051
    assert curve_11a1.c4 == 496
    assert curve_11a1.j_invariant == Fraction(-122023936, 161051)
    assert curve_11a1.is_semistable


def test_frobenius_traces_11a1(curve_11a1):
    assert [compute_ap(curve_11a1, q) for q in (2, 3, 5, 7, 11, 13)] == [-2, -1, 1, -2, 1, 4]


def test_frobenius_traces_37a1(curve_37a1):
    assert [compute_ap(curve_37a1, q) for q in (2, 3, 5, 7)] == [-2, -3, -2, -1]


def test_point_count_oracles_agree(curve_11a1, curve_37a1):
    for curve in (curve_11a1, curve_37a1):
        for q in (3, 5, 7, 13, 17, 19, 23):
            assert count_points(curve, q) == count_points_character_sum(curve, q)


def test_an_list_11a1(curve_11a1):
    a = an_list(curve_11a1, 13)
    assert list(a[1:]) == [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4]
    assert a[0] == 0


def test_reduction_types(curve_11a1, curve_37a1, curve_49a1):
    info = classify_reduction(curve_11a1, 11)
    assert info.kind == ReductionKind.split_multiplicative
    assert info.tamagawa == 5
    assert info.is_multiplicative

    info = classify_reduction(curve_37a1, 37)
    assert info.kind == ReductionKind.nonsplit_multiplicative
    assert info.a_ell == -1
    assert info.tamagawa == 1

    assert classify_reduction(curve_49a1, 7).kind == ReductionKind.additive
    assert classify_reduction(curve_11a1, 7).kind == ReductionKind.good


def test_override_at_two(curve_14a1):
    info = classify_reduction(curve_14a1, 2)
    assert info.kind == ReductionKind.nonsplit_multiplicative
    assert info.tamagawa == 2
    assert compute_ap(curve_14a1, 2) == -1
    assert classify_reduction(curve_14a1, 7).kind == ReductionKind.split_multiplicative
    assert [info.prime for info in local_data(curve_14a1)] == [2, 7]


@pytest.mark.parametrize("fixture,ell", [('curve_11a1', 11), ('curve_37a1', 37), ('curve_14a1', 7)])
def test_multiplicative_sign_from_nonsingular_points(request, fixture, ell):
    curve = request.getfixturevalue(fixture)
    info = classify_reduction(curve, ell)
    assert nonsingular_point_count(curve, ell) == ell - info.a_ell
    assert (info.a_ell == 1) == (info.kind == ReductionKind.split_multiplicative)


def test_bad_small_prime_needs_override(curve_14a1):
    bare = CurveData('14a1', curve_14a1.a_invariants, 14)
    with pytest.raises(PrecisionUnsupported, match="override"):
        compute_ap(bare, 2)


def test_not_minimal():
    # y^2 = x^3 - 625 x: ord_5(c4) = 4, ord_5(Delta) = 12
    curve = CurveData('scaled', (0, 0, 0, -625, 0), 10)
    with pytest.raises(NotMinimal):
        classify_reduction(curve, 5)


def test_conductor_mismatch():
    with pytest.raises(ConfigInvalid, match="does not divide the discriminant"):
        CurveData('bad', (0, -1, 1, -10, -20), 13)


def test_root_numbers(curve_11a1, curve_14a1, curve_37a1, curve_49a1):
    assert root_number(curve_11a1) == 1
    assert root_number(curve_14a1) == 1
    assert root_number(curve_37a1) == -1
    assert root_number(curve_49a1) is None


def test_torsion(curve_11a1, curve_14a1, curve_37a1):
    assert torsion_order(curve_11a1) == 5
    assert torsion_order(curve_14a1) == 6
    assert torsion_order(curve_37a1) == 1


def test_torsion_contradicting_reductions(curve_11a1):
    # 7 points mod every good prime leaves no room for 5-torsion
    with patch('mtverify.core.curve.count_points', return_value=7):
        with pytest.raises(InconsistentInvariant, match="does not divide"):
            torsion_order(curve_11a1)


def test_j_series_head():
    assert j_series(4) == (1, 744, 196884, 21493760)


def test_inverse_j_from_cached_series():
    assert inverse_j_from_j_series(j_series(10), 8) == inverse_j_series(8)


def test_tate_period_11a1(curve_11a1):
    period = tate_period(curve_11a1, 11, 6)
    assert period.valuation == 5
    assert period.unit % 11 != 0
    coarse = tate_period(curve_11a1, 11, 3)
    # Raising the precision never changes certified digits
    assert coarse.unit == period.unit % 11 ** 3


def test_tate_period_precision(curve_11a1):
    period = tate_period(curve_11a1, 11, 2)
    assert period.unit_mod(1) == period.unit % 11
    with pytest.raises(PrecisionUnsupported):
        period.unit_mod(3)
    with pytest.raises(PrecisionUnsupported, match="budget"):
        tate_period(curve_11a1, 11, 40, max_terms=4)


def test_tate_period_perturbed(curve_11a1):
    period = tate_period(curve_11a1, 11, 4)
    perturbed = period.perturbed(2)
    assert perturbed.valuation == period.valuation
    assert perturbed.unit == 2 * period.unit % 11 ** 4


def test_tate_period_needs_split_prime(curve_11a1):
    with pytest.raises(ValueError, match="split multiplicative"):
        tate_period(curve_11a1, 7, 4)


def test_load_curve(tmp_path):
    path = tmp_path / 'curve.yaml'
    with open(path, 'w') as f:
        yaml.dump({'label': '14a1', 'a': [1, 0, 1, 4, -6], 'N': 14,
                   'overrides': [{'ell': 2, 'kind': 'nonsplit_multiplicative', 'tamagawa': 2}]}, f)
    curve = load_curve(path)
    assert curve.label == '14a1'
    assert curve.override(2).tamagawa == 2
    assert curve.override(7) is None


def test_load_curve_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_curve(tmp_path / 'missing.yaml')
    with pytest.raises(ConfigInvalid, match="missing 'N'"):
        curve_from_dict({'label': 'x', 'a': [0, -1, 1, -10, -20]})
    with pytest.raises(ConfigInvalid, match="malformed override"):
        curve_from_dict({'label': 'x', 'a': [0, -1, 1, -10, -20], 'N': 11,
                         'overrides': [{'ell': 11, 'kind': 'wobbly'}]})


@pytest.mark.slow
@pytest.mark.parametrize("fixture", ['curve_11a1', 'curve_37a1'])
def test_hasse_and_character_sum_on_random_primes(request, fixture):
    curve = request.getfixturevalue(fixture)
    primes = [q for q in primerange(5, 10 ** 4) if curve.conductor % q]
    for q in random.Random(2024).sample(primes, 100):
        a_q = compute_ap(curve, q)
        assert a_q * a_q <= 4 * q
        assert count_points_character_sum(curve, q) == q + 1 - a_q
