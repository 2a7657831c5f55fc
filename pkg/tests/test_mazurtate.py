import pytest
from fractions import Fraction

from mtverify.core.characters import primitive_characters
from mtverify.core.groupring import AbelianFieldSpec
from mtverify.core.mazurtate import (
    delta,
    functional_equation_signs,
    integrality_certificate,
    predicted_sign,
    theta,
    theta_at_level,
    verify_functional_equation,
    verify_interpolation,
    verify_norm_relation,
    verify_sign_stability,
    write_theta,
)
from mtverify.core.modsym import SymbolOptions
from mtverify.core.report import Verdict
from mtverify.errors import HypothesisViolated


def test_delta():
    assert delta(5, 11) == 1
    assert delta(11, 11) == 1
    assert delta(7, 49) == 7
    assert delta(49, 49) == 1


def test_theta_at_level_one(curve_11a1):
    element = theta_at_level(curve_11a1, 1)
    assert element.coefficient(1) == Fraction(1, 5)


def test_theta_of_subfield_is_projection(curve_11a1):
    full = theta(curve_11a1, AbelianFieldSpec(5)).element
    real = theta(curve_11a1, AbelianFieldSpec(5, (4,)))
    assert real.element == full.project(AbelianFieldSpec(5, (4,)))
    assert real.provenance["method"] == "manin_symbols"


def test_write_theta(curve_11a1, tmp_path):
    value = theta(curve_11a1, AbelianFieldSpec(1))
    path = write_theta(value, tmp_path / "theta" / "11a1_m1.txt")
    lines = path.read_text().splitlines()
    assert lines[0] == "# curve: 11a1"
    assert lines[1] == "# m: 1"
    assert lines[-1] == "1: 1/5"


@pytest.mark.parametrize("m,ell", [(1, 2), (1, 3), (3, 2), (5, 5), (2, 2), (1, 11), (3, 11)])
def test_norm_relation_11a1(curve_11a1, m, ell):
    report = verify_norm_relation(curve_11a1, m, ell)
    assert report.passed, report.witnesses
    assert report.witnesses["case"] == ("ell_divides_m" if m % ell == 0 else "ell_coprime_to_m")


@pytest.mark.parametrize("m,expected", [(1, 1), (3, 1), (5, 1), (7, 1), (11, -1)])
def test_functional_equation_11a1(curve_11a1, m, expected):
    report = verify_functional_equation(curve_11a1, m)
    assert report.passed
    assert report.witnesses["predicted_sign"] == expected
    assert report.witnesses["sign"] in (0, expected)


@pytest.mark.parametrize("Q,expected", [(11, 1), (1, -1)])
def test_predicted_sign_11a1(curve_11a1, Q, expected):
    assert predicted_sign(curve_11a1, Q) == expected


def test_predicted_sign_14a1(curve_14a1):
    # a_2 = -1, a_7 = 1
    assert predicted_sign(curve_14a1, 14) == 1
    assert predicted_sign(curve_14a1, 7) == 1
    assert predicted_sign(curve_14a1, 2) == -1
    assert predicted_sign(curve_14a1, 1) == -1


def test_predicted_sign_unknown_for_square_part(curve_49a1):
    assert predicted_sign(curve_49a1, 7) is None


def test_functional_equation_needs_delta_one(curve_49a1):
    with pytest.raises(HypothesisViolated) as excinfo:
        verify_functional_equation(curve_49a1, 7)
    assert excinfo.value.clauses == ["delta(m) = 1"]


def test_sign_stability(curve_37a1):
    report = verify_sign_stability(curve_37a1, 8)
    assert report.passed
    assert set(functional_equation_signs(curve_37a1, 8).values()) <= {0, -1}


def test_sign_stability_11a1(curve_11a1):
    report = verify_sign_stability(curve_11a1, 22)
    assert report.passed, report.witnesses
    assert report.witnesses["predicted"] == {11: 1, 1: -1}
    assert {functional_equation_signs(curve_11a1, 22)[m] for m in (11, 22)} <= {0, -1}


def test_sign_stability_14a1(curve_14a1):
    report = verify_sign_stability(curve_14a1, 14)
    assert report.passed, report.witnesses
    assert report.witnesses["unstable_Q"] == []
    assert functional_equation_signs(curve_14a1, 14)[7] in (0, -1)


@pytest.mark.parametrize("index", [0, 1, 2])
def test_interpolation_11a1(curve_11a1, index):
    chi = primitive_characters(5)[index]
    report = verify_interpolation(curve_11a1, 5, chi, digits=20)
    assert report.passed, report.witnesses


def test_interpolation_needs_primitive_character(curve_11a1):
    with pytest.raises(HypothesisViolated):
        verify_interpolation(curve_11a1, 5, "5:0")
    with pytest.raises(HypothesisViolated):
        verify_interpolation(curve_11a1, 7, "5:1")


def test_integrality(curve_11a1, curve_49a1):
    report = integrality_certificate(curve_11a1, 7)
    assert report.passed
    assert report.witnesses["bound"] == 5
    assert "Manin constant c_0 = 1" in report.assumptions

    undecided = integrality_certificate(curve_49a1, 7)
    assert undecided.verdict == Verdict.undecided


@pytest.mark.parametrize("label,m", [('11a1', 11), ('14a1', 7)])
def test_numeric_theta_at_levels_sharing_the_conductor(label, m, request):
    curve = request.getfixturevalue(f"curve_{label}")
    numeric = theta_at_level(curve, m, SymbolOptions(exact=False))
    assert numeric == theta_at_level(curve, m)
    assert verify_functional_equation(curve, m, SymbolOptions(exact=False)).verdict == Verdict.passed
