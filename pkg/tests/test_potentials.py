from fractions import Fraction

import pytest

from qgraph import Potential, derivative, evaluate, reflect, susy_to_potential


def test_poly_exact_evaluation():
    v = Potential.poly(["1/3", 0, 2])
    assert evaluate(v, Fraction(1, 2)) == Fraction(1, 3) + Fraction(1, 2)
    assert v.degree == 2 and v.kind == "poly"


def test_zero_equals_empty_poly():
    assert Potential.zero() == Potential.poly([0, 0])
    assert Potential.zero().kind == "zero"


def test_susy_expansion():
    phi = Potential.poly([0, 2])
    assert susy_to_potential(phi) == Potential.poly([2, 0, 4])
    assert Potential.susy(phi).kind == "susy"


def test_reflect_is_involution_and_matches_values():
    v = Potential.poly([1, -2, 0, Fraction(1, 3)])
    L = Fraction(7, 4)
    r = reflect(v, L)
    assert reflect(r, L) == v
    for x in (Fraction(0), Fraction(1, 5), L):
        assert evaluate(r, x) == evaluate(v, L - x)


def test_reflect_float_length_reads_decimal():
    v = Potential.poly([0, 1])
    assert reflect(v, 1.1) == Potential.poly([Fraction(11, 10), -1])


@pytest.mark.parametrize("bad", [float("inf"), float("nan"), -1.0])
def test_reflect_rejects_bad_length(bad):
    with pytest.raises(ValueError):
        reflect(Potential.poly([0, 1]), bad)


def test_derivative():
    assert derivative(Potential.poly([5, 1, 3])) == Potential.poly([1, 6])


def test_min_on():
    v = Potential.poly([1, -2, 1])  # (x - 1)**2
    assert v.min_on(3.0) == pytest.approx(0.0, abs=1e-14)
    assert v.min_on(0.5) == pytest.approx(0.25)


def test_json_round_trip():
    for v in (Potential.zero(), Potential.poly(["1/3", 2]), Potential.susy([0, 1])):
        w = Potential.from_json(v.to_json())
        assert w == v and w.kind == v.kind
