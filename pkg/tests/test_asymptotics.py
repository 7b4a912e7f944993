from fractions import Fraction

import numpy as np
import pytest

from graphs import DELTA_COUPLING, star, mixed_graph as make_graph, wire
from qgraph import Potential, build_delta, build_delta_prime, build_dirichlet, solve_bond
from qgraph.asymptotics import (GaussianRational, UndeterminedProfile, column_minors,
                                fprime_asymptotic, leading_coefficient, log_u_expansion,
                                profile, s_coefficients, secular_expansion, zero_order_p)
from qgraph.graph import MatchingConditions


def test_s_coefficients_solve_the_riccati_equation():
    v = Potential.poly([Fraction(1, 3), -2, 0, 5])
    s = s_coefficients(v, 9)
    assert all(not r for r in s.residual(v))


def test_s_low_order_closed_form():
    v = Potential.poly([1, 2])
    s = s_coefficients(v, 3)
    assert s[-1] == (-1,) and s[0] == ()
    assert s[1] == (Fraction(-1, 2), -1)          # -V/2
    assert s[2] == (Fraction(-1, 2),)             # -V'/4


def test_plus_branch():
    v = Potential.poly([0, 1])
    s = s_coefficients(v, 4, "+")
    assert s[-1] == (1,) and s[1] == (0, Fraction(1, 2))
    assert all(not r for r in s.residual(v))


def test_fprime_asymptotic_against_solver():
    v = Potential.poly([1, -1, 0, Fraction(1, 2)])
    t = 40.0
    num = solve_bond(v, 1, -t * t).fprime_origin_fwd
    assert fprime_asymptotic(v, 10, t) == pytest.approx(num, rel=1e-13)


def test_log_u_expansion_against_solver():
    v = Potential.poly([Fraction(1, 2), 1])
    L = Fraction(3, 2)
    h = log_u_expansion(v, L, 8)
    t = 30.0
    approx = t * float(L) - np.log(2 * t) + sum(float(c) * t ** -j for j, c in enumerate(h))
    assert approx == pytest.approx(solve_bond(v, L, -t * t).log_abs_u, rel=1e-13)


def test_gaussian_rational_arithmetic():
    a = GaussianRational(Fraction(1, 2), Fraction(1))
    b = GaussianRational(Fraction(2), Fraction(-1, 3))
    assert (a * b) / b == a
    assert a - a == 0 and not (a - a)
    assert complex(a) == 0.5 + 1j


def test_column_minors_dirichlet():
    g = wire()
    assert column_minors(build_dirichlet(g)) == {0: GaussianRational(Fraction(1))}


def test_expansion_of_neumann_wire_is_exact():
    # F(it) = t**2 exactly
    g = wire()
    e = secular_expansion(g, build_delta(g, {}), 6)
    assert e.coeffs == {2: GaussianRational(Fraction(1))}


def test_normalization_families():
    g = make_graph()
    prod = 1
    for m in g.valencies.values():
        prod *= -m
    N, c, _, _ = leading_coefficient(g, build_dirichlet(g))
    assert (N, c) == (2 * g.B, 1)
    N, c, _, _ = leading_coefficient(g, build_delta(g, DELTA_COUPLING))
    assert (N, c) == (2 * g.B - g.V, prod)
    N, c, _, _ = leading_coefficient(g, build_delta_prime(g, {}))
    assert (N, c) == (g.V, prod)


def test_c_n_scales_with_det_u():
    g = star()
    mc = build_delta(g, {1: 1})
    u = np.diag([2.0, 1.0, 1.0, 0.5, 4.0, 1.0])
    from qgraph import transform_conditions
    N1, c1, _, _ = leading_coefficient(g, mc)
    N2, c2, _, _ = leading_coefficient(g, transform_conditions(mc, u))
    assert N1 == N2 and c2 == c1 * 4


def test_zero_order_p():
    g = wire()
    assert zero_order_p(g, build_delta(g, {})) == 1
    assert zero_order_p(g, build_dirichlet(g)) == 0
    h = make_graph()
    assert zero_order_p(h, build_delta(h, DELTA_COUPLING)) == 0


def test_undetermined_when_all_minors_vanish():
    mc = MatchingConditions.from_matrices(np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(UndeterminedProfile):
        leading_coefficient(wire(), mc)


def test_profile_json_is_exact():
    g = wire()
    out = profile(g, build_delta(g, {})).to_json()
    assert out["N"] == 0 and out["c_N"] == ["1", "0"] and out["P"] == 1
