"""Randomized invariant suites; each runs on at least 50 generated instances."""

import cmath
from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from qgraph import (MetricGraph, Potential, build_delta, build_delta_prime, solve_bond,
                    transform_conditions, validate_self_adjoint)
from qgraph.secular import secular_value

EXAMPLES = 50
SETTINGS = settings(max_examples=EXAMPLES, deadline=None, derandomize=True,
                    suppress_health_check=[HealthCheck.too_slow])
COUNTS: dict[str, int] = {}

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=8)
lengths = st.fractions(min_value=Fraction(1, 4), max_value=Fraction(5, 2), max_denominator=8)
potentials = st.lists(rationals, min_size=0, max_size=4).map(Potential.poly)
energies = st.one_of(
    st.floats(min_value=-400.0, max_value=200.0),
    st.builds(complex, st.floats(min_value=-50.0, max_value=50.0),
              st.floats(min_value=-20.0, max_value=20.0)),
)


@st.composite
def graphs(draw):
    V = draw(st.integers(min_value=2, max_value=4))
    n_bonds = draw(st.integers(min_value=V - 1, max_value=V + 1))
    bonds = []
    for i in range(n_bonds):
        # a spanning path first, then random extra bonds
        if i < V - 1:
            o, t = i + 1, i + 2
        else:
            o = draw(st.integers(min_value=1, max_value=V))
            t = draw(st.integers(min_value=o, max_value=V))
        flux = draw(st.sampled_from([0.0, 0.0, 0.5, -1.25]))
        bonds.append((o, t, draw(lengths), flux, draw(potentials)))
    return MetricGraph.build(V, bonds)


@st.composite
def graphs_with_conditions(draw):
    g = draw(graphs())
    coupling = {v: draw(rationals) for v in range(1, g.V + 1)}
    build = draw(st.sampled_from([build_delta, build_delta_prime]))
    return g, build(g, coupling)


def _count(name):
    COUNTS[name] = COUNTS.get(name, 0) + 1


def _relerr(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@SETTINGS
@given(graphs_with_conditions(), st.floats(min_value=0.1, max_value=6.0),
       st.floats(min_value=0.05, max_value=np.pi - 0.05), st.booleans())
def test_secular_even(gmc, r, phase, lower):
    # off the real axis, so no bond Dirichlet pole is hit
    g, mc = gmc
    z = r * cmath.exp(1j * (-phase if lower else phase))
    a, b = secular_value(g, mc, z), secular_value(g, mc, -z)
    _count("even")
    assert _relerr(a, b) <= 1e-8


@SETTINGS
@given(potentials, lengths, energies)
def test_u_direction_independent(v, L, mu):
    s = solve_bond(v, L, mu)
    _count("direction")
    # near a bond Dirichlet level u(L) passes through zero; measure against |u'(L)|/k there
    scale = max(abs(s.u_at_L), abs(s.uprime_at_L) / max(1.0, abs(mu) ** 0.5))
    assert abs(s.u_at_L - s.u_at_L_rev) <= 1e-9 * scale


@SETTINGS
@given(potentials, lengths, energies)
def test_fprime_end_times_u(v, L, mu):
    s = solve_bond(v, L, mu)
    _count("fprime_end")
    if s.flagged:
        return
    assert abs(s.fprime_end * s.u_at_L + 1.0) <= 1e-9


@SETTINGS
@given(potentials, lengths, energies)
def test_wronskian_constant(v, L, mu):
    s = solve_bond(v, L, mu)
    _count("wronskian")
    assert s.wronskian_residual <= 1e-9


@SETTINGS
@given(graphs(), st.lists(rationals, min_size=4, max_size=4), st.booleans(),
       st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_builders_self_adjoint(g, coup, prime, seed):
    coupling = {v: coup[v - 1] for v in range(1, g.V + 1)}
    mc = (build_delta_prime if prime else build_delta)(g, coupling)
    u = np.random.default_rng(seed).normal(size=(mc.size, mc.size))
    _count("builders")
    for cond in (mc, transform_conditions(mc, u)):
        rep = validate_self_adjoint(cond, g)
        assert rep.valid and rep.local, rep.violations


def test_instance_counts():
    for name in ("even", "direction", "fprime_end", "wronskian", "builders"):
        assert COUNTS.get(name, 0) >= EXAMPLES, name
