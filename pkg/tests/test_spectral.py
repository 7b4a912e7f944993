import math
from fractions import Fraction

import numpy as np
import pytest

from graphs import DELTA_COUPLING, star, mixed_graph as make_graph, wire
from qgraph import Potential, build_delta, build_dirichlet
from qgraph.spectral import (LimitRequired, determinant_batch, dirichlet_determinant,
                             spectral_determinant, susy_dirichlet_determinant, zeta,
                             zeta_dirichlet_wire, zeta_prime_zero)


def test_dirichlet_factor_free():
    g = wire(Fraction(5, 2))
    for gam in (0.0, 0.3, 20.0):
        ref = 2 * math.sinh(math.sqrt(gam) * 2.5) / math.sqrt(gam) if gam else 5.0
        assert dirichlet_determinant(g, gam) == pytest.approx(ref, rel=1e-10)


def test_dirichlet_factor_large_gamma_does_not_overflow():
    g = wire(10)
    S = spectral_determinant(g, build_dirichlet(g), 1e6)
    assert S.log_value == pytest.approx(1e4 - 0.5 * math.log(1e6), rel=1e-12)


def test_susy_quadrature_free_limit():
    assert susy_dirichlet_determinant(Potential.zero(), 2) == pytest.approx(4.0, rel=1e-12)


def test_neumann_requires_limit_at_zero():
    g = wire()
    with pytest.raises(LimitRequired):
        spectral_determinant(g, build_delta(g, {}), 0.0)
    S0 = spectral_determinant(g, build_delta(g, {}), 0.0, limit=True)
    assert S0.extrapolated and S0.value == pytest.approx(2.0, rel=1e-6)


def test_neumann_wire_determinant():
    # nonzero Neumann levels coincide with the Dirichlet ones
    g = wire()
    for gam in (0.5, 4.0):
        S = spectral_determinant(g, build_delta(g, {}), gam).value
        assert S == pytest.approx(2 * math.sinh(math.sqrt(gam)) / math.sqrt(gam), rel=1e-9)


def test_batch_and_diagnostics():
    g = make_graph()
    res = determinant_batch(g, build_delta(g, DELTA_COUPLING), [0.5, 2.0])
    assert [r.gamma for r in res] == [0.5, 2.0]
    for r in res:
        assert r.imaginary_residue < 1e-10
        assert r.value == pytest.approx(math.exp(r.log_value), rel=1e-12)
        assert set(r.to_json()) >= {"value", "dirichlet_factor", "secular_factor", "profile"}


def test_zeta_dirichlet_wire_closed_form():
    # free wire: zeta = sum_j (gamma + (j pi/L)**2)**-s, check at s = 0.75 directly
    L, gam, s = 1.3, 2.0, 0.75
    j = np.arange(1, 200001)
    terms = (gam + (j * np.pi / L) ** 2) ** -s
    J = j[-1]
    a = np.pi / L
    # tail of sum_{j>J} (a j)**-2s (1 + gam/(a j)**2)**-s by Euler-Maclaurin on the leading part
    tail = a ** (-2 * s) * (J ** (1 - 2 * s) / (2 * s - 1) - 0.5 * J ** (-2 * s))
    ref = terms.sum() + tail
    val = zeta_dirichlet_wire(Potential.zero(), L, s, gam)
    assert val.real == pytest.approx(ref, rel=1e-6)


def test_zeta_strip_checks():
    g = wire()
    with pytest.raises(ValueError):
        zeta(g, build_dirichlet(g), 1.2, 1.0)
    with pytest.raises(ValueError):
        zeta(g, build_dirichlet(g), 0.3, 0.0)


def test_zeta_at_zero_counts_levels():
    # zeta(0) of the Dirichlet wire is -1/2
    g = wire()
    z = zeta(g, build_dirichlet(g), 1e-12, 1.0).value
    assert z.real == pytest.approx(-0.5, abs=1e-8)


def test_zeta_prime_identity_matches_fd_on_star():
    g = star()
    mc = build_delta(g, {1: Fraction(1, 2)})
    h = 1e-4
    fd = ((zeta(g, mc, h, 1.5).value - zeta(g, mc, -h, 1.5).value) / (2 * h)).real
    assert fd == pytest.approx(zeta_prime_zero(g, mc, 1.5), abs=1e-6)
