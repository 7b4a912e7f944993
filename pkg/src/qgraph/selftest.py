"""Embedded oracle corpus for ``qgraph selftest``.

Each case compares library output with an independent closed form.  Cases
marked ``expect_fail`` hold reference values the recurrence is known not to
reproduce; they report ``xfail`` and do not fail the run.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, NamedTuple

from .airy import airy
from .asymptotics import leading_coefficient, s_coefficients, zero_order_p
from .graph import MetricGraph, build_delta, build_dirichlet
from .potentials import Potential
from .spectral import dirichlet_determinant, spectral_determinant, susy_dirichlet_determinant


class Case(NamedTuple):
    name: str
    check: Callable[[], tuple[bool, str]]
    expect_fail: bool = False


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def _wire(potential: Potential = Potential.zero(), length=1) -> MetricGraph:
    return MetricGraph.build(2, [(1, 2, length, 0.0, potential)])


def airy_dirichlet(omega: float, length: float, gamma: float) -> float:
    """Closed-form Dirichlet determinant of ``-d2/dx2 + omega x`` on ``[0, L]``."""
    c = omega ** (1.0 / 3.0)
    a0, _, b0, _ = airy(gamma / c ** 2)
    a1, _, b1, _ = airy(c * (length + gamma / omega))
    return 2.0 * math.pi / c * (a0 * b1 - b0 * a1)


def harmonic_dirichlet(omega: float, length: float) -> float:
    """Dirichlet determinant of ``-d2/dx2 + omega**2 x**2 + omega`` at ``gamma = 0``."""
    return (math.sqrt(math.pi / omega) * math.exp(0.5 * omega * length ** 2)
            * math.erf(math.sqrt(omega) * length))


def _free_wire():
    g = _wire()
    errs = [_rel(spectral_determinant(g, build_dirichlet(g), gam).value,
                 2 * math.sinh(math.sqrt(gam)) / math.sqrt(gam)) for gam in (0.1, 1.0, 10.0)]
    return max(errs) <= 1e-8, f"max rel err {max(errs):.2e}"


def _free_wire_limit():
    g = _wire(length=Fraction(3, 2))
    val = spectral_determinant(g, build_dirichlet(g), 0.0, limit=True).value
    return abs(val - 3.0) <= 1e-6, f"S(0) = {val:.10f}, expected 2L = 3"


def _linear():
    g = _wire(Potential.poly([0, 1]))
    errs = [_rel(dirichlet_determinant(g, gam), airy_dirichlet(1.0, 1.0, gam))
            for gam in (0.0, 1.0, 10.0)]
    return max(errs) <= 1e-6, f"max rel err {max(errs):.2e}"


def _harmonic():
    phi = Potential.poly([0, 1])
    g = _wire(Potential.susy(phi))
    ref = harmonic_dirichlet(1.0, 1.0)
    e1 = _rel(dirichlet_determinant(g, 0.0), ref)
    e2 = _rel(susy_dirichlet_determinant(phi, 1), ref)
    return e1 <= 1e-6 and e2 <= 1e-7, f"ode {e1:.2e}, quadrature {e2:.2e}"


def _table(omega: Fraction):
    w = omega
    return {
        -1: (Fraction(-1),), 0: (), 1: (0, -w / 2), 2: (-w / 4,), 3: (0, 0, w ** 2 / 8),
        4: (0, w ** 2 / 4),
    }


def _table_reference_high(omega: Fraction):
    w = omega
    return {5: (3 * w ** 2 / 32, 0, 0, -w ** 3 / 8), 6: (0, 0, -11 * w ** 3 / 32)}


def _norm(p) -> tuple:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _table_check(table_fn):
    bad = []
    for omega in (Fraction(1), Fraction(3, 2)):
        s = s_coefficients(Potential.poly([0, omega]), 6)
        for j, poly in table_fn(omega).items():
            if _norm(s[j]) != _norm(poly):
                bad.append(f"s_{j}(omega={omega})")
    return not bad, "exact match" if not bad else "mismatch: " + ", ".join(bad)


def _star(n_arms: int = 3) -> MetricGraph:
    lengths = [Fraction(1), Fraction(3, 2), Fraction(7, 4), Fraction(5, 4)][:n_arms]
    return MetricGraph.build(n_arms + 1, [(1, j + 2, lengths[j]) for j in range(n_arms)])


def _normalization():
    g = _star()
    N, cN, _, _ = leading_coefficient(g, build_dirichlet(g))
    ok_dir = N == 2 * g.B and cN == 1
    coupling = {1: Fraction(1, 2), 2: Fraction(1), 3: Fraction(2), 4: Fraction(-1, 3)}
    N2, c2, _, _ = leading_coefficient(g, build_delta(g, coupling))
    prod = math.prod(-m for m in g.valencies.values())
    ok_delta = N2 == 2 * g.B - g.V and c2 == prod
    return ok_dir and ok_delta, f"Dirichlet ({N}, {cN}), delta ({N2}, {c2})"


def _neumann():
    g = _wire()
    mc = build_delta(g, {})
    P = zero_order_p(g, mc)
    val = spectral_determinant(g, mc, 4.0).value
    ref = math.sinh(2.0)
    err = _rel(val, ref)
    return P == 1 and err <= 1e-8, f"P = {P}, S(4) rel err {err:.2e}"


CASES: tuple[Case, ...] = (
    Case("free Dirichlet wire determinant", _free_wire),
    Case("free Dirichlet wire gamma -> 0 limit", _free_wire_limit),
    Case("linear potential vs Airy closed form", _linear),
    Case("harmonic SUSY determinant vs erf closed form", _harmonic),
    Case("linear potential Riccati table s_-1..s_4", lambda: _table_check(_table)),
    Case("linear potential Riccati table s_5, s_6 reference values",
         lambda: _table_check(_table_reference_high), expect_fail=True),
    Case("star normalization data", _normalization),
    Case("Neumann wire zero mode and determinant", _neumann),
)


def run_selftest(cases=CASES) -> dict:
    out = []
    passed = True
    for case in cases:
        try:
            ok, detail = case.check()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        if case.expect_fail:
            status = "xpass" if ok else "xfail"
        else:
            status = "pass" if ok else "fail"
            passed &= ok
        out.append({"name": case.name, "status": status, "detail": detail})
    return {"passed": passed, "cases": out}
