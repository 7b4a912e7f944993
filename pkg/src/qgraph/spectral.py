"""Dirichlet determinants, the graph spectral determinant and the zeta function.

With ``S_Dir(gamma) = prod_b 2 u_b(L_b; -gamma)`` and ``F`` the secular
function,

    S(gamma) = S_Dir(gamma) * F(i sqrt(gamma)) / (c_N gamma**P).

The zeta function is evaluated on the imaginary axis: ``zeta = zeta_Im +
zeta_P`` where the pole part equals the sum of the single-bond Dirichlet zeta
functions.  Both integrals have the large-``t`` behaviour subtracted, which
makes them valid for ``-1/2 < Re s < 1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .asymptotics import AsymptoticProfile, _log1p_series, log_u_expansion, profile
from .graph import MatchingConditions, MetricGraph
from .interval import energy, oracle_susy_u
from .potentials import Potential, as_length
from .quadrature import tanh_sinh
from .secular import PoleError, bond_solutions, cached_bond, secular_imaginary, secular_value

LIMIT_GAMMAS = (1e-3, 1e-4, 1e-5, 1e-6)
QUAD_RTOL = 1e-10
TAIL_ORDER = 12


class LimitRequired(ValueError):
    """``gamma = 0`` needs an explicit limit when ``F`` vanishes at the origin."""


# -- Dirichlet determinants --------------------------------------------------

def log_dirichlet_determinant(graph: MetricGraph, gamma: float) -> float:
    total = 0.0
    for s in bond_solutions(graph, energy(-float(gamma)), reverse=False):
        if s.u_at_L <= 0:
            raise ValueError(f"u(L; -{gamma}) <= 0: gamma is at or beyond a bond Dirichlet level")
        total += math.log(2.0) + s.log_abs_u
    return total


def dirichlet_determinant(graph: MetricGraph, gamma: float) -> float:
    """``prod_b -2/f'_b(L_b; gamma) = prod_b 2 u_b(L_b; -gamma)``."""
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    return math.exp(log_dirichlet_determinant(graph, gamma))


def susy_dirichlet_determinant(phi: Potential, length) -> float:
    """``2 exp(int_0^L phi) int_0^L exp(-2 int_0^x phi)``, the ``gamma = 0`` determinant."""
    return 2.0 * oracle_susy_u(phi, length)


# -- graph determinant -------------------------------------------------------

@dataclass(frozen=True)
class DeterminantResult:
    value: float
    gamma: float
    profile: AsymptoticProfile = field(repr=False)
    dirichlet_factor: float
    secular_factor: complex
    imaginary_residue: float = 0.0
    log_value: float = math.nan
    extrapolated: bool = False

    def to_json(self) -> dict:
        return {
            "value": self.value, "gamma": self.gamma, "log_value": self.log_value,
            "dirichlet_factor": self.dirichlet_factor,
            "secular_factor": [self.secular_factor.real, self.secular_factor.imag],
            "imaginary_residue": self.imaginary_residue, "extrapolated": self.extrapolated,
            "profile": {"N": self.profile.N, "c_N": self.profile.c_N.to_json(),
                        "P": self.profile.P},
        }


def _secular_factor(graph, mc, gamma: float) -> complex:
    if gamma == 0:
        return secular_value(graph, mc, 0.0)
    return secular_value(graph, mc, 1j * math.sqrt(gamma))


def spectral_determinant(graph: MetricGraph, mc: MatchingConditions, gamma: float, *,
                         limit: bool = False, order: int | None = None) -> DeterminantResult:
    """``S(gamma)``; ``limit=True`` at ``gamma = 0`` extrapolates from small ``gamma``."""
    prof = profile(graph, mc, order)
    gamma = float(gamma)
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if gamma == 0 and limit:
        return _limit(graph, mc, prof)
    if gamma == 0 and prof.P > 0:
        raise LimitRequired(f"F vanishes to order 2P={2 * prof.P} at z=0; pass limit=True")
    log_dir = log_dirichlet_determinant(graph, gamma)
    sec = _secular_factor(graph, mc, gamma)
    ratio = sec / complex(prof.c_N)
    if prof.P:
        ratio /= gamma ** prof.P
    mag = abs(ratio)
    residue = abs(ratio.imag) / mag if mag else 0.0
    log_value = log_dir + math.log(mag) if mag else -math.inf
    value = math.copysign(_exp(log_value), ratio.real)
    return DeterminantResult(value, gamma, prof, _exp(log_dir), sec, residue, log_value)


def _exp(x: float) -> float:
    """``exp`` that saturates to ``inf``; ``log_value`` keeps the information."""
    return math.exp(x) if x < 709.0 else math.inf


def _limit(graph, mc, prof) -> DeterminantResult:
    pts = [spectral_determinant(graph, mc, g) for g in LIMIT_GAMMAS]
    value = _richardson_zero(np.array(LIMIT_GAMMAS), np.array([p.value for p in pts]))
    sec0 = pts[-1].secular_factor
    return DeterminantResult(value, 0.0, prof, dirichlet_determinant(graph, 0.0), sec0,
                             max(p.imaginary_residue for p in pts),
                             math.log(value) if value > 0 else math.nan, True)


def _richardson_zero(x: np.ndarray, y: np.ndarray) -> float:
    """Neville extrapolation of the interpolating polynomial to ``x = 0``."""
    p = list(y.astype(float))
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i])
    return float(p[0])


def determinant_batch(graph: MetricGraph, mc: MatchingConditions, gammas) -> list[DeterminantResult]:
    return [spectral_determinant(graph, mc, g) for g in gammas]


# -- zeta functions ----------------------------------------------------------

@dataclass(frozen=True)
class ZetaResult:
    value: complex
    s: complex
    gamma: float
    zeta_im: complex
    zeta_p: complex
    error: float

    def to_json(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag], "s": [self.s.real, self.s.imag],
            "gamma": self.gamma, "error": self.error,
            "parts": {"zeta_im": [self.zeta_im.real, self.zeta_im.imag],
                      "zeta_p": [self.zeta_p.real, self.zeta_p.imag]},
        }


def _check_strip(s: complex, gamma: float):
    if not -0.5 < s.real < 1:
        raise ValueError(f"s={s} is outside the strip -1/2 < Re s < 1")
    if gamma <= 0:
        raise ValueError("gamma must be positive")


def _tail_weights(s: complex, gamma: float, T: float, m: int, terms: int = 60) -> complex:
    """``int_T^inf (t**2 - gamma)**-s t**-(m+1) dt`` by the binomial series."""
    q = gamma / (T * T)
    total, coef = 0j, 1.0 + 0j
    for k in range(terms):
        total += coef * T ** (-2 * s - 2 * k - m) / (2 * s + 2 * k + m) * gamma ** k
        coef *= (s + k) / (k + 1)
        if abs(coef) * q ** (k + 1) < 1e-18:
            break
    return total


def _tail_integral(s: complex, gamma: float, T: float, logcoef) -> complex:
    """Tail of ``int (t**2-gamma)**-s d/dt sum_m l_m t**-m``."""
    return sum(-m * complex(lm) * _tail_weights(s, gamma, T, m)
               for m, lm in enumerate(logcoef) if m >= 1 and lm)


def _panels(start: float, end: float, first: float) -> list[tuple[float, float]]:
    """Offsets ``[0, first], [first, 2 first], ...`` up to ``end - start``."""
    span = end - start
    edges = [0.0]
    w = min(first, span)
    while edges[-1] + w < span * (1 - 1e-12):
        edges.append(edges[-1] + w)
        w *= 2.0
    edges.append(span)
    return list(zip(edges[:-1], edges[1:]))


def _integrate(g, s: complex, gamma: float, T: float, first: float, rtol: float):
    """``int_{sqrt(gamma)}^T (t**2 - gamma)**-s g(t) dt`` over geometric panels."""
    r = math.sqrt(gamma)
    total, err = 0j, 0.0
    for lo, hi in _panels(r, T, first):
        def f(t, d, lo=lo):
            off = lo + d        # exact offset from sqrt(gamma)
            w = np.exp(-s * np.log(off * (off + 2.0 * r)))
            return w * np.array([g(x) for x in t])
        res = tanh_sinh(f, r + lo, r + hi, rtol=rtol, atol=1e-15)
        total += res.value
        err += res.error + 1e-15 * abs(res.value)
    return total, err


def _cutoff(lengths, gamma: float, vmax: float) -> float:
    return max(25.0 / min(lengths), 2.0 * math.sqrt(gamma) + 5.0, 6.0 * math.sqrt(vmax))


def _vmax(v: Potential, L: float) -> float:
    return float(sum(abs(float(c)) * L ** i for i, c in enumerate(v.coeffs)))


def _closed_form_dir(s: complex, gamma: float, L: float) -> complex:
    if abs(s - 0.5) < 1e-14:
        raise ValueError("zeta_Dir has a pole at s = 1/2")
    g = complex(special.gamma(s - 0.5)) * complex(special.rgamma(s))
    return L * g / (2 * math.sqrt(math.pi)) * gamma ** (0.5 - s) - 0.5 * gamma ** (-s)


def zeta_dirichlet_wire(v: Potential, length, s: complex, gamma: float, *,
                        rtol: float = QUAD_RTOL, with_error: bool = False):
    """``zeta_Dir(s, gamma)`` of one bond with Dirichlet ends."""
    s = complex(s)
    gamma = float(gamma)
    _check_strip(s, gamma)
    Lq = as_length(length)
    L = float(Lq)
    rv = v.reflect(Lq)

    def g(t):
        sol = cached_bond(v, L, energy(-t * t), rv, True, False)
        return sol.d_log_u * (-2.0 * t) - L + 1.0 / t

    T = _cutoff([L], gamma, _vmax(v, L))
    first = 0.25 * min(1.0 / L, max(math.sqrt(gamma), 1e-8))
    quad, err = _integrate(g, s, gamma, T, first, rtol)
    h = [float(x) for x in log_u_expansion(v, Lq, TAIL_ORDER)]
    tail = _tail_integral(s, gamma, T, h)
    pref = cmath.sin(math.pi * s) / math.pi
    value = pref * (quad + tail) + _closed_form_dir(s, gamma, L)
    err = abs(pref) * err
    return (value, err) if with_error else value


def _im_log_coefficients(prof: AsymptoticProfile) -> list[complex]:
    """``l_m`` in ``log(F(it) t**(N-2B) / c_N) ~ sum_m l_m t**-m``."""
    cN = complex(prof.c_N)
    ratios = [complex(c) / cN for c in prof.coefficients[prof.N:]]
    n = len(ratios) - 1
    w = [0j] + ratios[1:]
    return _log1p_series(w, n)


def zeta(graph: MetricGraph, mc: MatchingConditions, s: complex, gamma: float, *,
         rtol: float = QUAD_RTOL, order: int | None = None) -> ZetaResult:
    """``zeta(s, gamma) = sum_j (gamma + E_j)**-s`` continued to ``-1/2 < Re s < 1``.

    When ``F`` vanishes to order ``2P`` at the origin the zero modes are
    divided out, i.e. the sum runs over the spectrum with ``P`` zero
    eigenvalues removed.
    """
    s = complex(s)
    gamma = float(gamma)
    _check_strip(s, gamma)
    prof = profile(graph, mc, order)
    n = 2 * graph.B

    def g(t):
        try:
            _, dlog = secular_imaginary(graph, mc, t)
        except PoleError as exc:
            raise ArithmeticError(f"F(it) has a pole at t={t}; spectrum not positive") from exc
        return dlog + (prof.N - n) / t

    lengths = [b.L for b in graph.bonds]
    vmax = max(_vmax(b.potential, b.L) for b in graph.bonds)
    T = _cutoff(lengths, gamma, vmax)
    first = 0.25 * min(1.0 / max(lengths), max(math.sqrt(gamma), 1e-8))
    quad, err = _integrate(g, s, gamma, T, first, rtol)
    tail = _tail_integral(s, gamma, T, _im_log_coefficients(prof))
    pref = cmath.sin(math.pi * s) / math.pi
    z_im = pref * (quad + tail) + 0.5 * (n - prof.N - 2 * prof.P) * gamma ** (-s)
    z_p, err_p = 0j, 0.0
    for b in graph.bonds:
        val, e = zeta_dirichlet_wire(b.potential, b.length, s, gamma, rtol=rtol, with_error=True)
        z_p += val
        err_p += e
    return ZetaResult(z_im + z_p, s, gamma, z_im, z_p, abs(pref) * err + err_p)


def zeta_prime_zero(graph: MetricGraph, mc: MatchingConditions, gamma: float) -> float:
    """``zeta'(0, gamma) = -log S(gamma)`` from the closed-form identity."""
    return -spectral_determinant(graph, mc, gamma).log_value


def zeta_prime_fd(graph: MetricGraph, mc: MatchingConditions, gamma: float,
                  h: float = 1e-4) -> float:
    """Central difference ``(zeta(h) - zeta(-h)) / 2h`` (cross-check only)."""
    zp = zeta(graph, mc, h, gamma).value
    zm = zeta(graph, mc, -h, gamma).value
    return ((zp - zm) / (2 * h)).real


def zeta_dirichlet_prime_fd(v: Potential, length, gamma: float, h: float = 1e-4) -> float:
    zp = zeta_dirichlet_wire(v, length, h, gamma)
    zm = zeta_dirichlet_wire(v, length, -h, gamma)
    return ((zp - zm) / (2 * h)).real
