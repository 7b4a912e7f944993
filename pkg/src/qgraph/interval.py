"""Single-bond initial-value solves and closed-form oracles.

For an energy ``mu`` in ``-psi'' + V psi = mu psi`` on ``[0, L]`` two solutions
are integrated from ``x = 0``: ``u`` with ``u(0)=0, u'(0)=1`` and ``v`` with
``v(0)=1, v'(0)=0``.  Their Wronskian ``v u' - u v'`` is identically 1, which
gives the boundary-value data without any shooting:

    f'(0) = -v(L)/u(L),   f'(L) = -1/u(L),   fbar'(0) = -u'(L)/u(L).

Energies far down the negative axis (``t L > 40`` with ``mu = -t**2``) are
handled through the Riccati variables ``u/u'`` and ``f/f'``, which stay
bounded while ``u`` itself grows like ``exp(t L)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import _ode
from .airy import airy
from .potentials import Potential, poly_eval, poly_integral

RTOL = 1e-11
ATOL = 1e-12
RICCATI_RTOL = 1e-13
RICCATI_SWITCH = 40.0
FLAG_TOL = 1e-10
MAX_STEPS = 2_000_000


def configure(rtol: float | None = None, atol: float | None = None) -> None:
    """Override the linear-mode tolerances for the rest of the process."""
    global RTOL, ATOL
    for name, val in (("rtol", rtol), ("atol", atol)):
        if val is not None and not val > 0:
            raise ValueError(f"{name} must be positive")
    if rtol is not None:
        RTOL = float(rtol)
    if atol is not None:
        ATOL = float(atol)


class IntegrationError(RuntimeError):
    """Step-size underflow or step budget exhausted."""


@dataclass(frozen=True)
class SpectralPoint:
    """Energy ``mu`` plus the parametrization it came from (reporting only)."""

    mu: complex
    source: str = "mu"
    value: complex | None = None

    @classmethod
    def from_k(cls, k) -> "SpectralPoint":
        return cls(_real_if_real(k * k), "k", k)

    @classmethod
    def from_gamma(cls, gamma) -> "SpectralPoint":
        return cls(_real_if_real(-gamma), "gamma", gamma)

    @classmethod
    def from_t(cls, t) -> "SpectralPoint":
        return cls(_real_if_real(-t * t), "t", t)

    @classmethod
    def from_z(cls, z) -> "SpectralPoint":
        return cls(_real_if_real(z * z), "z", z)


def _real_if_real(x):
    if isinstance(x, complex) or np.iscomplexobj(x):
        x = complex(x)
        return x.real if x.imag == 0 else x
    return float(x)


def energy(mu) -> complex | float:
    if isinstance(mu, SpectralPoint):
        return mu.mu
    return _real_if_real(mu)


@dataclass(frozen=True)
class BondSolution:
    """Endpoint data of one bond at one energy.

    ``d_*`` fields are derivatives with respect to the energy ``mu`` and are
    ``None`` unless requested.  When ``flagged`` is set, ``u(L)`` vanishes to
    tolerance (a Dirichlet eigenvalue of the bond); ``v_at_L`` and
    ``uprime_at_L`` remain finite and give the pole-free products
    ``u f'(0) = -v(L)`` and ``u fbar'(0) = -u'(L)``.
    """

    mu: complex | float
    u_at_L: complex | float
    fprime_origin_fwd: complex | float
    fprime_origin_rev: complex | float
    fprime_end: complex | float
    wronskian_residual: float
    log_abs_u: float
    v_at_L: complex | float
    uprime_at_L: complex | float
    vprime_at_L: complex | float = math.nan
    u_at_L_rev: complex | float | None = None
    flagged: bool = False
    mode: str = "linear"
    d_u: complex | float | None = None
    d_log_u: complex | float | None = None
    d_fprime_fwd: complex | float | None = None
    d_fprime_rev: complex | float | None = None


def _as_scalar(x):
    x = complex(x)
    return x.real if x.imag == 0 else x


@lru_cache(maxsize=4096)
def _coef(v: Potential) -> np.ndarray:
    return v.float_coeffs


def _linear(coef, L, mu, sens, samples=5):
    complex_mu = isinstance(mu, complex)
    dtype = np.complex128 if complex_mu else np.float64
    n = 8 if sens else 4
    y0 = np.zeros(n, dtype=dtype)
    y0[1] = 1.0
    y0[2] = 1.0
    xs = np.linspace(0.0, L, samples + 1)
    scale = 1.0 + math.sqrt(abs(mu)) + math.sqrt(float(np.abs(coef).sum()))
    h0 = min(L, 0.05 / scale)
    atol = np.full(n, ATOL)
    ys, steps, ok = _ode.dopri5(_ode.LINEAR, xs, y0, coef,
                                complex(mu) if complex_mu else float(mu),
                                RTOL, atol, h0, MAX_STEPS)
    if not ok:
        raise IntegrationError(f"linear solve failed at mu={mu!r}, L={L} after {steps} steps")
    u, up, v, vp = ys[:, 0], ys[:, 1], ys[:, 2], ys[:, 3]
    w = v * up - u * vp
    wscale = 1.0 + np.abs(v * up) + np.abs(u * vp)
    wres = float(np.max(np.abs(w - 1.0) / wscale))
    return ys[-1], wres


def _riccati(coef, L, mu, sens):
    """(log u(L), u'(L)/u(L), f'(0)) and their mu-derivatives for real mu << 0."""
    t = math.sqrt(-mu)
    ya = np.zeros(4)
    atol_u = np.array([1e-3 / t, 1e-3, 1e-3 / t ** 3, 1e-3 / t ** 2]) * RICCATI_RTOL
    ys, steps, ok = _ode.dopri5(_ode.RICCATI_U, np.array([0.0, L]), ya, coef, float(mu),
                                RICCATI_RTOL, atol_u, min(L, 0.1 / t), MAX_STEPS)
    if not ok:
        raise IntegrationError(f"Riccati solve (u) failed at mu={mu!r}, L={L}")
    p, I, dp, dI = ys[-1]
    atol_f = np.array([1e-3 / t, 1e-3 / t ** 3]) * RICCATI_RTOL
    yf, steps, ok = _ode.dopri5(_ode.RICCATI_F, np.array([L, 0.0]), np.zeros(2), coef,
                                float(mu), RICCATI_RTOL, atol_f, min(L, 0.1 / t), MAX_STEPS)
    if not ok:
        raise IntegrationError(f"Riccati solve (f) failed at mu={mu!r}, L={L}")
    q, dq = yf[-1]
    return {
        "log_u": I + math.log(L), "d_log_u": dI,
        "uprime_over_u": 1.0 / p, "d_uprime_over_u": -dp / p ** 2,
        "fprime0": 1.0 / q, "d_fprime0": -dq / q ** 2,
    }


def _use_riccati(v: Potential, L: float, mu) -> bool:
    if isinstance(mu, complex) or mu >= 0:
        return False
    if math.sqrt(-mu) * L <= RICCATI_SWITCH:
        return False
    return v.min_on(L) - mu > 0


def solve_bond(v: Potential, length, mu, *, sensitivities: bool = False,
               reverse: bool = True, reversed_potential: Potential | None = None
               ) -> BondSolution:
    """Endpoint data for bond potential ``v`` of the given length at energy ``mu``.

    ``reverse=True`` repeats the solve from the other end with the reflected
    potential and fills ``fprime_origin_rev``/``u_at_L_rev`` from it;
    otherwise ``fprime_origin_rev`` comes from the forward Wronskian identity.
    """
    mu = energy(mu)
    L = float(length)
    if L <= 0:
        raise ValueError("length must be positive")
    coef = _coef(v)
    if _use_riccati(v, L, mu):
        sol = _solve_riccati(v, coef, L, mu, sensitivities)
        if reverse:
            rv = reversed_potential if reversed_potential is not None else v.reflect(length)
            rsol = _solve_riccati(rv, _coef(rv), L, mu, sensitivities)
            sol = _merge_reverse(sol, rsol)
        return sol
    sol = _solve_linear(coef, L, mu, sensitivities)
    if reverse:
        rv = reversed_potential if reversed_potential is not None else v.reflect(length)
        rsol = _solve_linear(_coef(rv), L, mu, sensitivities)
        sol = _merge_reverse(sol, rsol)
    return sol


def _merge_reverse(fwd: BondSolution, rev: BondSolution) -> BondSolution:
    with np.errstate(divide="ignore", invalid="ignore"):
        fend = -1.0 / rev.u_at_L if rev.u_at_L != 0 else fwd.fprime_end
    return BondSolution(
        mu=fwd.mu, u_at_L=fwd.u_at_L,
        fprime_origin_fwd=fwd.fprime_origin_fwd,
        fprime_origin_rev=rev.fprime_origin_fwd,
        fprime_end=_as_scalar(fend) if np.isfinite(abs(fend)) else fwd.fprime_end,
        wronskian_residual=max(fwd.wronskian_residual, rev.wronskian_residual),
        log_abs_u=fwd.log_abs_u, v_at_L=fwd.v_at_L, uprime_at_L=fwd.uprime_at_L,
        vprime_at_L=fwd.vprime_at_L, u_at_L_rev=rev.u_at_L, flagged=fwd.flagged, mode=fwd.mode,
        d_u=fwd.d_u, d_log_u=fwd.d_log_u, d_fprime_fwd=fwd.d_fprime_fwd,
        d_fprime_rev=rev.d_fprime_fwd,
    )


def _is_flagged(u, up, mu) -> bool:
    return abs(u) * max(1.0, math.sqrt(abs(mu))) <= FLAG_TOL * max(abs(up), 1e-300)


def _solve_linear(coef, L, mu, sens) -> BondSolution:
    y, wres = _linear(coef, L, mu, sens)
    u, up, v, vp = (_as_scalar(c) for c in y[:4])
    flagged = _is_flagged(u, up, mu)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / u if u != 0 else complex("inf")
        fp0 = -v * inv
        fprev = -up * inv
        fend = -inv
        d = {}
        if sens:
            du, dup, dv = (_as_scalar(c) for c in (y[4], y[5], y[6]))
            d = dict(d_u=du, d_log_u=du * inv,
                     d_fprime_fwd=-(dv * u - v * du) * inv * inv,
                     d_fprime_rev=-(dup * u - up * du) * inv * inv)
    return BondSolution(
        mu=mu, u_at_L=u, fprime_origin_fwd=_as_scalar(fp0), fprime_origin_rev=_as_scalar(fprev),
        fprime_end=_as_scalar(fend), wronskian_residual=wres,
        log_abs_u=math.log(abs(u)) if u != 0 else -math.inf,
        v_at_L=v, uprime_at_L=up, vprime_at_L=vp, flagged=flagged, mode="linear",
        **{k: _as_scalar(x) for k, x in d.items()},
    )


def _solve_riccati(v, coef, L, mu, sens) -> BondSolution:
    r = _riccati(coef, L, mu, sens)
    log_u = r["log_u"]
    u = math.exp(log_u) if log_u < 700 else math.inf
    with np.errstate(over="ignore", invalid="ignore"):
        vL = -r["fprime0"] * u
        upL = r["uprime_over_u"] * u
    d = {}
    if sens:
        d = dict(d_u=u * r["d_log_u"], d_log_u=r["d_log_u"],
                 d_fprime_fwd=r["d_fprime0"], d_fprime_rev=-r["d_uprime_over_u"])
    return BondSolution(
        mu=mu, u_at_L=u, fprime_origin_fwd=r["fprime0"],
        fprime_origin_rev=-r["uprime_over_u"], fprime_end=-math.exp(-log_u),
        wronskian_residual=0.0, log_abs_u=log_u, v_at_L=vL, uprime_at_L=upL,
        vprime_at_L=vL * r["uprime_over_u"] - math.exp(-log_u),
        flagged=False, mode="riccati", **d,
    )


# -- closed-form oracles -----------------------------------------------------

def oracle_free(length, mu) -> BondSolution:
    """``V = 0``: ``u(x) = sin(kx)/k`` with ``k**2 = mu``, series-safe at ``mu = 0``."""
    mu = energy(mu)
    L = float(length)
    if isinstance(mu, complex) or mu >= 0:
        k = cmath.sqrt(mu)
        kl = k * L
        if abs(kl) < 1e-3:
            x = mu * L * L
            u = L * (1 - x / 6 + x * x / 120 - x ** 3 / 5040)
            up = 1 - x / 2 + x * x / 24 - x ** 3 / 720
            v = up
        else:
            u = cmath.sin(kl) / k
            up = v = cmath.cos(kl)
        u, up, v = (_as_scalar(c) for c in (u, up, v))
        log_u = math.log(abs(u)) if u != 0 else -math.inf
        dmu = None
    else:
        kappa = math.sqrt(-mu)
        a = kappa * L
        if a < 1e-3:
            x = mu * L * L
            u = L * (1 - x / 6 + x * x / 120)
            v = up = 1 - x / 2 + x * x / 24
            log_u = math.log(u)
        else:
            # log(sinh(a)/kappa) without overflow
            log_u = a - math.log(2 * kappa) + math.log1p(-math.exp(-2 * a))
            u = math.exp(log_u) if log_u < 700 else math.inf
            up = v = math.cosh(a) if a < 700 else math.inf
    flagged = _is_flagged(u, up, mu) if np.isfinite(abs(u)) else False
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if isinstance(mu, complex) or mu >= 0:
            fp0 = -v / u if u != 0 else complex("inf")
        else:
            kappa = math.sqrt(-mu)
            a = kappa * L
            fp0 = -kappa / math.tanh(a) if a >= 1e-3 else -v / u
        fend = -1.0 / u if u != 0 else complex("inf")
    fp0 = _as_scalar(fp0)
    return BondSolution(
        mu=mu, u_at_L=u, fprime_origin_fwd=fp0, fprime_origin_rev=fp0,
        fprime_end=_as_scalar(fend), wronskian_residual=0.0, log_abs_u=log_u,
        v_at_L=v, uprime_at_L=up, vprime_at_L=_as_scalar(-mu * u) if np.isfinite(abs(u)) else math.nan,
        u_at_L_rev=u, flagged=flagged, mode="oracle-free",
    )


def oracle_airy(omega: float, length, mu) -> BondSolution:
    """``V = omega x`` through Airy functions (independent of the integrator)."""
    if omega == 0:
        raise ValueError("omega must be nonzero; use oracle_free")
    mu = energy(mu)
    if isinstance(mu, complex):
        raise ValueError("the Airy oracle handles real energies only")
    L = float(length)
    w3 = float(np.cbrt(omega))
    z0 = -mu / (w3 * w3)
    zl = w3 * (L - mu / omega)
    ai0, aip0, bi0, bip0 = airy(z0)
    ail, aipl, bil, bipl = airy(zl)
    u = math.pi / w3 * (ai0 * bil - bi0 * ail)
    up = math.pi * (ai0 * bipl - bi0 * aipl)
    v = math.pi * (bip0 * ail - aip0 * bil)
    vp = math.pi * w3 * (bip0 * aipl - aip0 * bipl)
    flagged = _is_flagged(u, up, mu)
    with np.errstate(divide="ignore"):
        fp0 = -v / u if u != 0 else math.inf
        fprev = -up / u if u != 0 else math.inf
        fend = -1.0 / u if u != 0 else math.inf
    return BondSolution(
        mu=mu, u_at_L=u, fprime_origin_fwd=fp0, fprime_origin_rev=fprev, fprime_end=fend,
        wronskian_residual=0.0, log_abs_u=math.log(abs(u)) if u else -math.inf,
        v_at_L=v, uprime_at_L=up, vprime_at_L=vp, u_at_L_rev=u, flagged=flagged,
        mode="oracle-airy",
    )


def oracle_susy_u(phi: Potential, length) -> float:
    """``u(L; 0)`` for ``V = phi**2 + phi'`` by quadrature of the ground state."""
    pc = phi.phi if phi.phi is not None else phi.coeffs
    Phi = poly_integral(pc)
    L = float(length)
    Phi_c = np.array([float(c) for c in Phi] or [0.0])

    def integrand(y):
        return math.exp(-2.0 * float(poly_eval(Phi_c, y)))

    val, err = integrate.quad(integrand, 0.0, L, epsabs=0.0, epsrel=1e-12, limit=200)
    if not np.isfinite(val) or err > 1e-10 * abs(val):
        raise IntegrationError(f"quadrature did not converge (err={err:.2e})")
    return math.exp(float(poly_eval(Phi_c, L))) * val

