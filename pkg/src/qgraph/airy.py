"""Airy functions Ai, Ai', Bi, Bi' of a real argument.

Maclaurin series in extended-precision decimal arithmetic for ``|z| <= 10``
(the cancellation in Ai for positive ``z`` costs about ``1.2 |z|**1.5``
decimal digits), and the classical asymptotic expansions beyond, truncated at
the smallest term.  Kept separate from the ODE code so it can serve as an
independent reference.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext

SERIES_RADIUS = 10.0
_DIGITS = 60

# Ai(0) and -Ai'(0)
C1 = Decimal("0.355028053887817239260063186004183176397979174199177")
C2 = Decimal("0.258819403792806798405183560189203963479091138354934")


def _series(z: float) -> tuple[float, float, float, float]:
    with localcontext() as ctx:
        ctx.prec = _DIGITS
        x = Decimal(repr(z))
        x3 = x * x * x
        eps = Decimal(10) ** (-_DIGITS + 5)
        # f = sum 3^k (1/3)_k x^{3k}/(3k)!, g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!
        tf, tg = Decimal(1), x
        pf, pg = Decimal(0), Decimal(1)      # derivative terms
        f, g, fp, gp = tf, tg, pf, pg
        pf = x * x / 2
        fp += pf
        k = 0
        while True:
            tf = tf * x3 / ((3 * k + 2) * (3 * k + 3))
            tg = tg * x3 / ((3 * k + 3) * (3 * k + 4))
            pg = pg * x3 / ((3 * k + 1) * (3 * k + 3))
            f += tf
            g += tg
            gp += pg
            if k >= 1:
                pf = pf * x3 / ((3 * k) * (3 * k + 2))
                fp += pf
            k += 1
            big = max(abs(f), abs(g), abs(fp), abs(gp), Decimal(1))
            if k > 3 and max(abs(tf), abs(tg), abs(pf), abs(pg)) < eps * big:
                break
        s3 = Decimal(3).sqrt()
        ai = C1 * f - C2 * g
        aip = C1 * fp - C2 * gp
        bi = s3 * (C1 * f + C2 * g)
        bip = s3 * (C1 * fp + C2 * gp)
        return float(ai), float(aip), float(bi), float(bip)


def _uv(n: int) -> tuple[list[float], list[float]]:
    u = [1.0]
    for k in range(1, n):
        # u_k = (2k+1)(2k+3)...(6k-1) / (216^k k!)
        prod = 1.0
        for m in range(2 * k + 1, 6 * k, 2):
            prod *= m
        u.append(prod / (216.0 ** k * math.factorial(k)))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, n)]
    return u, v


_U, _V = _uv(40)


def _truncated(coeffs, zeta, alternate: bool, start: int = 0, step: int = 1) -> float:
    """Sum ``coeffs[k] zeta**-k`` over ``k = start, start+step, ...`` up to the smallest term."""
    total = 0.0
    last = math.inf
    sign = 1.0
    for k in range(start, len(coeffs), step):
        term = coeffs[k] * zeta ** (-k)
        if abs(term) > last:
            break
        total += sign * term
        last = abs(term)
        if alternate:
            sign = -sign
    return total


def _asymptotic(z: float) -> tuple[float, float, float, float]:
    if z > 0:
        zeta = 2.0 / 3.0 * z ** 1.5
        if zeta > 700.0:
            raise ValueError(f"Airy argument {z} is outside the double-precision range")
        q = z ** 0.25
        sp = math.sqrt(math.pi)
        em, ep = math.exp(-zeta), math.exp(zeta)
        ai = em / (2 * sp * q) * _truncated(_U, zeta, True)
        aip = -q * em / (2 * sp) * _truncated(_V, zeta, True)
        bi = ep / (sp * q) * _truncated(_U, zeta, False)
        bip = q * ep / sp * _truncated(_V, zeta, False)
        return ai, aip, bi, bip
    x = -z
    zeta = 2.0 / 3.0 * x ** 1.5
    q = x ** 0.25
    sp = math.sqrt(math.pi)
    s, c = math.sin(zeta + math.pi / 4), math.cos(zeta + math.pi / 4)
    ue = _truncated(_U, zeta, True, 0, 2)
    uo = _truncated(_U, zeta, True, 1, 2)
    ve = _truncated(_V, zeta, True, 0, 2)
    vo = _truncated(_V, zeta, True, 1, 2)
    ai = (s * ue - c * uo) / (sp * q)
    aip = -q * (c * ve + s * vo) / sp
    bi = (c * ue + s * uo) / (sp * q)
    bip = q * (s * ve - c * vo) / sp
    return ai, aip, bi, bip


def airy(z: float) -> tuple[float, float, float, float]:
    """Return ``(Ai(z), Ai'(z), Bi(z), Bi'(z))``."""
    z = float(z)
    if not math.isfinite(z):
        raise ValueError("Airy functions need a finite argument")
    if abs(z) <= SERIES_RADIUS:
        return _series(z)
    return _asymptotic(z)
