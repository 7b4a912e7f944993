"""Large-``t`` expansion of ``F(it)`` in exact arithmetic.

On the imaginary axis the bond matrix approaches ``-t I + D(t)`` up to
exponentially small terms, where ``D`` is diagonal and built from the Riccati
coefficients ``s_j(0)`` of each directed bond.  The determinant

    det(A + B(-t I + D(t))) = sum_j c_j t^(2B - j)

is expanded exactly by multilinearity in the columns: the coefficient of
``prod_{i in S} d_i`` is the minor with the columns in ``S`` taken from ``B``.
The first nonzero ``c_N`` and the order ``P`` of the zero of ``F`` at the
origin normalize the spectral determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from .graph import MatchingConditions, MetricGraph
from .potentials import Potential, poly_add, poly_deriv, poly_eval, poly_integral, poly_mul, poly_scale

DEFAULT_EXTRA = 8
MAX_EXTRA = 64
P_TOL = 1e-10
P_SLOPE_TOL = 0.05
P_GAMMAS = (1e-3, 1e-4, 1e-5, 1e-6, 1e-7)


class UndeterminedProfile(ArithmeticError):
    """The normalization data could not be established."""


# -- Riccati coefficients ----------------------------------------------------

@dataclass(frozen=True)
class SeriesCoefficients:
    """``s_j(x)`` for ``j = -1..J`` (``polys[j + 1]``) on one branch.

    ``S(x) = sum_j s_j(x) t**-j`` solves ``S' = t**2 + V - S**2``; the ``-``
    branch (``s_{-1} = -1``) is the decaying one that gives ``f'(0)``.
    """

    polys: tuple[tuple[Fraction, ...], ...]
    branch: str = "-"

    @property
    def order(self) -> int:
        return len(self.polys) - 2

    def __getitem__(self, j: int) -> tuple[Fraction, ...]:
        if j < -1:
            raise IndexError(j)
        return self.polys[j + 1]

    def at(self, x) -> list[Fraction]:
        """``[s_{-1}(x), s_0(x), ..., s_J(x)]`` exactly."""
        x = Fraction(x)
        return [poly_eval(p, x) if p else Fraction(0) for p in self.polys]

    def residual(self, v: Potential) -> list[tuple[Fraction, ...]]:
        """Coefficients of ``t**2 + V - S**2 - S'`` for powers ``t**2 .. t**(1-J)``."""
        J = self.order
        out = []
        for n in range(-2, J):
            # coefficient of t**-n
            acc: tuple = ()
            if n == -2:
                acc = (Fraction(1),)
            if n == 0:
                acc = poly_add(acc, v.coeffs)
            for a in range(-1, n + 2):
                b = n - a
                if -1 <= b <= J and a <= J:
                    acc = poly_add(acc, poly_scale(poly_mul(self[a], self[b]), -1))
            if n >= -1:
                acc = poly_add(acc, poly_scale(poly_deriv(self[n]), -1))
            out.append(acc)
        return out


@lru_cache(maxsize=1024)
def _s_polys(coeffs: tuple, J: int, sign: int) -> tuple:
    s = [(Fraction(sign),), ()]
    two_lead = 2 * sign
    for n in range(0, J):
        acc = poly_deriv(s[n + 1])
        for k in range(0, n + 1):
            acc = poly_add(acc, poly_mul(s[k + 1], s[n - k + 1]))
        if n == 0:
            acc = poly_add(acc, poly_scale(coeffs, -1))
        # 2 s_{-1} s_{n+1} = V delta_{n0} - s_n' - sum_{k=0}^{n} s_k s_{n-k}
        s.append(poly_scale(acc, Fraction(-1, two_lead)))
    return tuple(tuple(p) for p in s[: J + 2])


def s_coefficients(v: Potential, order: int, branch: str = "-") -> SeriesCoefficients:
    """Exact ``s_j`` polynomials, ``j = -1..order``."""
    if order < 1:
        raise ValueError("order must be at least 1")
    if branch not in "+-" or len(branch) != 1:
        raise ValueError("branch must be '+' or '-'")
    return SeriesCoefficients(_s_polys(v.coeffs, order, -1 if branch == "-" else 1), branch)


def fprime_asymptotic(v: Potential, order: int, t: float) -> float:
    """Truncated ``f'(0; -t**2) ~ -t + sum_{j=1}^{J} s_j(0) t**-j``."""
    if t <= 0:
        raise ValueError("t must be positive")
    vals = s_coefficients(v, order).at(0)
    return -t + sum(float(c) * t ** -j for j, c in enumerate(vals[2:], start=1))


def _log1p_series(w: Sequence, n: int) -> list:
    """Coefficients of ``log(1 + w)`` where ``w[0] == 0``, through index ``n``."""
    zero = w[0] * 0 if len(w) else 0
    out = [zero] * (n + 1)
    power = [zero] * (n + 1)
    power[0] = zero + 1
    for k in range(1, n + 1):
        power = _mul_trunc(power, w, n)
        if not any(power):
            break
        factor = Fraction(1 if k % 2 else -1, k)
        for i in range(n + 1):
            if power[i]:
                out[i] += power[i] * factor
    return out


def _mul_trunc(a: Sequence, b: Sequence, n: int) -> list:
    zero = (a[0] if a else 0) * 0
    out = [zero] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if not x:
            continue
        for j, y in enumerate(b[: n + 1 - i]):
            if y:
                out[i + j] += x * y
    return out


def log_u_expansion(v: Potential, length, order: int) -> list[Fraction]:
    """``h_j`` with ``log u(L; -t**2) - tL + log(2t) ~ sum_{j>=1} h_j t**-j``.

    From ``u ~ exp(int_0^L S+) / (S+(0) - S-(0))``; ``S+ - S-`` keeps only
    odd powers, which gives the logarithmic correction.
    """
    L = Fraction(length)
    plus = s_coefficients(v, order + 1, "+")
    h = [Fraction(0)] * (order + 1)
    for j in range(1, order + 1):
        integral = poly_integral(plus[j])
        h[j] = poly_eval(integral, L) if integral else Fraction(0)
    at0 = plus.at(0)
    w = [Fraction(0)] * (order + 1)
    for j in range(1, order, 2):
        w[j + 1] = at0[j + 1]
    corr = _log1p_series(w, order)
    return [h[j] - corr[j] for j in range(order + 1)]


# -- exact complex rationals -------------------------------------------------

@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __add__(self, o):
        o = _gq(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = _gq(o)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o):
        o = _gq(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _gq(o)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero")
        p = self * GaussianRational(o.re, -o.im)
        return GaussianRational(p.re / n, p.im / n)

    def __bool__(self):
        return bool(self.re or self.im)

    def __eq__(self, o):
        try:
            o = _gq(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        return str(self.re) if self.im == 0 else f"{self.re}+{self.im}i".replace("+-", "-")

    def to_json(self):
        return [str(self.re), str(self.im)]


def _gq(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(Fraction(x))
    if isinstance(x, tuple) and len(x) == 2:
        return GaussianRational(Fraction(x[0]), Fraction(x[1]))
    raise TypeError(f"not an exact number: {x!r}")


class _GaussInt:
    """Gaussian integer supporting the exact divisions of Bareiss elimination."""

    __slots__ = ("re", "im")

    def __init__(self, re: int, im: int = 0):
        self.re, self.im = re, im

    def __mul__(self, o):
        return _GaussInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __sub__(self, o):
        return _GaussInt(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return _GaussInt(-self.re, -self.im)

    def __floordiv__(self, o):
        n = o.re * o.re + o.im * o.im
        re = self.re * o.re + self.im * o.im
        im = self.im * o.re - self.re * o.im
        return _GaussInt(re // n, im // n)

    def __bool__(self):
        return bool(self.re or self.im)


def _bareiss(m: list[list]) -> object:
    """Determinant by fraction-free elimination (entries: int or _GaussInt)."""
    n = len(m)
    m = [row[:] for row in m]
    sign = 1
    prev = None
    for k in range(n - 1):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return m[0][0] * 0
        pk = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                x = m[i][j] * pk - m[i][k] * m[k][j]
                m[i][j] = x // prev if prev is not None else x
        prev = pk
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def _integer_matrices(mc: MatchingConditions):
    entries = [e for m in (mc.a_exact, mc.b_exact) for row in m for e in row]
    den = reduce(math.lcm, (x.denominator for e in entries for x in e), 1)
    real = mc.is_real

    def conv(m):
        if real:
            return [[int(re * den) for re, _ in row] for row in m]
        return [[_GaussInt(int(re * den), int(im * den)) for re, im in row] for row in m]

    return conv(mc.a_exact), conv(mc.b_exact), den, real


def column_minors(mc: MatchingConditions) -> dict[int, GaussianRational]:
    """Nonzero ``det`` of ``A`` with the columns in bitmask ``S`` taken from ``B``."""
    A, Bm, den, real = _integer_matrices(mc)
    n = len(A)
    scale = Fraction(1, den ** n)
    out = {}
    for mask in range(1 << n):
        cols = [Bm if mask >> j & 1 else A for j in range(n)]
        mat = [[cols[j][i][j] for j in range(n)] for i in range(n)]
        d = _bareiss(mat)
        if not d:
            continue
        if real:
            out[mask] = GaussianRational(d * scale)
        else:
            out[mask] = GaussianRational(d.re * scale, d.im * scale)
    return out


# -- determinant expansion ---------------------------------------------------

@dataclass(frozen=True)
class LaurentPoly:
    """Finite Laurent expansion in ``t`` valid for exponents ``>= min_exponent``."""

    coeffs: dict = field(default_factory=dict)
    min_exponent: int = 0

    def __getitem__(self, e: int):
        if e < self.min_exponent:
            raise KeyError(f"t**{e} is below the truncation order t**{self.min_exponent}")
        return self.coeffs.get(e, 0)

    def __add__(self, o: "LaurentPoly") -> "LaurentPoly":
        lo = max(self.min_exponent, o.min_exponent)
        out = {}
        for e in set(self.coeffs) | set(o.coeffs):
            if e >= lo:
                c = self.coeffs.get(e, 0) + o.coeffs.get(e, 0)
                if c:
                    out[e] = c
        return LaurentPoly(out, lo)

    def __mul__(self, o: "LaurentPoly") -> "LaurentPoly":
        # error terms: t^(min_a - 1) * lead_b and vice versa
        top_a = max(self.coeffs, default=self.min_exponent)
        top_b = max(o.coeffs, default=o.min_exponent)
        lo = max(self.min_exponent + top_b, o.min_exponent + top_a)
        out: dict = {}
        for ea, ca in self.coeffs.items():
            for eb, cb in o.coeffs.items():
                e = ea + eb
                if e >= lo:
                    out[e] = out.get(e, 0) + ca * cb
        return LaurentPoly({e: c for e, c in out.items() if c}, lo)

    def leading(self):
        """``(exponent, coefficient)`` of the highest nonzero term, or ``None``."""
        if not self.coeffs:
            return None
        e = max(self.coeffs)
        return e, self.coeffs[e]


def diagonal_series(graph: MetricGraph, order: int) -> list[list[Fraction]]:
    """``s_{i,j}(0)`` for ``j = 1..order`` and every directed bond end ``i``."""
    origin, reverse = [], []
    for b in graph.bonds:
        origin.append(s_coefficients(b.potential, order).at(0)[2:])
        reverse.append(s_coefficients(b.reversed_potential, order).at(0)[2:])
    return origin + reverse


def expand_determinant(graph: MetricGraph, mc: MatchingConditions, order: int,
                       minors: dict[int, GaussianRational] | None = None
                       ) -> list[GaussianRational]:
    """``[c_0, ..., c_{order+1}]`` with ``F(it) ~ sum_j c_j t**(2B-j)``.

    Each ``d_i = -t (1 + e_i)`` with ``e_i = -sum_j s_{i,j}(0) t**-(j+1)``;
    the products over ``S`` are accumulated depth-first.
    """
    n = 2 * graph.B
    if minors is None:
        minors = column_minors(mc)
    top = order + 1
    s = diagonal_series(graph, order)
    e = [[Fraction(0)] * 2 + [-c for c in si] for si in s]     # index m: t**-m
    c = [GaussianRational() for _ in range(top + 1)]
    one = [Fraction(1)] + [Fraction(0)] * top
    # prefixes[i]: bit patterns of columns 0..i occurring in some nonzero minor
    prefixes = [{k & ((2 << i) - 1) for k in minors} for i in range(n)]

    def visit(i: int, mask: int, size: int, prod: list):
        if i == n:
            m = minors.get(mask)
            if m is None:
                return
            sign = -1 if size % 2 else 1
            shift = n - size
            for k, p in enumerate(prod):
                j = shift + k
                if j > top:
                    break
                if p:
                    c[j] = c[j] + m * (p * sign)
            return
        if mask in prefixes[i]:
            visit(i + 1, mask, size, prod)
        if mask | (1 << i) in prefixes[i]:
            nxt = prod if not any(e[i]) else _mul_trunc(prod, [1] + e[i][1:], top)
            visit(i + 1, mask | (1 << i), size + 1, nxt)

    visit(0, 0, 0, one)
    return c


def secular_expansion(graph: MetricGraph, mc: MatchingConditions, order: int) -> LaurentPoly:
    """``F(it)`` as a Laurent polynomial in ``t``, exact down to ``t**(2B-order-1)``."""
    cs = expand_determinant(graph, mc, order)
    n = 2 * graph.B
    return LaurentPoly({n - j: c for j, c in enumerate(cs) if c}, n - order - 1)


@dataclass(frozen=True)
class AsymptoticProfile:
    """``F(it) ~ c_N t**(2B-N)`` for large ``t`` and ``F(z) ~ z**(2P)`` near 0."""

    N: int
    c_N: GaussianRational
    P: int
    order: int
    coefficients: tuple[GaussianRational, ...] = ()

    def to_json(self) -> dict:
        return {"N": self.N, "c_N": self.c_N.to_json(), "P": self.P, "truncation_J": self.order,
                "coefficients": [c.to_json() for c in self.coefficients]}


def leading_coefficient(graph: MetricGraph, mc: MatchingConditions, order: int | None = None,
                        *, max_order: int | None = None
                        ) -> tuple[int, GaussianRational, list[GaussianRational], int]:
    """First nonzero ``c_N``, doubling the truncation until it is determined.

    Returns ``(N, c_N, [c_0..c_{J+1}], J)``.
    """
    B = graph.B
    J = order if order is not None else 2 * B + DEFAULT_EXTRA
    cap = max_order if max_order is not None else 2 * B + MAX_EXTRA
    minors = column_minors(mc)
    if not minors:
        raise UndeterminedProfile("A + B(-t + D) vanishes identically")
    while True:
        cs = expand_determinant(graph, mc, J, minors)
        for j, cj in enumerate(cs):
            if cj:
                return j, cj, cs, J
        if J >= cap:
            raise UndeterminedProfile(
                f"c_0..c_{J + 1} all vanish; raise the truncation beyond J={J}")
        J = min(2 * J, cap)


def zero_order_p(graph: MetricGraph, mc: MatchingConditions) -> int:
    """Half the order of the zero of ``F`` at ``z = 0``."""
    from .secular import PoleError, build_m, secular_value

    m = build_m(graph, 0.0, reverse=False)
    if not m.flagged:
        X = mc.matrix_a + mc.matrix_b @ m.matrix
        scale = float(np.prod(np.maximum(np.linalg.norm(X, axis=1), 1e-300)))
        if abs(np.linalg.det(X)) > P_TOL * scale:
            return 0
    gammas = np.array(P_GAMMAS)
    try:
        vals = np.array([abs(secular_value(graph, mc, 1j * math.sqrt(g))) for g in gammas])
    except PoleError as exc:
        raise UndeterminedProfile(f"F has a pole next to z=0: {exc}") from exc
    if np.any(vals == 0):
        raise UndeterminedProfile("F vanishes at a probe point near z=0")
    slope = float(np.polyfit(np.log(gammas), np.log(vals), 1)[0])
    P = round(slope)
    if abs(slope - P) >= P_SLOPE_TOL or P < 1:
        raise UndeterminedProfile(
            f"log|F(i sqrt(gamma))| has slope {slope:.4f} in log(gamma); not an integer order")
    return P


_PROFILE_CACHE: dict = {}


def profile(graph: MetricGraph, mc: MatchingConditions, order: int | None = None
            ) -> AsymptoticProfile:
    """``(N, c_N, P)`` for ``(graph, mc)``, cached by content."""
    key = (graph, mc.a_exact, mc.b_exact, order)
    hit = _PROFILE_CACHE.get(key)
    if hit is not None:
        return hit
    N, cN, cs, J = leading_coefficient(graph, mc, order)
    out = AsymptoticProfile(N, cN, zero_order_p(graph, mc), J, tuple(cs))
    _PROFILE_CACHE[key] = out
    return out
