"""Exact polynomial potentials on a single bond.

Potentials are polynomials with rational coefficients, stored in ascending
degree.  A supersymmetric potential ``phi**2 + phi'`` is kept in factored form
until it is expanded.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Iterable, Sequence, Union

import numpy as np

Rational = Union[int, Fraction, str]
Coeffs = tuple[Fraction, ...]


def to_fraction(value) -> Fraction:
    """Exact conversion; strings may be decimals or ``"p/q"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, float)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational number")


# -- coefficient-list arithmetic ---------------------------------------------

def _trim(c: Iterable[Fraction]) -> Coeffs:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Coeffs:
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def poly_scale(a: Sequence[Fraction], k) -> Coeffs:
    return _trim(x * k for x in a)


def poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> Coeffs:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def poly_deriv(a: Sequence[Fraction]) -> Coeffs:
    return _trim(i * a[i] for i in range(1, len(a)))


def poly_integral(a: Sequence[Fraction]) -> Coeffs:
    """Antiderivative vanishing at 0."""
    if not a:
        return ()
    return _trim([Fraction(0)] + [a[i] / (i + 1) for i in range(len(a))])


def poly_eval(a: Sequence, x):
    acc = 0 * x
    for c in reversed(a):
        acc = acc * x + c
    return acc


def poly_reflect(a: Sequence[Fraction], length: Fraction) -> Coeffs:
    """Coefficients of ``p(length - x)``."""
    out = [Fraction(0)] * len(a)
    for n, c in enumerate(a):
        if c == 0:
            continue
        # c * (L - x)^n = c * sum_k C(n,k) L^(n-k) (-x)^k
        for k in range(n + 1):
            out[k] += c * comb(n, k) * length ** (n - k) * (-1) ** k
    return _trim(out)


# -- public type -------------------------------------------------------------

@dataclass(frozen=True)
class Potential:
    """Scalar potential ``V(x)`` on one bond.

    ``kind`` is ``"zero"``, ``"poly"`` or ``"susy"``.  For ``"susy"`` the
    superpotential coefficients are kept in ``phi`` and ``coeffs`` holds the
    expansion ``phi**2 + phi'``.  Equality and hashing use the expanded
    coefficients, so ``Potential.zero() == Potential.poly([])``.
    """

    coeffs: Coeffs = ()
    phi: Coeffs | None = None

    @classmethod
    def zero(cls) -> "Potential":
        return cls(())

    @classmethod
    def poly(cls, coeffs: Iterable[Rational]) -> "Potential":
        return cls(_trim(to_fraction(c) for c in coeffs))

    @classmethod
    def susy(cls, phi: "Potential | Iterable[Rational]") -> "Potential":
        pc = phi.coeffs if isinstance(phi, Potential) else _trim(to_fraction(c) for c in phi)
        return cls(poly_add(poly_mul(pc, pc), poly_deriv(pc)), pc)

    @property
    def kind(self) -> str:
        if self.phi is not None:
            return "susy"
        return "poly" if self.coeffs else "zero"

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other):
        if not isinstance(other, Potential):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if self.phi is not None:
            return f"Potential.susy({[str(c) for c in self.phi]})"
        return f"Potential.poly({[str(c) for c in self.coeffs]})"

    def expand(self) -> "Potential":
        """Plain polynomial form (drops the superpotential)."""
        return Potential(self.coeffs)

    @cached_property
    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs] or [0.0])

    def __call__(self, x):
        return evaluate(self, x)

    def derivative(self) -> "Potential":
        return derivative(self)

    def reflect(self, length) -> "Potential":
        return reflect(self, length)

    def min_on(self, length: float) -> float:
        """Minimum of V over ``[0, length]`` (float)."""
        c = self.float_coeffs
        if len(c) <= 1:
            return float(c[0])
        crit = np.roots(np.polyder(c[::-1]))
        xs = [0.0, float(length)]
        xs += [r.real for r in crit if abs(r.imag) < 1e-12 and 0 < r.real < length]
        return float(min(np.polyval(c[::-1], x) for x in xs))

    def to_json(self) -> dict:
        if self.phi is not None:
            return {"kind": "susy", "phi": {"coeffs": [str(c) for c in self.phi]}}
        if not self.coeffs:
            return {"kind": "zero"}
        return {"kind": "poly", "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, spec: dict | None) -> "Potential":
        if spec is None:
            return cls.zero()
        kind = spec.get("kind", "poly")
        if kind == "zero":
            return cls.zero()
        if kind == "poly":
            return cls.poly(spec.get("coeffs", []))
        if kind == "susy":
            phi = spec.get("phi", {})
            return cls.susy(phi.get("coeffs", []) if isinstance(phi, dict) else phi)
        raise ValueError(f"unknown potential kind {kind!r}")


def evaluate(v: Potential, x):
    """Horner evaluation.  Rational ``x`` gives an exact result."""
    if isinstance(x, (int, Fraction)):
        return poly_eval(v.coeffs, Fraction(x))
    return float(poly_eval(v.float_coeffs, x)) if np.isscalar(x) else poly_eval(v.float_coeffs, x)


def derivative(v: Potential) -> Potential:
    return Potential(poly_deriv(v.coeffs))


def reflect(v: Potential, length) -> Potential:
    """The potential seen from the other end, ``V(length - x)``.

    Floats are read by their shortest decimal spelling.  Lengths that are
    not rational (non-finite floats, symbolic values) raise ``ValueError``
    for non-constant potentials.
    """
    L = as_length(length)
    if v.degree <= 0:
        return v.expand()
    return Potential(poly_reflect(v.coeffs, L))


def as_length(length) -> Fraction:
    if isinstance(length, float):
        if not np.isfinite(length):
            raise ValueError(f"bond length {length!r} is not a rational number")
        length = repr(length)
    try:
        L = to_fraction(length)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bond length {length!r} is not a rational number") from exc
    if L <= 0:
        raise ValueError("length must be positive")
    return L


def susy_to_potential(phi: Potential) -> Potential:
    """Expand ``phi**2 + phi'`` exactly."""
    return Potential.susy(phi).expand()
