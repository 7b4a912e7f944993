"""The bond matrix M, the secular function F and the eigenvalue search.

With ``phi_hat = M phi`` expressing inward derivatives through end values,
the vertex conditions ``A phi + B phi_hat = 0`` reduce to
``F(z) = det(A + B M(mu = z**2)) = 0``.  ``F`` has poles where a single bond
has a Dirichlet eigenvalue, so the eigenvalue search works instead with the
boundary-data pencil ``H(k)`` in the ``(alpha, beta)`` coordinates of
``psi_b = alpha_b v_b + beta_b u_b``.  ``H`` is entire in ``k`` and its null
space is in one-to-one correspondence with the eigenspace, so its nullity is
the multiplicity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .graph import MatchingConditions, MetricGraph
from .interval import BondSolution, energy, solve_bond

NULL_RTOL = 1e-8
REFINE_XTOL = 1e-12


class PoleError(ArithmeticError):
    """``F`` was requested at a Dirichlet eigenvalue of some bond."""


@lru_cache(maxsize=65536)
def cached_bond(potential, length: float, mu, reversed_potential, sensitivities: bool,
          reverse: bool) -> BondSolution:
    return solve_bond(potential, length, mu, sensitivities=sensitivities, reverse=reverse,
                      reversed_potential=reversed_potential)


def bond_solutions(graph: MetricGraph, mu, *, sensitivities: bool = False,
                   reverse: bool = True) -> list[BondSolution]:
    mu = energy(mu)
    return [cached_bond(b.potential, b.L, mu, b.reversed_potential if reverse else None,
                  sensitivities, reverse) for b in graph.bonds]


def _phases(graph: MetricGraph) -> np.ndarray:
    return np.array([cmath.exp(1j * b.magnetic * b.L) for b in graph.bonds])


@dataclass(frozen=True)
class MMatrix:
    matrix: np.ndarray
    mu: complex | float
    solutions: tuple[BondSolution, ...] = field(repr=False)

    @property
    def flagged(self) -> bool:
        return any(s.flagged for s in self.solutions)


def build_m(graph: MetricGraph, mu, *, reverse: bool = True) -> MMatrix:
    """``M`` at energy ``mu``.  Entries at flagged bonds are not finite."""
    sols = bond_solutions(graph, mu, reverse=reverse)
    B = graph.B
    M = np.zeros((2 * B, 2 * B), dtype=complex)
    ph = _phases(graph)
    for b, s in enumerate(sols):
        M[b, b] = s.fprime_origin_fwd
        M[b + B, b + B] = s.fprime_origin_rev
        # f'_b(L) = f'_bbar(L) = -1/u(L)
        M[b + B, b] = -s.fprime_end * ph[b]
        M[b, b + B] = -s.fprime_end * np.conj(ph[b])
    return MMatrix(M, energy(mu), tuple(sols))


def _mu_of_z(z) -> complex | float:
    return energy(complex(z) * complex(z))


def secular_value(graph: MetricGraph, mc: MatchingConditions, z) -> complex:
    """``F(z) = det(A + B M(z**2))``."""
    m = build_m(graph, _mu_of_z(z), reverse=False)
    if m.flagged:
        raise PoleError(f"F has a pole near z={z!r} (bond Dirichlet eigenvalue); "
                        "use regularized_secular")
    return complex(np.linalg.det(mc.matrix_a + mc.matrix_b @ m.matrix))


def secular_imaginary(graph: MetricGraph, mc: MatchingConditions, t: float
                      ) -> tuple[complex, complex]:
    """``F(it)`` and ``d/dt log F(it)`` for real ``t > 0``.

    The derivative uses Jacobi's formula with the energy sensitivities of the
    bond solutions, ``dmu/dt = -2t``.
    """
    mu = -float(t) ** 2
    sols = bond_solutions(graph, mu, sensitivities=True, reverse=False)
    B = graph.B
    ph = _phases(graph)
    M = np.zeros((2 * B, 2 * B), dtype=complex)
    dM = np.zeros_like(M)
    for b, s in enumerate(sols):
        if s.flagged:
            raise PoleError(f"F(it) has a pole near t={t!r}")
        inv_u = math.exp(-s.log_abs_u) * (1.0 if s.u_at_L > 0 else -1.0)
        M[b, b] = s.fprime_origin_fwd
        M[b + B, b + B] = s.fprime_origin_rev
        M[b + B, b] = inv_u * ph[b]
        M[b, b + B] = inv_u * np.conj(ph[b])
        dM[b, b] = s.d_fprime_fwd
        dM[b + B, b + B] = s.d_fprime_rev
        d_inv = -inv_u * s.d_log_u
        dM[b + B, b] = d_inv * ph[b]
        dM[b, b + B] = d_inv * np.conj(ph[b])
    X = mc.matrix_a + mc.matrix_b @ M
    F = complex(np.linalg.det(X))
    dX = mc.matrix_b @ dM * (-2.0 * t)
    dlog = complex(np.trace(np.linalg.solve(X, dX)))
    return F, dlog


def regularized_secular(graph: MetricGraph, mc: MatchingConditions, k: float) -> complex:
    """``det(A diag(u) + B M diag(u))`` with both columns of bond ``b`` scaled by ``u_b(L)``.

    Equal to ``F(k) * prod_b u_b(L)**2`` and finite at every real ``k``.
    """
    mu = energy(float(k) ** 2)
    sols = bond_solutions(graph, mu, reverse=False)
    B = graph.B
    ph = _phases(graph)
    Mu = np.zeros((2 * B, 2 * B), dtype=complex)
    D = np.zeros(2 * B)
    for b, s in enumerate(sols):
        Mu[b, b] = -s.v_at_L
        Mu[b + B, b + B] = -s.uprime_at_L
        Mu[b + B, b] = ph[b]
        Mu[b, b + B] = np.conj(ph[b])
        D[b] = D[b + B] = s.u_at_L
    return complex(np.linalg.det(mc.matrix_a * D + mc.matrix_b @ Mu))


def boundary_pencil(graph: MetricGraph, mc: MatchingConditions, k: float) -> np.ndarray:
    """``H(k)`` in the basis ``(v_b, s u_b)`` with ``s = max(1, |k|)``.

    Columns ``0..B-1`` multiply ``v_b`` and ``B..2B-1`` multiply ``s u_b``.
    """
    k = float(k)
    sols = bond_solutions(graph, energy(k * k), reverse=False)
    B = graph.B
    A, Bm = mc.matrix_a, mc.matrix_b
    ph = _phases(graph)
    sc = max(1.0, abs(k))
    H = np.empty((2 * B, 2 * B), dtype=complex)
    for b, s in enumerate(sols):
        a_o, a_t = A[:, b], A[:, b + B]
        b_o, b_t = Bm[:, b], Bm[:, b + B]
        e = ph[b]
        H[:, b] = a_o + e * (s.v_at_L * a_t - s.vprime_at_L * b_t)
        H[:, b + B] = sc * (b_o + e * (s.u_at_L * a_t - s.uprime_at_L * b_t))
    return H


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ``E = k**2`` in ``[0, k_max**2]`` with multiplicities."""

    levels: tuple[tuple[float, int], ...]
    k_max: float
    residuals: tuple[float, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def energies(self) -> list[float]:
        return [E for E, m in self.levels for _ in range(m)]

    @property
    def wavenumbers(self) -> list[float]:
        return [math.sqrt(E) for E, _ in self.levels]

    def __len__(self):
        return len(self.levels)


def _ratio_and_sv(graph, mc, k):
    sv = np.linalg.svd(boundary_pencil(graph, mc, k), compute_uv=False)
    return sv[-1] / sv[0], sv


def null_dimension(graph: MetricGraph, mc: MatchingConditions, k: float,
                   rtol: float = NULL_RTOL) -> int:
    _, sv = _ratio_and_sv(graph, mc, k)
    return int(np.sum(sv < rtol * sv[0]))


def default_grid_step(graph: MetricGraph, k_max: float) -> float:
    step = math.pi / (8.0 * float(graph.lengths.max()))
    return max(1e-4, min(step, 1e-2 * k_max))


def _refine(f, lo: float, hi: float, guess: float) -> float:
    """Minimize ``f`` on ``[lo, hi]``: Brent to ~1e-8, then golden section to ``REFINE_XTOL``.

    The bounded Brent stage stops at a relative width of about ``sqrt(eps)``,
    which is too coarse for eigenvalues, hence the absolute-tolerance polish.
    """
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    x = float(res.x) if res.fun <= f(guess) else float(guess)
    w = 1e-6 * max(1.0, abs(x))
    a, b = max(lo, x - w), min(hi, x + w)
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > REFINE_XTOL * max(1.0, abs(x)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def find_eigenvalues(graph: MetricGraph, mc: MatchingConditions, k_max: float,
                     grid_step: float | None = None, rtol: float = NULL_RTOL) -> Spectrum:
    """Scan ``sigma_min(H)/sigma_max(H)`` on a ``k`` grid and refine its dips."""
    if k_max <= 0:
        raise ValueError("k_max must be positive")
    dk = grid_step or default_grid_step(graph, k_max)
    n = max(3, int(math.ceil(k_max / dk)) + 1)
    ks = np.linspace(0.0, k_max, n)
    r = np.array([_ratio_and_sv(graph, mc, k)[0] for k in ks])

    candidates = []
    if null_dimension(graph, mc, 0.0, rtol) > 0:
        candidates.append(0.0)
    for i in range(n):
        left = r[i - 1] if i > 0 else math.inf
        right = r[i + 1] if i < n - 1 else math.inf
        if r[i] <= left and r[i] <= right and i > 0:
            lo, hi = ks[i - 1], ks[min(i + 1, n - 1)]
            candidates.append(_refine(lambda k: _ratio_and_sv(graph, mc, k)[0], lo, hi, ks[i]))

    levels: list[tuple[float, int]] = []
    residuals: list[float] = []
    warnings: list[str] = []
    for kk in sorted(candidates):
        if kk > k_max:
            continue
        ratio, sv = _ratio_and_sv(graph, mc, kk)
        mult = int(np.sum(sv < rtol * sv[0]))
        if mult == 0:
            continue
        if levels and abs(kk - math.sqrt(levels[-1][0])) < 1e-8 * max(1.0, kk):
            if mult > levels[-1][1]:
                levels[-1] = (kk * kk, mult)
                residuals[-1] = float(ratio)
            continue
        if levels and abs(kk - math.sqrt(levels[-1][0])) < 1e-6 * max(1.0, kk):
            warnings.append(f"roots near k={kk:.10g} are barely resolved")
        levels.append((kk * kk, mult))
        residuals.append(float(ratio))
    return Spectrum(tuple(levels), float(k_max), tuple(residuals), tuple(warnings))
