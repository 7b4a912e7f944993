"""Metric graphs and vertex matching conditions.

Bond ends are indexed ``0..B-1`` for the origin ends (``x_b = 0``) followed by
``B..2B-1`` for the terminal ends (``x_b = L_b``).  Every matrix acting on
bond-end data in this package uses that layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .potentials import Potential, as_length, to_fraction

RANK_RTOL = 1e-10
HERMITIAN_RTOL = 1e-12


class StructureError(ValueError):
    """Inconsistent graph or matrix dimensions."""


@dataclass(frozen=True)
class Bond:
    origin: int
    terminus: int
    length: Fraction
    magnetic: float = 0.0
    potential: Potential = field(default_factory=Potential.zero)

    def __post_init__(self):
        object.__setattr__(self, "length", as_length(self.length))
        object.__setattr__(self, "magnetic", float(self.magnetic))
        if self.origin > self.terminus:
            raise StructureError(
                f"bond ({self.origin}, {self.terminus}) must be listed with origin <= terminus")

    @property
    def L(self) -> float:
        return float(self.length)

    @cached_property
    def reversed_potential(self) -> Potential:
        return self.potential.reflect(self.length)


@dataclass(frozen=True)
class MetricGraph:
    vertex_count: int
    bonds: tuple[Bond, ...]

    def __post_init__(self):
        object.__setattr__(self, "bonds", tuple(self.bonds))
        if self.vertex_count < 1:
            raise StructureError("a graph needs at least one vertex")
        if not self.bonds:
            raise StructureError("a graph needs at least one bond")
        for b in self.bonds:
            for v in (b.origin, b.terminus):
                if not 1 <= v <= self.vertex_count:
                    raise StructureError(f"vertex {v} out of range 1..{self.vertex_count}")

    @classmethod
    def build(cls, vertex_count: int, bonds: Sequence) -> "MetricGraph":
        """Convenience constructor from ``(o, t, L[, A[, potential]])`` tuples."""
        out = []
        for b in bonds:
            if isinstance(b, Bond):
                out.append(b)
                continue
            o, t, L, *rest = b
            A = rest[0] if rest else 0.0
            V = rest[1] if len(rest) > 1 else Potential.zero()
            if o > t:
                o, t, A = t, o, -A
                if V.degree > 0:
                    V = V.reflect(L)
            out.append(Bond(o, t, L, A, V))
        return cls(vertex_count, tuple(out))

    @property
    def B(self) -> int:
        return len(self.bonds)

    @property
    def V(self) -> int:
        return self.vertex_count

    @property
    def total_length(self) -> Fraction:
        return sum((b.length for b in self.bonds), Fraction(0))

    @property
    def lengths(self) -> np.ndarray:
        return np.array([b.L for b in self.bonds])

    def end_vertex(self, end: int) -> int:
        B = self.B
        return self.bonds[end].origin if end < B else self.bonds[end - B].terminus

    def ends_at(self, vertex: int) -> list[int]:
        return [e for e in range(2 * self.B) if self.end_vertex(e) == vertex]

    def valency(self, vertex: int) -> int:
        return len(self.ends_at(vertex))

    @property
    def valencies(self) -> dict[int, int]:
        return {v: self.valency(v) for v in range(1, self.V + 1)}

    def to_json(self) -> dict:
        return {
            "vertices": self.V,
            "bonds": [
                {"from": b.origin, "to": b.terminus, "length": str(b.length),
                 "magnetic": b.magnetic, "potential": b.potential.to_json()}
                for b in self.bonds
            ],
        }


# -- matching conditions -----------------------------------------------------

ExactEntry = tuple[Fraction, Fraction]
ExactMatrix = tuple[tuple[ExactEntry, ...], ...]


def _exact_entry(x) -> ExactEntry:
    if isinstance(x, (list, tuple)):
        re, im = x
        return to_fraction(re), to_fraction(im)
    if isinstance(x, (complex, np.complexfloating)):
        return Fraction(float(x.real)), Fraction(float(x.imag))
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x)), Fraction(0)
    return to_fraction(x), Fraction(0)


def _exact_matrix(m) -> ExactMatrix:
    if isinstance(m, np.ndarray):
        m = m.tolist()
    rows = tuple(tuple(_exact_entry(x) for x in row) for row in m)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise StructureError("matching matrices must be square")
    return rows


def _to_numpy(m: ExactMatrix) -> np.ndarray:
    return np.array([[complex(float(re), float(im)) for re, im in row] for row in m],
                    dtype=complex).reshape(len(m), len(m))


@dataclass(frozen=True)
class MatchingConditions:
    """The pair ``(A, B)`` in ``A phi + B phi_hat = 0``.

    Entries are held exactly (as rational real/imaginary pairs) so that the
    large-``t`` asymptotics can be expanded without rounding; floats are
    converted through their exact binary value.
    """

    a_exact: ExactMatrix
    b_exact: ExactMatrix
    permutation: tuple[int, ...] | None = None
    kind: str = "explicit"
    coupling: tuple[tuple[int, Fraction], ...] | None = None

    @classmethod
    def from_matrices(cls, a, b, *, kind: str = "explicit", permutation=None,
                      coupling=None) -> "MatchingConditions":
        ae, be = _exact_matrix(a), _exact_matrix(b)
        if len(ae) != len(be):
            raise StructureError("A and B must have the same shape")
        return cls(ae, be, tuple(permutation) if permutation is not None else None, kind,
                   tuple(coupling) if coupling is not None else None)

    @cached_property
    def matrix_a(self) -> np.ndarray:
        return _to_numpy(self.a_exact)

    @cached_property
    def matrix_b(self) -> np.ndarray:
        return _to_numpy(self.b_exact)

    @property
    def size(self) -> int:
        return len(self.a_exact)

    @property
    def is_real(self) -> bool:
        return all(im == 0 for m in (self.a_exact, self.b_exact) for row in m for _, im in row)

    def to_json(self) -> dict:
        if self.kind == "dirichlet":
            return {"kind": "dirichlet"}
        if self.kind in ("delta", "delta_prime") and self.coupling is not None:
            return {"kind": self.kind, "coupling": {str(v): str(c) for v, c in self.coupling}}

        def enc(m):
            return [[[str(re), str(im)] for re, im in row] for row in m]
        return {"kind": "explicit", "matrix_a": enc(self.a_exact), "matrix_b": enc(self.b_exact)}


@dataclass(frozen=True)
class ValidationReport:
    """``valid`` covers rank and the Hermitian condition; locality is reported apart."""

    valid: bool
    violations: tuple[str, ...] = ()
    rank: int | None = None
    hermitian_residual: float = 0.0
    local: bool | None = None
    warnings: tuple[str, ...] = ()

    def __bool__(self):
        return self.valid


def validate_self_adjoint(mc: MatchingConditions, graph: MetricGraph | None = None
                          ) -> ValidationReport:
    """Check maximal rank, ``A B^+ = B A^+`` and (given a graph) locality."""
    A, Bm = mc.matrix_a, mc.matrix_b
    n = A.shape[0]
    if graph is not None and n != 2 * graph.B:
        raise StructureError(f"matching matrices are {n}x{n}, graph needs {2 * graph.B}")
    if n % 2:
        raise StructureError("matching matrices must have even size 2B")
    violations = []

    X = np.hstack([A, Bm])
    rank = _rank(X)
    if rank < n:
        violations.append(f"rank: rank(A|B) = {rank} < {n}")

    ab, ba = A @ Bm.conj().T, Bm @ A.conj().T
    # relative to |A||B|: AB^+ itself may be small through cancellation
    scale = float(np.linalg.norm(A, 2) * np.linalg.norm(Bm, 2))
    resid = float(np.abs(ab - ba).max())
    if resid > HERMITIAN_RTOL * scale:
        violations.append(f"hermitian: max|AB^+ - BA^+| = {resid:.3e}")

    local, warnings = None, []
    if graph is not None and rank == n:
        warnings = _locality(X, graph)
        local = not warnings
    return ValidationReport(not violations, tuple(violations), rank, resid, local,
                            tuple(warnings))


def _rank(X: np.ndarray) -> int:
    if X.size == 0:
        return 0
    sv = np.linalg.svd(X, compute_uv=False)
    return int(np.sum(sv > RANK_RTOL * sv[0])) if sv[0] > 0 else 0


def _locality(X: np.ndarray, graph: MetricGraph) -> list[str]:
    """Does the row space of ``(A|B)`` split into pieces supported at single vertices?

    The part of the row space supported on the columns of vertex ``v`` has
    dimension ``2B - rank(X without those columns)``; the conditions are local
    iff these dimensions add up to ``2B``.  Invariant under ``(A, B) -> (UA, UB)``.
    """
    n = X.shape[0]
    total = 0
    dims = {}
    for v in range(1, graph.V + 1):
        ends = graph.ends_at(v)
        cols = set(ends) | {e + n for e in ends}
        rest = [c for c in range(2 * n) if c not in cols]
        dims[v] = n - _rank(X[:, rest])
        total += dims[v]
    if total == n:
        return []
    short = [v for v in dims if dims[v] < graph.valency(v)]
    return [f"locality: conditions couple different vertices (vertices {short} "
            "are not closed under their own conditions)"]


def build_dirichlet(graph: MetricGraph) -> MatchingConditions:
    n = 2 * graph.B
    return MatchingConditions.from_matrices(np.eye(n, dtype=int), np.zeros((n, n), dtype=int),
                                            kind="dirichlet")


def _vertex_blocks(graph: MetricGraph, coupling: Mapping[int, object], value_rows: bool):
    n = 2 * graph.B
    A = [[Fraction(0)] * n for _ in range(n)]
    Bm = [[Fraction(0)] * n for _ in range(n)]
    perm: list[int] = []
    used: list[tuple[int, Fraction]] = []
    for v in range(1, graph.V + 1):
        ends = graph.ends_at(v)
        if not ends:
            raise StructureError(f"vertex {v} has no attached bond ends")
        lam = to_fraction(coupling.get(v, coupling.get(str(v), 0)))
        used.append((v, lam))
        # block rows reuse the block's column indices, so the relabeling
        # permutation acts symmetrically and leaves determinants unchanged
        cont, flux = (A, Bm) if value_rows else (Bm, A)
        r0 = ends[0]
        cont[r0][ends[0]] = -lam
        for e in ends:
            flux[r0][e] = Fraction(1)
        for i in range(1, len(ends)):
            r = ends[i]
            cont[r][ends[i - 1]] = Fraction(-1)
            cont[r][ends[i]] = Fraction(1)
        perm.extend(ends)
    return A, Bm, perm, tuple(used)


def build_delta(graph: MetricGraph, coupling: Mapping[int, object] | None = None
                ) -> MatchingConditions:
    """Continuity plus ``sum of inward derivatives = lambda_v * value`` at each vertex."""
    A, Bm, perm, used = _vertex_blocks(graph, coupling or {}, value_rows=True)
    return MatchingConditions.from_matrices(A, Bm, kind="delta", permutation=perm, coupling=used)


def build_delta_prime(graph: MetricGraph, coupling: Mapping[int, object] | None = None
                      ) -> MatchingConditions:
    """Continuous derivative plus ``sum of values = mu_v * derivative`` at each vertex."""
    A, Bm, perm, used = _vertex_blocks(graph, coupling or {}, value_rows=False)
    return MatchingConditions.from_matrices(A, Bm, kind="delta_prime", permutation=perm,
                                            coupling=used)


DET_TOL = 1e-12


def transform_conditions(mc: MatchingConditions, u_matrix) -> MatchingConditions:
    """``(A, B) -> (U A, U B)``; describes the same operator for invertible ``U``."""
    ue = _exact_matrix(u_matrix)
    if len(ue) != mc.size:
        raise StructureError("U must match the size of the matching matrices")
    d = abs(np.linalg.det(_to_numpy(ue)))
    if d < DET_TOL:
        raise ValueError(f"transformation matrix is singular: |det U| = {d:.3e}")
    return MatchingConditions(_matmul_exact(ue, mc.a_exact), _matmul_exact(ue, mc.b_exact))


def _matmul_exact(x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
    n = len(x)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            re = im = Fraction(0)
            for k in range(n):
                a, b = x[i][k]
                c, d = y[k][j]
                if (a or b) and (c or d):
                    re += a * c - b * d
                    im += a * d + b * c
            row.append((re, im))
        out.append(tuple(row))
    return tuple(out)


def conditions_from_json(spec: Mapping, graph: MetricGraph) -> MatchingConditions:
    kind = spec.get("kind", "dirichlet")
    coupling = {int(k): v for k, v in (spec.get("coupling") or {}).items()}
    if kind == "dirichlet":
        return build_dirichlet(graph)
    if kind == "delta":
        return build_delta(graph, coupling)
    if kind == "delta_prime":
        return build_delta_prime(graph, coupling)
    if kind == "explicit":
        return MatchingConditions.from_matrices(spec["matrix_a"], spec["matrix_b"])
    raise ValueError(f"unknown condition kind {kind!r}")


def graph_from_json(spec: Mapping) -> tuple[MetricGraph, MatchingConditions]:
    bonds = []
    for i, b in enumerate(spec["bonds"]):
        try:
            bonds.append(Bond(int(b["from"]), int(b["to"]), b["length"],
                              float(b.get("magnetic", 0.0)),
                              Potential.from_json(b.get("potential"))))
        except KeyError as exc:
            raise KeyError(f"bonds[{i}].{exc.args[0]}") from exc
    graph = MetricGraph(int(spec["vertices"]), tuple(bonds))
    mc = conditions_from_json(spec.get("conditions", {"kind": "dirichlet"}), graph)
    return graph, mc


def graph_to_json(graph: MetricGraph, mc: MatchingConditions | None = None) -> dict:
    out = graph.to_json()
    if mc is not None:
        out["conditions"] = mc.to_json()
    return out
