import json
from fractions import Fraction

import numpy as np
import pytest

from graphs import DELTA_COUPLING, star, mixed_graph as make_graph
from qgraph import (MatchingConditions, MetricGraph, StructureError, build_delta,
                    build_delta_prime, build_dirichlet, graph_from_json, graph_to_json,
                    transform_conditions, validate_self_adjoint)


def test_end_labels_and_valency():
    g = make_graph()
    assert g.B == 5 and g.V == 4
    assert g.end_vertex(0) == 1 and g.end_vertex(5) == 2
    assert g.valencies == {1: 3, 2: 2, 3: 3, 4: 2}


def test_reversed_tuple_is_normalized():
    g = MetricGraph.build(2, [(2, 1, 1, 0.5)])
    assert (g.bonds[0].origin, g.bonds[0].terminus, g.bonds[0].magnetic) == (1, 2, -0.5)


def test_bad_vertex():
    with pytest.raises(StructureError):
        MetricGraph.build(2, [(1, 3, 1)])


@pytest.mark.parametrize("builder", [build_dirichlet,
                                     lambda g: build_delta(g, DELTA_COUPLING),
                                     lambda g: build_delta_prime(g, DELTA_COUPLING)])
def test_builders_are_self_adjoint(builder):
    g = make_graph()
    rep = validate_self_adjoint(builder(g), g)
    assert rep.valid and rep.local, rep.violations


def test_rank_deficient_is_named():
    mc = MatchingConditions.from_matrices([[1, 0], [0, 0]], [[0, 0], [0, 0]])
    rep = validate_self_adjoint(mc)
    assert not rep.valid and rep.violations[0].startswith("rank")


def test_non_hermitian_is_named():
    mc = MatchingConditions.from_matrices([[1, 0], [0, 1]], [[0, 1], [0, 0]])
    rep = validate_self_adjoint(mc)
    assert any(v.startswith("hermitian") for v in rep.violations)


def test_nonlocal_is_named():
    g = MetricGraph.build(3, [(1, 2, 1), (2, 3, 1)])
    # ends 0 (vertex 1) and 3 (vertex 3) glued periodically, Dirichlet at vertex 2
    a = np.array([[1, 0, 0, -1], [0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
    b = np.array([[0, 0, 0, 0], [1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]])
    mc = MatchingConditions.from_matrices(a, b)
    rep = validate_self_adjoint(mc, g)
    assert rep.valid and rep.local is False
    assert rep.warnings[0].startswith("locality")


def test_size_mismatch():
    g = star()
    with pytest.raises(StructureError):
        validate_self_adjoint(build_dirichlet(MetricGraph.build(2, [(1, 2, 1)])), g)


def test_transform_preserves_validity_and_rejects_singular():
    g = make_graph()
    mc = build_delta(g, DELTA_COUPLING)
    u = np.random.default_rng(1).normal(size=(10, 10))
    rep = validate_self_adjoint(transform_conditions(mc, u), g)
    assert rep.valid and rep.local
    with pytest.raises(ValueError):
        transform_conditions(mc, np.zeros((10, 10)))


@pytest.mark.parametrize("kind", ["dirichlet", "delta", "delta_prime", "explicit"])
def test_json_round_trip(kind):
    g = make_graph()
    mc = {"dirichlet": build_dirichlet(g), "delta": build_delta(g, DELTA_COUPLING),
          "delta_prime": build_delta_prime(g, DELTA_COUPLING),
          "explicit": transform_conditions(build_delta(g, DELTA_COUPLING),
                                           np.eye(10) + np.diag(np.full(9, 0.5), 1))}[kind]
    text = json.dumps(graph_to_json(g, mc))
    g2, mc2 = graph_from_json(json.loads(text))
    assert g2 == g and mc2 == mc


def test_complex_entries_in_json():
    spec = {"vertices": 2, "bonds": [{"from": 1, "to": 2, "length": "1"}],
            "conditions": {"kind": "explicit", "matrix_a": [[1, 0], [0, 1]],
                           "matrix_b": [[0, [0, 0]], [0, 0]]}}
    g, mc = graph_from_json(spec)
    assert mc.a_exact[0][0] == (Fraction(1), Fraction(0))
