"""Shared test graphs."""

from fractions import Fraction

from qgraph import MetricGraph, Potential

DELTA_COUPLING = {1: Fraction(1, 2), 2: Fraction(-1, 3), 3: Fraction(2), 4: Fraction(3, 4)}


def wire(length=1, potential=None, magnetic=0.0) -> MetricGraph:
    return MetricGraph.build(2, [(1, 2, length, magnetic, potential or Potential.zero())])


def star(lengths=(Fraction(1), Fraction(13, 10), Fraction(17, 10))) -> MetricGraph:
    return MetricGraph.build(len(lengths) + 1, [(1, j + 2, L) for j, L in enumerate(lengths)])


def mixed_graph() -> MetricGraph:
    """Four vertices, five bonds, mixed polynomial potentials."""
    return MetricGraph.build(4, [
        (1, 2, 1, 0.0, Potential.poly([0, 1])),
        (2, 3, Fraction(3, 2), 0.3, Potential.poly([1, 0, 1])),
        (3, 4, Fraction(5, 4), 0.0, Potential.zero()),
        (1, 4, Fraction(7, 4), -0.2, Potential.poly([Fraction(1, 2), -1, 0, Fraction(1, 3)])),
        (1, 3, 1, 0.0, Potential.poly([2])),
    ])
