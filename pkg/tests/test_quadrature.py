import math

import numpy as np
import pytest

from qgraph.quadrature import tanh_sinh


def test_polynomial():
    r = tanh_sinh(lambda t, d: t ** 3, 0.0, 2.0)
    assert r.converged and r.value.real == pytest.approx(4.0, rel=1e-13)


def test_endpoint_singularity_uses_offsets():
    # int_1^2 (t-1)**-0.9 dt = 10; the offset argument keeps full accuracy
    r = tanh_sinh(lambda t, d: d ** -0.9, 1.0, 2.0, rtol=1e-12)
    assert r.value.real == pytest.approx(10.0, rel=1e-10)


def test_complex_integrand():
    r = tanh_sinh(lambda t, d: np.exp(1j * t), 0.0, math.pi)
    assert abs(r.value - 2j) < 1e-12


def test_bad_interval():
    with pytest.raises(ValueError):
        tanh_sinh(lambda t, d: t, 1.0, 1.0)
