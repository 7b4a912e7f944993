import numpy as np
import pytest
from scipy import special

from qgraph.airy import airy


@pytest.mark.parametrize("z", [-30.0, -12.5, -10.0, -3.3, -0.5, 0.0, 0.7, 4.0, 9.99, 10.01, 25.0])
def test_matches_scipy(z):
    ours = np.array(airy(z))
    ref = np.array(special.airy(z))
    scale = np.abs(ref)
    # oscillatory side: compare against the local envelope
    if z < 0:
        scale = np.maximum(scale, np.abs(ref).max())
    assert np.all(np.abs(ours - ref) <= 1e-12 * scale)


def test_wronskian():
    for z in (-7.0, 0.3, 6.0, 15.0):
        ai, aip, bi, bip = airy(z)
        assert ai * bip - aip * bi == pytest.approx(1 / np.pi, rel=1e-12)


def test_overflow_raises():
    with pytest.raises(ValueError):
        airy(120.0)
