import math

import numpy as np
import pytest

from dualfreq import interval_frequency, interval_profile, sobolev_poincare_1d


def test_poincare_endpoint_values():
    assert sobolev_poincare_1d(2.0) == pytest.approx(math.pi, abs=1e-8)
    assert sobolev_poincare_1d(1.0) == pytest.approx(2.0 * math.sqrt(3.0), abs=1e-8)


def test_poincare_monotone_in_q():
    qs = np.linspace(1.0, 2.0, 11)
    vals = [sobolev_poincare_1d(q) for q in qs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_interval_frequency_endpoints():
    # q = 1: reciprocal of the torsional rigidity of (-1, 1), which is 2/3
    assert interval_frequency(1.0) == pytest.approx(1.5, abs=1e-6)
    # q = 2: first Dirichlet eigenvalue (pi/2)^2
    assert interval_frequency(2.0) == pytest.approx(math.pi**2 / 4.0, abs=1e-8)


def test_interval_identity():
    for q in (1.25, 1.5, 1.75):
        lhs = interval_frequency(q)
        rhs = sobolev_poincare_1d(q) ** 2 * 2.0 ** (-(2.0 + q) / q)
        assert lhs == pytest.approx(rhs, rel=1e-3)


def test_interval_profile_torsion_limit():
    prof = interval_profile(1.0)
    x = prof.nodes
    assert np.allclose(prof.values, (1.0 - x**2) / 2.0, atol=1e-6)


def test_interval_profile_symmetric():
    prof = interval_profile(1.5)
    g = prof.values
    assert np.allclose(g, g[::-1], atol=1e-10)
    assert np.argmax(g) in (prof.n // 2 - 1, prof.n // 2)
    with pytest.raises(ValueError):
        interval_profile(2.0)
