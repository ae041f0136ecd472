"""Shared domain and solver caches.

Session scope matters: the acceptance suite and the unit tests pull the
same (domain, q, h) solves, and the 1/128 grids are expensive enough
that recomputing them per test would dominate the runtime.
"""

import pytest

from dualfreq import build_disk, build_polygon, build_rectangle, solve_frequency

L_SHAPE = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]


def _build(kind: str, h: float):
    if kind == "disk":
        return build_disk(1.0, h)
    if kind == "square":
        return build_rectangle(1.0, 1.0, h)
    if kind == "lshape":
        return build_polygon(L_SHAPE, h)
    if kind.startswith("rect"):
        return build_rectangle(float(kind[4:]), 1.0, h)
    raise KeyError(kind)


@pytest.fixture(scope="session")
def domains():
    cache = {}

    def get(kind: str, h: float):
        key = (kind, h)
        if key not in cache:
            cache[key] = _build(kind, h)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def solutions(domains):
    cache = {}

    def get(kind: str, q: float, h: float):
        key = (kind, q, h)
        if key not in cache:
            cache[key] = solve_frequency(domains(kind, h), q)
        return cache[key]

    return get
