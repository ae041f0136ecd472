import math

import numpy as np
import pytest

from dualfreq import (
    build_disk,
    build_polygon,
    build_rectangle,
    distance_field,
    domain_from_spec,
    load_domain,
    min_moment,
    moment,
    save_domain,
    summarize,
)
from conftest import L_SHAPE


def test_disk_summary(domains):
    dom = domains("disk", 1 / 64)
    s = summarize(dom)
    assert s.area == pytest.approx(math.pi, rel=0.01)
    # marching-squares perimeter carries a persistent staircase bias upward
    assert 2 * math.pi * 0.98 <= s.perimeter <= 2 * math.pi * 1.10
    assert s.inradius == pytest.approx(1.0, abs=1e-12)
    assert s.circumradius >= 1.0
    assert dom.convex


def test_rectangle_summary():
    dom = build_rectangle(2.0, 1.0, 1 / 32)
    s = summarize(dom)
    # open set: the boundary node ring is excluded, so the raw cell count
    # gives (w - h)(l - h) exactly
    assert s.area == pytest.approx((2.0 - dom.h) * (1.0 - dom.h), rel=1e-12)
    assert s.perimeter == pytest.approx(6.0, rel=0.05)
    assert s.inradius == pytest.approx(0.5, abs=dom.h)
    assert s.centroid == pytest.approx((1.0, 0.5), abs=1e-9)
    assert dom.convex


def test_lshape_flagged_nonconvex(domains):
    assert not domains("lshape", 1 / 32).convex


def test_domain_from_spec_literals():
    disk = domain_from_spec("disk:r=1", 1 / 32)
    ref = build_disk(1.0, 1 / 32)
    assert disk.n_interior == ref.n_interior
    assert np.array_equal(disk.interior_mask, ref.interior_mask)

    rect = domain_from_spec("rect:w=2,h=1", 1 / 32)
    assert rect.n_interior == build_rectangle(2.0, 1.0, 1 / 32).n_interior

    tri = domain_from_spec("poly:0,0;1,0;0,1", 1 / 32)
    assert tri.n_interior > 0
    assert tri.convex

    with pytest.raises(ValueError):
        domain_from_spec("blob:r=1", 1 / 32)


def test_save_load_round_trip(tmp_path):
    dom = build_polygon(L_SHAPE, 1 / 16)
    path = tmp_path / "l.dom"
    save_domain(dom, path)
    back = load_domain(path)
    assert back.h == dom.h
    assert back.convex == dom.convex
    assert np.array_equal(back.interior_mask, dom.interior_mask)
    assert np.allclose(back.node_xy, dom.node_xy)


def test_distance_field_positive_interior(domains):
    dom = domains("disk", 1 / 32)
    d = distance_field(dom)
    assert d.shape == (dom.n_interior,)
    assert np.all(d >= 0)
    assert d.max() == pytest.approx(1.0 - dom.h / 2, abs=dom.h)


def test_min_moment_square_center():
    dom = build_rectangle(1.0, 1.0, 1 / 64)
    x0, val = min_moment(dom, 2.0)
    assert x0[0] == pytest.approx(0.5, abs=dom.h)
    assert x0[1] == pytest.approx(0.5, abs=dom.h)
    assert val <= moment(dom, 2.0, (0.5, 0.5)) + 1e-12
    # interior-node quadrature misses the boundary strip, so the discrete
    # moment sits below the continuum 1/6
    assert val < 1.0 / 6.0


def test_min_moment_beats_grid_search_on_asymmetric_lshape():
    dom = build_polygon([(0, 0), (3, 0), (3, 1), (1, 1), (1, 2), (0, 2)], 1 / 32)
    x0, val = min_moment(dom, 4.0)
    centroid = dom.node_xy.mean(axis=0)
    assert val <= moment(dom, 4.0, centroid)
    best = min(
        moment(dom, 4.0, (a, b))
        for a in np.linspace(0.1, 2.9, 29)
        for b in np.linspace(0.1, 1.9, 19)
    )
    assert val <= best + 1e-12
