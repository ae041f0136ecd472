"""Geometric estimates for the generalized principal frequency.

Every estimate turns measured geometry (area, perimeter, inradius, moments,
distance field) plus one-dimensional reference constants into a certified
lower or upper bound for lambda_1(Omega; q), and `bound_report` evaluates
the full family against the computed value with a slack tolerance.

Lower bounds: Faber-Krahn (ball reference, no convexity needed), the
Hersch-Makai inradius and perimeter forms and the distance-transplant bound
(convex domains), the Diaz-Weinstein moment bound (any domain, q < 2), and
the Cheeger-type bound (needs a certified Cheeger constant).  Upper bound:
Polya's perimeter-over-area estimate (convex domains).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .elliptic import integrate, integrate_corrected
from .geometry import GridDomain, build_disk, distance_field, min_moment, summarize
from .onedim import interval_profile, sobolev_poincare_1d
from .primal import solve_frequency

__all__ = [
    "BoundReport",
    "BoundRow",
    "DEFAULT_TOL",
    "InapplicableBound",
    "ball_reference",
    "bound_report",
    "cheeger_constant_disk",
    "cheeger_constant_rectangle",
    "cheeger_estimate",
    "cheeger_lower",
    "diaz_weinstein_lower",
    "faber_krahn_lower",
    "hersch_makai_lower",
    "hersch_makai_perimeter_lower",
    "polya_upper",
    "transplant_lower",
]

DEFAULT_TOL = 0.02
_REFERENCE_H = 1.0 / 128.0


class InapplicableBound(ValueError):
    """A bound's hypotheses (convexity, q-range, required inputs) fail."""


def _require_convex(dom: GridDomain, name: str):
    if not dom.convex:
        raise InapplicableBound(f"{name} requires a convex domain")


@lru_cache(maxsize=None)
def _pi_2q(q: float) -> float:
    return sobolev_poincare_1d(q)


@lru_cache(maxsize=None)
def _reference_disk(h: float) -> GridDomain:
    return build_disk(1.0, h)


@lru_cache(maxsize=None)
def ball_reference(q: float, h: float = _REFERENCE_H) -> float:
    """lambda_1 of the unit disk at the reference resolution, cached per q."""
    return solve_frequency(_reference_disk(h), q).lambda1


def faber_krahn_lower(dom: GridDomain, q: float, lambda1_ball_ref: float) -> float:
    """Ball-reference lower bound: among sets of given area the disk minimizes
    lambda_1, so lambda_1(Omega; q) >= lambda_1(B_1; q) * (|Omega|/|B_1|)^(-2/q).

    Valid on any domain, convex or not.
    """
    area = summarize(dom).area
    return lambda1_ball_ref * (area / math.pi) ** (-2.0 / q)


def hersch_makai_lower(dom: GridDomain, q: float) -> float:
    """Inradius lower bound (pi_2q/2)^2 * |Omega|^((q-2)/q) / R^2, convex only."""
    _require_convex(dom, "hersch_makai_lower")
    geo = summarize(dom)
    c = _pi_2q(q) / 2.0
    return c * c * geo.area ** ((q - 2.0) / q) / geo.inradius ** 2


def polya_upper(dom: GridDomain, q: float) -> float:
    """Perimeter upper bound (pi_2q/2)^2 * (P/|Omega|^(1/2+1/q))^2, convex only."""
    _require_convex(dom, "polya_upper")
    geo = summarize(dom)
    c = _pi_2q(q) / 2.0
    return c * c * (geo.perimeter / geo.area ** (0.5 + 1.0 / q)) ** 2


def diaz_weinstein_lower(dom: GridDomain, q: float) -> float:
    """Moment lower bound (2/q)^2 * I_p(Omega)^(-(2-q)/q) with p = 2q/(2-q).

    I_p is the minimal p-th distance moment over base points.  At q = 1 this
    is the torsion estimate T <= I_2/4 with equality on disks; the moment
    exponent diverges as q -> 2, so q = 2 is inapplicable.  No convexity
    is required.  The moment uses boundary-corrected quadrature so that the
    disk equality case is met at the discretization's own accuracy.
    """
    if not 1.0 <= q < 2.0:
        raise InapplicableBound(
            "diaz_weinstein_lower needs q in [1, 2); the moment exponent "
            "2q/(2-q) diverges at q = 2")
    p = 2.0 * q / (2.0 - q)
    x0, _ = min_moment(dom, p)
    xy = dom.node_xy
    r = np.hypot(xy[:, 0] - x0[0], xy[:, 1] - x0[1])
    mom = integrate_corrected(dom, r ** p)
    return (2.0 / q) ** 2 * mom ** (-(2.0 - q) / q)


def cheeger_constant_disk(radius: float) -> float:
    """Cheeger constant of a disk: perimeter over area of the disk itself."""
    return 2.0 / radius


def cheeger_constant_rectangle(width: float, height: float) -> float:
    """Cheeger constant of an axis rectangle.

    The optimal subset rounds the four corners at radius r solving
    (4 - pi) r^2 - 2(w + h) r + 4 w h = 4 w h - ... ; explicitly
    r = ((w+h) - sqrt((w+h)^2 - (4-pi) w h)) / (4 - pi) and h_1 = 1/r.
    """
    if width <= 0 or height <= 0:
        raise ValueError("rectangle sides must be positive")
    s = width + height
    r = (s - math.sqrt(s * s - (4.0 - math.pi) * width * height)) / (4.0 - math.pi)
    return 1.0 / r


def cheeger_estimate(dom: GridDomain) -> float:
    """Uncertified Cheeger upper estimate P(Omega)/|Omega| (the whole-domain
    competitor).  An upper bound on h_1 cannot certify a lower bound for
    lambda_1; use it only as a diagnostic."""
    geo = summarize(dom)
    return geo.perimeter / geo.area


def cheeger_lower(dom: GridDomain, q: float, h1: float | None = None) -> float:
    """Cheeger-type lower bound (h1/q)^2 * |Omega|^(-(2-q)/q).

    h1 must be a certified Cheeger constant for the domain; pass the values
    from cheeger_constant_disk / cheeger_constant_rectangle for the
    calibration shapes.
    """
    if h1 is None:
        raise InapplicableBound(
            "cheeger_lower needs a certified Cheeger constant h1")
    if h1 <= 0:
        raise ValueError("h1 must be positive")
    area = summarize(dom).area
    return (h1 / q) ** 2 * area ** (-(2.0 - q) / q)


def hersch_makai_perimeter_lower(dom: GridDomain, q: float) -> float:
    """Perimeter variant (pi_2q/2)^2 * P^((q-2)/q) / R^((q+2)/q), convex only.

    Weaker than the inradius form because |Omega| <= R * P on convex sets;
    the ordering is asserted against the measured geometry.
    """
    _require_convex(dom, "hersch_makai_perimeter_lower")
    geo = summarize(dom)
    c = _pi_2q(q) / 2.0
    value = c * c * geo.perimeter ** ((q - 2.0) / q) / geo.inradius ** ((q + 2.0) / q)
    assert value <= hersch_makai_lower(dom, q) * (1.0 + 1e-12), \
        "perimeter form exceeded the inradius form: measured |Omega| > R*P"
    return value


def transplant_lower(dom: GridDomain, q: float) -> float:
    """Distance-transplant lower bound, the sharper intermediate of the
    perimeter family: 1/lambda_1 <= R^2 * (int |g'(d/R - 1)|^2 dx)^((2-q)/q)
    with g the one-dimensional extremal profile and d the boundary distance.

    Convex domains, q in [1, 2); at q = 2 the display collapses to the
    trivial 1/R^2 and stops dominating the perimeter form.
    """
    _require_convex(dom, "transplant_lower")
    if not 1.0 <= q < 2.0:
        raise InapplicableBound("transplant_lower needs q in [1, 2)")
    geo = summarize(dom)
    prof = interval_profile(q)
    nodes = prof.nodes
    edges = 0.5 * (nodes[:-1] + nodes[1:])
    slopes = np.diff(prof.values) / prof.h
    arg = distance_field(dom) / geo.inradius - 1.0
    g1 = np.interp(arg, edges, slopes)
    # plain cell quadrature: the cells tile the domain, and inflating the
    # energy would break the sharp ordering against the perimeter form on
    # slab-like shapes
    energy = integrate(dom, g1 * g1)
    return energy ** (-(2.0 - q) / q) / geo.inradius ** 2


@dataclass(frozen=True)
class BoundRow:
    """One evaluated estimate: satisfied is None when inapplicable."""

    q: float
    name: str
    kind: str
    value: float
    satisfied: bool | None
    slack: float
    note: str = ""

    def as_dict(self) -> dict:
        return {"q": self.q, "name": self.name, "kind": self.kind,
                "value": self.value, "satisfied": self.satisfied,
                "slack": self.slack, "note": self.note}


@dataclass(frozen=True)
class BoundReport:
    """All estimates for one domain over a q grid.

    Slack is lambda_1/value for lower bounds and value/lambda_1 for upper
    bounds, so satisfied rows have slack >= 1/(1+tol).
    """

    domain_id: str
    qs: tuple
    lambda1: tuple
    rows: tuple
    tol: float

    @property
    def all_satisfied(self) -> bool:
        return all(row.satisfied is not False for row in self.rows)

    def as_dict(self) -> dict:
        return {"domain_id": self.domain_id, "qs": list(self.qs),
                "lambda1": list(self.lambda1), "tol": self.tol,
                "all_satisfied": self.all_satisfied,
                "rows": [row.as_dict() for row in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def bound_report(dom: GridDomain, q_list, h1: float | None = None,
                 tol: float = DEFAULT_TOL, label: str | None = None) -> BoundReport:
    """Evaluate every estimate against the solved lambda_1 for each q.

    Convexity-gated rows on non-convex domains and the q = 2 moment rows are
    marked inapplicable rather than failed; solver errors are recorded per q
    without aborting the rest of the report.
    """
    if label is None:
        label = f"grid{dom.nx}x{dom.ny}_h{dom.h:g}"
    rows = []
    lambdas = []
    for q in q_list:
        try:
            lam = solve_frequency(dom, q).lambda1
        except Exception as exc:
            lambdas.append(math.nan)
            rows.append(BoundRow(q, "lambda1", "value", math.nan, None,
                                 math.nan, f"solver error: {exc}"))
            continue
        lambdas.append(lam)
        recipes = [
            ("faber_krahn", "lower",
             lambda q=q: faber_krahn_lower(dom, q, ball_reference(q))),
            ("hersch_makai_inradius", "lower",
             lambda q=q: hersch_makai_lower(dom, q)),
            ("hersch_makai_perimeter", "lower",
             lambda q=q: hersch_makai_perimeter_lower(dom, q)),
            ("transplant", "lower", lambda q=q: transplant_lower(dom, q)),
            ("diaz_weinstein", "lower",
             lambda q=q: diaz_weinstein_lower(dom, q)),
            ("cheeger", "lower", lambda q=q: cheeger_lower(dom, q, h1)),
            ("polya", "upper", lambda q=q: polya_upper(dom, q)),
        ]
        for name, kind, fn in recipes:
            try:
                value = fn()
            except InapplicableBound as exc:
                note = str(exc)
                if name == "cheeger" and h1 is None:
                    note += (f"; uncertified estimate P/|Omega| would give "
                             f"{(cheeger_estimate(dom) / q) ** 2 * summarize(dom).area ** (-(2.0 - q) / q):.6g}")
                rows.append(BoundRow(q, name, kind, math.nan, None, math.nan, note))
                continue
            except Exception as exc:
                rows.append(BoundRow(q, name, kind, math.nan, None, math.nan,
                                     f"error: {exc}"))
                continue
            if kind == "lower":
                ok = value <= lam * (1.0 + tol)
                slack = lam / value
            else:
                ok = value >= lam * (1.0 - tol)
                slack = value / lam
            rows.append(BoundRow(q, name, kind, value, bool(ok), slack))
    return BoundReport(label, tuple(q_list), tuple(lambdas), tuple(rows), tol)
