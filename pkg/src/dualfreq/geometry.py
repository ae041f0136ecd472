"""Masked-lattice planar domains and their geometric summaries.

A domain is a uniform node lattice with spacing h; a node is interior
when its center lies strictly inside the open target set.  Every field
solver in the package works on the interior nodes of such a lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import shapely
from scipy.ndimage import distance_transform_edt
from scipy.optimize import minimize
from shapely import MultiPoint, minimum_bounding_radius
from shapely.geometry import Polygon


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Immutable rasterized domain.

    Node (row j, col i) sits at (origin[0] + i*h, origin[1] + j*h);
    interior_mask[j, i] marks interior nodes.  The convex flag is decided
    by the constructor, never inferred from the raster.
    """

    h: float
    origin: tuple[float, float]
    nx: int
    ny: int
    interior_mask: np.ndarray = field(repr=False)
    convex: bool = False

    def __post_init__(self):
        mask = np.asarray(self.interior_mask, dtype=bool)
        if mask.shape != (self.ny, self.nx):
            raise ValueError(f"mask shape {mask.shape} != (ny={self.ny}, nx={self.nx})")
        if self.h <= 0:
            raise ValueError("spacing must be positive")
        if not mask.any():
            raise ValueError("domain has no interior nodes")
        mask.flags.writeable = False
        object.__setattr__(self, "interior_mask", mask)

    @property
    def n_interior(self) -> int:
        return int(self.interior_mask.sum())

    @cached_property
    def node_xy(self) -> np.ndarray:
        """(n, 2) coordinates of interior nodes in row-major mask order."""
        jj, ii = np.nonzero(self.interior_mask)
        x = self.origin[0] + ii * self.h
        y = self.origin[1] + jj * self.h
        return np.column_stack([x, y])

    @cached_property
    def index_grid(self) -> np.ndarray:
        """(ny, nx) int array: running interior index, -1 outside."""
        idx = np.full((self.ny, self.nx), -1, dtype=np.int64)
        idx[self.interior_mask] = np.arange(self.n_interior)
        return idx

    @cached_property
    def neighbor_idx(self) -> dict[str, np.ndarray]:
        """Interior index of the W/E/S/N neighbor of each node, -1 if exterior."""
        idx = self.index_grid
        pad = np.full((self.ny + 2, self.nx + 2), -1, dtype=np.int64)
        pad[1:-1, 1:-1] = idx
        m = self.interior_mask
        return {
            "W": pad[1:-1, 0:-2][m],
            "E": pad[1:-1, 2:][m],
            "S": pad[0:-2, 1:-1][m],
            "N": pad[2:, 1:-1][m],
        }

    @cached_property
    def exposed_faces(self) -> np.ndarray:
        """Number of the 4 axis neighbors of each interior node that are exterior."""
        nb = self.neighbor_idx
        return sum((nb[k] < 0).astype(np.int64) for k in "WESN")

    def translated(self, dx: float, dy: float) -> "GridDomain":
        return GridDomain(self.h, (self.origin[0] + dx, self.origin[1] + dy),
                          self.nx, self.ny, self.interior_mask.copy(), self.convex)


@dataclass(frozen=True)
class GeometricSummary:
    area: float
    perimeter: float
    inradius: float
    centroid: tuple[float, float]
    circumradius: float


def build_rectangle(width: float, height: float, h: float,
                    corner: tuple[float, float] = (0.0, 0.0)) -> GridDomain:
    """Open axis-aligned rectangle with lower-left corner at `corner`."""
    if width <= 0 or height <= 0:
        raise ValueError("rectangle sides must be positive")
    if h > min(width, height) / 8:
        raise ValueError(f"spacing h={h} too coarse: must be <= min(w,h)/8")
    nx = int(math.floor(width / h + 1e-12)) + 1
    ny = int(math.floor(height / h + 1e-12)) + 1
    x = corner[0] + np.arange(nx) * h
    y = corner[1] + np.arange(ny) * h
    xx, yy = np.meshgrid(x - corner[0], y - corner[1])
    mask = (xx > 0) & (xx < width) & (yy > 0) & (yy < height)
    return GridDomain(h, (corner[0], corner[1]), nx, ny, mask, convex=True)


def build_disk(radius: float, h: float,
               center: tuple[float, float] = (0.0, 0.0)) -> GridDomain:
    """Open disk; the lattice is anchored at the center."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if h > radius / 4:
        raise ValueError(f"spacing h={h} too coarse for radius {radius}")
    k = int(math.ceil(radius / h))
    coords = np.arange(-k, k + 1) * h
    xx, yy = np.meshgrid(coords, coords)
    mask = xx * xx + yy * yy < radius * radius
    origin = (center[0] - k * h, center[1] - k * h)
    return GridDomain(h, origin, 2 * k + 1, 2 * k + 1, mask, convex=True)


def _polygon_is_convex(vertices: np.ndarray) -> bool:
    # All consecutive-edge cross products share a sign (collinear edges allowed).
    v = np.asarray(vertices, dtype=float)
    e = np.diff(np.vstack([v, v[:1]]), axis=0)
    cross = e[:-1, 0] * e[1:, 1] - e[:-1, 1] * e[1:, 0]
    cross = np.append(cross, e[-1, 0] * e[0, 1] - e[-1, 1] * e[0, 0])
    scale = np.abs(cross).max() + 1e-30
    sig = cross[np.abs(cross) > 1e-12 * scale]
    return bool(sig.size == 0 or (sig > 0).all() or (sig < 0).all())


def build_polygon(vertices, h: float) -> GridDomain:
    """Simple polygon given as an (m, 2) vertex sequence, m >= 3."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise ValueError("polygon needs at least 3 planar vertices")
    poly = Polygon(v)
    if not poly.is_valid or not poly.is_simple:
        raise ValueError("polygon must be simple (no self-intersection)")
    if poly.area <= 0:
        raise ValueError("polygon has zero area")
    minx, miny, maxx, maxy = poly.bounds
    nx = int(math.floor((maxx - minx) / h + 1e-12)) + 1
    ny = int(math.floor((maxy - miny) / h + 1e-12)) + 1
    x = minx + np.arange(nx) * h
    y = miny + np.arange(ny) * h
    xx, yy = np.meshgrid(x, y)
    # contains_xy is strict, so nodes on the boundary stay exterior
    inside = shapely.contains_xy(poly, xx.ravel(), yy.ravel())
    mask = inside.reshape(ny, nx)
    return GridDomain(h, (minx, miny), nx, ny, mask,
                      convex=_polygon_is_convex(v))


def domain_from_spec(spec: str, h: float) -> GridDomain:
    """Build a domain from a literal: disk:r=1 | rect:w=8,h=1 | poly:x1,y1;x2,y2;..."""
    kind, _, body = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "disk":
        kv = _parse_kv(body)
        return build_disk(float(kv["r"]), h)
    if kind == "rect":
        kv = _parse_kv(body)
        return build_rectangle(float(kv["w"]), float(kv["h"]), h)
    if kind == "poly":
        pts = []
        for pair in body.split(";"):
            xs, ys = pair.split(",")
            pts.append((float(xs), float(ys)))
        return build_polygon(np.array(pts), h)
    raise ValueError(f"unknown domain literal {spec!r}")


def _parse_kv(body: str) -> dict[str, str]:
    out = {}
    for item in body.split(","):
        key, _, val = item.partition("=")
        out[key.strip()] = val.strip()
    return out


def save_domain(dom: GridDomain, path) -> None:
    """Text format: key=value header then ny rows of nx '0'/'1' characters."""
    lines = [
        f"h={dom.h!r}",
        f"nx={dom.nx}",
        f"ny={dom.ny}",
        f"origin={dom.origin[0]!r},{dom.origin[1]!r}",
        f"convex={int(dom.convex)}",
    ]
    for j in range(dom.ny):
        lines.append("".join("1" if dom.interior_mask[j, i] else "0"
                             for i in range(dom.nx)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_domain(path) -> GridDomain:
    with open(path) as fh:
        raw = [ln.rstrip("\n") for ln in fh if ln.strip() != ""]
    header = {}
    rows = []
    for ln in raw:
        if "=" in ln and not set(ln) <= {"0", "1"}:
            key, _, val = ln.partition("=")
            header[key.strip()] = val.strip()
        else:
            rows.append(ln)
    try:
        h = float(header["h"])
        nx = int(header["nx"])
        ny = int(header["ny"])
        ox, oy = (float(t) for t in header["origin"].split(","))
        convex = bool(int(header["convex"]))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad domain file header: {exc}") from exc
    if len(rows) != ny or any(len(r) != nx for r in rows):
        raise ValueError(f"domain file needs {ny} rows of {nx} 0/1 characters")
    mask = np.array([[c == "1" for c in r] for r in rows], dtype=bool)
    return GridDomain(h, (ox, oy), nx, ny, mask, convex)


def _perimeter(dom: GridDomain) -> float:
    from skimage.measure import find_contours
    padded = np.zeros((dom.ny + 2, dom.nx + 2), dtype=float)
    padded[1:-1, 1:-1] = dom.interior_mask
    total = 0.0
    for contour in find_contours(padded, 0.5):
        seg = np.diff(contour, axis=0)
        total += np.hypot(seg[:, 0], seg[:, 1]).sum()
    return total * dom.h


def _edt_cells(dom: GridDomain) -> np.ndarray:
    # exact Euclidean distance (in cells) to the nearest exterior node center,
    # padding so that nodes outside the stored window count as exterior
    padded = np.zeros((dom.ny + 2, dom.nx + 2), dtype=bool)
    padded[1:-1, 1:-1] = dom.interior_mask
    return distance_transform_edt(padded)[1:-1, 1:-1]


def distance_field(dom: GridDomain) -> np.ndarray:
    """Distance from each interior node to the nearest exterior cell boundary.

    Exterior node cells are h-by-h squares; their nearest face sits h/2
    inside the center-to-center distance, hence the half-cell shift.
    """
    d = (_edt_cells(dom) - 0.5) * dom.h
    return d[dom.interior_mask]


def summarize(dom: GridDomain) -> GeometricSummary:
    area = dom.n_interior * dom.h * dom.h
    xy = dom.node_xy
    centroid = (float(xy[:, 0].mean()), float(xy[:, 1].mean()))
    # the deepest node sits up to half a cell off the true incenter, so the
    # node distance systematically undershoots; report the cell-resolved value
    inradius = float(distance_field(dom).max()) + dom.h / 2
    # circumradius of the union of interior cells: expand hull vertices
    # by the four cell corners so that area <= pi * circumradius**2 exactly
    hull = MultiPoint(xy).convex_hull
    hv = np.asarray(hull.exterior.coords) if hull.geom_type == "Polygon" \
        else np.asarray(hull.coords)
    half = dom.h / 2
    corners = np.concatenate([hv + [sx * half, sy * half]
                              for sx in (-1, 1) for sy in (-1, 1)])
    circumradius = float(minimum_bounding_radius(MultiPoint(corners)))
    return GeometricSummary(area, _perimeter(dom), inradius, centroid, circumradius)


def moment(dom: GridDomain, p: float, x0) -> float:
    """Integral of |x - x0|^p over the domain (node quadrature)."""
    if p < 0:
        raise ValueError("moment order must be >= 0")
    xy = dom.node_xy
    r = np.hypot(xy[:, 0] - x0[0], xy[:, 1] - x0[1])
    return float((r ** p).sum() * dom.h * dom.h)


def min_moment(dom: GridDomain, p: float, tol: float = 1e-8):
    """Minimize x0 -> moment(dom, p, x0) by derivative-free local search.

    Starts at the centroid.  Returns (x0, value).  Raises RuntimeError with
    the iterate trace if the search fails to converge.
    """
    xy = dom.node_xy
    w = dom.h * dom.h

    def objective(x0):
        r2 = (xy[:, 0] - x0[0]) ** 2 + (xy[:, 1] - x0[1]) ** 2
        return float((r2 ** (p / 2)).sum() * w)

    start = xy.mean(axis=0)
    trace = []
    res = minimize(objective, start, method="Nelder-Mead",
                   callback=lambda xk: trace.append(np.array(xk)),
                   options={"xatol": tol, "fatol": tol * max(1.0, objective(start)),
                            "maxiter": 500})
    if not res.success:
        raise RuntimeError(f"moment minimization did not converge: {res.message}; "
                           f"iterates={[t.tolist() for t in trace]}")
    return (float(res.x[0]), float(res.x[1])), float(res.fun)
