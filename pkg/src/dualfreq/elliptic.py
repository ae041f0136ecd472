"""Discrete elliptic calculus on masked lattices.

The Laplacian is the 5-point stencil with Dirichlet data imposed by
zero extension outside the interior mask.  Gradients are centered where
both axis neighbors are interior and one-sided through the exterior
(zero) value at mask edges, so fluxes keep the boundary slope.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import LinearOperator, cg

from .geometry import GridDomain


class ConvergenceError(RuntimeError):
    """An iterative solve stopped before reaching its tolerance."""


def _check_finite(values: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if not np.isfinite(arr).all():
        raise ValueError(f"{what} must hold finite values")
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    """One real value per interior node, row-major mask order."""

    domain: GridDomain
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = _check_finite(self.values, "ScalarField")
        if arr.shape != (self.domain.n_interior,):
            raise ValueError(f"expected {self.domain.n_interior} values, got {arr.shape}")
        object.__setattr__(self, "values", arr)

    def to_csv(self, path) -> None:
        xy = self.domain.node_xy
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "x", "y", "value"])
            for k in range(len(self.values)):
                writer.writerow([k, repr(float(xy[k, 0])), repr(float(xy[k, 1])),
                                 repr(float(self.values[k]))])


@dataclass(frozen=True, eq=False)
class VectorField:
    """One real 2-vector per interior node, row-major mask order."""

    domain: GridDomain
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = _check_finite(self.values, "VectorField")
        if arr.shape != (self.domain.n_interior, 2):
            raise ValueError(f"expected ({self.domain.n_interior}, 2) values, got {arr.shape}")
        object.__setattr__(self, "values", arr)

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.values[:, 0], self.values[:, 1])

    def to_csv(self, path) -> None:
        xy = self.domain.node_xy
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "x", "y", "vx", "vy"])
            for k in range(len(self.values)):
                writer.writerow([k, repr(float(xy[k, 0])), repr(float(xy[k, 1])),
                                 repr(float(self.values[k, 0])),
                                 repr(float(self.values[k, 1]))])


def _values(u) -> np.ndarray:
    return u.values if isinstance(u, (ScalarField, VectorField)) else np.asarray(u, float)


def _lap_apply(dom: GridDomain, u: np.ndarray, pad: np.ndarray) -> np.ndarray:
    # pad is a preallocated (ny+2, nx+2) buffer whose exterior entries stay 0
    inner = pad[1:-1, 1:-1]
    inner[dom.interior_mask] = u
    out = (4.0 * inner
           - pad[2:, 1:-1] - pad[:-2, 1:-1]
           - pad[1:-1, 2:] - pad[1:-1, :-2])[dom.interior_mask]
    return out / (dom.h * dom.h)


def apply_laplacian(dom: GridDomain, u) -> ScalarField:
    """Apply the positive operator (negative discrete Laplacian) to u."""
    arr = _values(u)
    pad = np.zeros((dom.ny + 2, dom.nx + 2))
    return ScalarField(dom, _lap_apply(dom, arr, pad))


def solve_poisson(dom: GridDomain, rhs, tol: float = 1e-10,
                  x0=None, maxiter: int | None = None,
                  info: dict | None = None) -> ScalarField:
    """Solve the zero-extension Dirichlet problem by conjugate gradients.

    rhs may be a constant, an array over interior nodes, or a ScalarField.
    The returned iterate has relative residual <= tol; running past the
    iteration cap raises ConvergenceError with the final residual.
    """
    n = dom.n_interior
    b = np.broadcast_to(np.asarray(_values(rhs), float), (n,)).astype(float)
    if maxiter is None:
        maxiter = 60 * max(dom.nx, dom.ny) + 500
    pad = np.zeros((dom.ny + 2, dom.nx + 2))
    op = LinearOperator((n, n), matvec=lambda v: _lap_apply(dom, v, pad))
    iters = 0

    def _count(_):
        nonlocal iters
        iters += 1

    x, cg_info = cg(op, b, x0=None if x0 is None else _values(x0),
                    rtol=tol, atol=0.0, maxiter=maxiter, callback=_count)
    if info is not None:
        res = np.linalg.norm(b - _lap_apply(dom, x, pad)) / np.linalg.norm(b)
        info["iterations"] = iters
        info["residual"] = float(res)
    if cg_info != 0:
        res = np.linalg.norm(b - _lap_apply(dom, x, pad)) / np.linalg.norm(b)
        raise ConvergenceError(
            f"conjugate gradients hit the {maxiter}-iteration cap, "
            f"relative residual {res:.3e} > tol {tol:.1e}")
    return ScalarField(dom, x)


def gradient(dom: GridDomain, u) -> VectorField:
    """Nodal gradient; see the module docstring for the edge convention."""
    arr = _values(u)
    gx = _axis_derivative(dom, arr, "W", "E")
    gy = _axis_derivative(dom, arr, "S", "N")
    return VectorField(dom, np.column_stack([gx, gy]))


def _axis_derivative(dom: GridDomain, u: np.ndarray, lo_key: str, hi_key: str):
    nb = dom.neighbor_idx
    lo, hi = nb[lo_key], nb[hi_key]
    ext = np.append(u, 0.0)  # index -1 reads the zero extension
    u_lo, u_hi = ext[lo], ext[hi]
    has_lo, has_hi = lo >= 0, hi >= 0
    h = dom.h
    g = np.zeros_like(u)
    both = has_lo & has_hi
    g[both] = (u_hi[both] - u_lo[both]) / (2 * h)
    lo_missing = ~has_lo & has_hi
    g[lo_missing] = u[lo_missing] / h            # (u_C - 0)/h
    hi_missing = has_lo & ~has_hi
    g[hi_missing] = -u[hi_missing] / h           # (0 - u_C)/h
    return g


def divergence(dom: GridDomain, v) -> ScalarField:
    """Nodal divergence with the same stencil family as gradient().

    Equals the negative transpose of gradient() at every node whose
    neighbors all take centered differences; boundary rows differ.
    """
    arr = _values(v)
    dx = _axis_derivative(dom, arr[:, 0], "W", "E")
    dy = _axis_derivative(dom, arr[:, 1], "S", "N")
    return ScalarField(dom, dx + dy)


def gradient_matrix(dom: GridDomain) -> csr_matrix:
    """Sparse (2n, n) matrix reproducing gradient() exactly.

    Row k is the x-derivative at node k, row n+k the y-derivative; the
    exact transpose of this matrix drives the weak-form feasibility
    tests of the dual certificates.
    """
    n = dom.n_interior
    h = dom.h
    rows, cols, vals = [], [], []
    for comp, (lo_key, hi_key) in enumerate((("W", "E"), ("S", "N"))):
        nb = dom.neighbor_idx
        lo, hi = nb[lo_key], nb[hi_key]
        has_lo, has_hi = lo >= 0, hi >= 0
        k = np.arange(n)
        both = has_lo & has_hi
        rows += [comp * n + k[both], comp * n + k[both]]
        cols += [hi[both], lo[both]]
        vals += [np.full(both.sum(), 1 / (2 * h)), np.full(both.sum(), -1 / (2 * h))]
        lo_missing = ~has_lo & has_hi
        rows.append(comp * n + k[lo_missing])
        cols.append(k[lo_missing])
        vals.append(np.full(lo_missing.sum(), 1 / h))
        hi_missing = has_lo & ~has_hi
        rows.append(comp * n + k[hi_missing])
        cols.append(k[hi_missing])
        vals.append(np.full(hi_missing.sum(), -1 / h))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    return csr_matrix((vals, (rows, cols)), shape=(2 * n, n))


def integrate(dom: GridDomain, values) -> float:
    """Plain node quadrature: h^2 times the sum over interior nodes."""
    return float(np.sum(_values(values)) * dom.h * dom.h)


def integrate_corrected(dom: GridDomain, values) -> float:
    """Node quadrature plus the half-cell strip along exposed faces.

    Nodal cells stop h/2 short of the zero-extension boundary; integrands
    that stay O(1) there (gradient magnitudes, flux densities) get the
    missing strip back at the boundary-node value.
    """
    arr = _values(values)
    w = 1.0 + 0.5 * dom.exposed_faces
    return float(np.sum(arr * w) * dom.h * dom.h)


def dirichlet_energy(dom: GridDomain, u) -> float:
    """Operator Dirichlet form h^2 * <u, -lap u>.

    Summation by parts makes this the sum over lattice edges (boundary
    crossings included) of squared difference quotients, so it is the
    energy that the 5-point solves are variational for.
    """
    arr = _values(u)
    pad = np.zeros((dom.ny + 2, dom.nx + 2))
    return float(np.dot(arr, _lap_apply(dom, arr, pad)) * dom.h * dom.h)


def gradient_energy(dom: GridDomain, u) -> float:
    """Boundary-corrected quadrature of |grad u|^2 over the domain."""
    g = gradient(dom, u).values
    return integrate_corrected(dom, g[:, 0] ** 2 + g[:, 1] ** 2)
