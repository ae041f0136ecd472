"""One-dimensional principal frequencies and the interval profile.

Everything here lives on an interval with zero boundary values: the
Sobolev-Poincare ratio on (0, 1), the principal frequency of (-1, 1)
obtained from it by scaling, and the positive even profile solving the
sublinear equation on (-1, 1).  These feed the geometric bounds for
planar domains, where thin convex sets behave like their 1-D cross
sections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .elliptic import ConvergenceError

__all__ = [
    "Profile1D",
    "sobolev_poincare_1d",
    "interval_frequency",
    "interval_profile",
]


@dataclass(frozen=True)
class Profile1D:
    """Positive even profile on the interior nodes of (-1, 1).

    values[i] sits at -1 + (i + 1) * h with h = 2 / (n + 1); the zero
    boundary values are implicit.
    """

    n: int
    h: float
    values: np.ndarray
    q: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.n,):
            raise ValueError("values must have one entry per interior node")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("profile must be finite and positive")
        sym = np.max(np.abs(vals - vals[::-1])) / np.max(vals)
        if sym > 1e-8:
            raise ValueError(f"profile not even symmetric: deviation {sym:.2e}")
        object.__setattr__(self, "values", vals)

    @property
    def nodes(self) -> np.ndarray:
        return -1.0 + self.h * np.arange(1, self.n + 1)

    def gradient_energy(self) -> float:
        return _edge_energy(self.values, self.h)

    def q_mass(self) -> float:
        return float(self.h * np.sum(self.values**self.q))


def _solve_poisson_1d(rhs: np.ndarray, h: float) -> np.ndarray:
    # -u'' = rhs with zero Dirichlet ends, standard second differences
    n = rhs.size
    ab = np.zeros((2, n))
    ab[0] = 2.0
    ab[1] = -1.0
    return solveh_banded(ab, rhs * h * h, lower=True)


def _edge_energy(u: np.ndarray, h: float) -> float:
    d = np.diff(np.concatenate(([0.0], u, [0.0])))
    return float(np.sum(d * d) / h)


def _eigenvalue_1d(n: int, tol: float = 1e-13, maxiter: int = 200) -> float:
    """Smallest Dirichlet eigenvalue of -d²/dx² on (0, 1) by inverse power."""
    h = 1.0 / (n + 1)
    u = np.ones(n)
    lam = 0.0
    for _ in range(maxiter):
        u = _solve_poisson_1d(u, h)
        u /= np.max(np.abs(u))
        new = _edge_energy(u, h) / (h * np.sum(u * u))
        if abs(new - lam) <= tol * new:
            return new
        lam = new
    raise ConvergenceError("1-D inverse power iteration did not converge")


def _torsion_value_1d(n: int) -> float:
    h = 1.0 / (n + 1)
    w = _solve_poisson_1d(np.ones(n), h)
    return float(h * np.sum(w))


def _sublinear_profile(q: float, n: int, a: float, b: float,
                       symmetrize: bool, tol: float = 1e-13,
                       maxiter: int = 500) -> tuple[np.ndarray, float, float]:
    """Fixed point of v -> normalized inverse Laplacian of v^(q-1) on (a, b).

    Returns (v, m, h) with v sup-normalized and m the last normalization
    factor, so the solution of -w'' = w^(q-1) is m^(1/(2-q)) * v.
    """
    h = (b - a) / (n + 1)
    x = a + h * np.arange(1, n + 1)
    v = (x - a) * (b - x)
    v /= np.max(v)
    m = 1.0
    for _ in range(maxiter):
        z = _solve_poisson_1d(v ** (q - 1.0), h)
        if symmetrize:
            z = 0.5 * (z + z[::-1])
        m = float(np.max(z))
        v_new = z / m
        if float(np.max(np.abs(v_new - v))) <= tol:
            return v_new, m, h
        v = v_new
    raise ConvergenceError("1-D sublinear fixed point did not converge")


def _frequency_1d(q: float, n: int, a: float = 0.0, b: float = 1.0) -> float:
    """Principal frequency of (a, b) for exponent q at one resolution."""
    if q == 2.0:
        return _eigenvalue_1d(n) / (b - a) ** 2
    if q == 1.0:
        h = (b - a) / (n + 1)
        w = _solve_poisson_1d(np.ones(n), h)
        return 1.0 / float(h * np.sum(w))
    v, m, h = _sublinear_profile(q, n, a, b, symmetrize=True)
    # energy formula for w = m^(1/(2-q)) v, kept in log space since the
    # normalization factor is raised to a power that blows up near q = 2
    log_energy = 2.0 * np.log(m) / (2.0 - q) + np.log(_edge_energy(v, h))
    return float(np.exp(-(2.0 - q) / q * log_energy))


def sobolev_poincare_1d(q: float, n: int = 1024) -> float:
    """The optimal constant inf ||u'||_2 / ||u||_q over profiles on (0, 1).

    Square root of the interval's principal frequency, computed by the
    1-D analogue of the planar solvers and Richardson-extrapolated over
    the (n, 2n) grid pair; the stencils are second order, so the
    extrapolation removes the leading error term.
    """
    if not 1.0 <= q <= 2.0:
        raise ValueError("q must lie in [1, 2]")
    if n < 256:
        raise ValueError("need at least 256 nodes")
    coarse = _frequency_1d(q, n)
    fine = _frequency_1d(q, 2 * n)
    return float(np.sqrt(fine + (fine - coarse) / 3.0))


def interval_frequency(q: float, n: int = 1024) -> float:
    """Principal frequency of (-1, 1): the (0, 1) constant rescaled.

    Dilating (0, 1) onto (-1, 1) scales energies by the factor
    2^(-(2+q)/q), giving the frequency directly from the
    Sobolev-Poincare constant.
    """
    return sobolev_poincare_1d(q, n) ** 2 * 2.0 ** (-(2.0 + q) / q)


def interval_profile(q: float, n: int = 1024) -> Profile1D:
    """Positive even solution of -g'' = g^(q-1) on (-1, 1), vanishing at ends.

    Sublinear fixed-point iteration with per-iteration symmetrization to
    pin the even solution; the returned profile is concave and increasing
    up to the midpoint.  At q = 1 the right side is constant and the fixed
    point is the parabola (1 - x^2)/2.  q = 2 is excluded: there the
    profile normalization is not determined by the equation.
    """
    if not 1.0 <= q < 2.0:
        raise ValueError("q must lie in [1, 2)")
    if n < 256:
        raise ValueError("need at least 256 nodes")
    v, m, h = _sublinear_profile(q, n, -1.0, 1.0, symmetrize=True)
    with np.errstate(over="ignore"):
        scale = m ** (1.0 / (2.0 - q))
    if not np.isfinite(scale):
        raise ConvergenceError("profile normalization overflowed")
    return Profile1D(n=n, h=h, values=scale * v, q=q)
