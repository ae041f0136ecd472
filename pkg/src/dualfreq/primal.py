"""Primal solvers for the generalized principal frequency of a grid domain.

The frequency interpolates between the reciprocal torsional rigidity
(q = 1) and the first Dirichlet eigenvalue (q = 2); strictly in between
it comes from the sublinear equation -lap w = w^(q-1), whose unique
positive solution is found by a normalized fixed-point iteration.  Each
solver reports the frequency twice, through formulas with independent
discretization error, so a silent quadrature bug cannot hide.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .convex import primal_integrand
from .elliptic import (
    ConvergenceError,
    ScalarField,
    apply_laplacian,
    dirichlet_energy,
    gradient,
    gradient_energy,
    integrate,
    integrate_corrected,
    solve_poisson,
)
from .geometry import GridDomain

__all__ = [
    "FrequencySolution",
    "solve_torsion",
    "solve_eigen",
    "solve_sublinear",
    "solve_frequency",
    "rayleigh",
    "hidden_functional",
    "richardson",
]


@dataclass(frozen=True)
class FrequencySolution:
    """Extremal function and frequency of one solve.

    lambda1 comes from the solver's variational formula and lambda1_alt
    from an independent one (Rayleigh quotient with boundary-corrected
    quadrature, or the successive-iterate ratio for the eigenvalue
    route).  primal_max is the value of the unconstrained concave
    maximization equivalent to the frequency problem for q < 2; it has
    no finite analogue at q = 2 and is None there.
    """

    q: float
    w: ScalarField
    lambda1: float
    lambda1_alt: float
    primal_max: float | None
    iterations: int
    residual: float

    def __post_init__(self):
        if not 1.0 <= self.q <= 2.0:
            raise ValueError("q must lie in [1, 2]")
        if np.any(self.w.values <= 0):
            raise ValueError("extremal function must be strictly positive inside")
        for name in ("lambda1", "lambda1_alt"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive")

    @property
    def h(self) -> float:
        return self.w.domain.h

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "lambda1": self.lambda1,
            "lambda1_alt": self.lambda1_alt,
            "primal_max": self.primal_max,
            "iterations": self.iterations,
            "residual": self.residual,
            "h": self.h,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def rayleigh(u: ScalarField, q: float) -> float:
    """Discrete Rayleigh quotient: gradient energy over the L^q norm squared.

    Uses the boundary-corrected gradient quadrature, which carries a
    different discretization error than the summation-by-parts energy the
    solvers minimize; agreement between the two is a genuine cross-check.
    """
    if not 1.0 <= q <= 2.0:
        raise ValueError("q must lie in [1, 2]")
    dom = u.domain
    vals = u.values
    mass = integrate(dom, np.abs(vals) ** q)
    if mass == 0.0:
        raise ValueError("Rayleigh quotient of the zero field")
    return gradient_energy(dom, u) / mass ** (2.0 / q)


def richardson(coarse: float, fine: float, order: int = 2) -> float:
    """Extrapolate a pair of values from grids with spacing ratio two."""
    if order < 1:
        raise ValueError("order must be a positive integer")
    return fine + (fine - coarse) / (2.0**order - 1.0)


def _primal_max(q: float, q_mass: float, energy: float) -> float:
    # value of the unconstrained maximization at the extremal
    return (2.0 / q) * q_mass - energy


def solve_torsion(dom: GridDomain, tol: float = 1e-10) -> FrequencySolution:
    """Frequency at q = 1: the reciprocal of the torsional rigidity.

    One Poisson solve with unit right side; the rigidity is the mass of
    the solution.
    """
    info: dict = {}
    w = solve_poisson(dom, 1.0, tol=tol, info=info)
    torsion = integrate(dom, w.values)
    return FrequencySolution(
        q=1.0,
        w=w,
        lambda1=1.0 / torsion,
        lambda1_alt=rayleigh(w, 1.0),
        primal_max=_primal_max(1.0, torsion, dirichlet_energy(dom, w)),
        iterations=info["iterations"],
        residual=info["residual"],
    )


def solve_eigen(dom: GridDomain, tol: float = 1e-10,
                maxiter: int = 200) -> FrequencySolution:
    """Frequency at q = 2: the first Dirichlet eigenvalue, by inverse power.

    Each step solves the Poisson problem with the current iterate as
    right side, warm-started from the previous step.  lambda1 is the
    energy Rayleigh quotient of the final iterate; lambda1_alt is the
    ratio of successive iterates, which estimates the same eigenvalue
    through the inverse operator instead.
    """
    u = solve_poisson(dom, 1.0, tol=min(tol, 1e-11)).values
    u /= np.max(u)
    lam = 0.0
    alt = 0.0
    for it in range(1, maxiter + 1):
        guess = u / lam if lam > 0 else None
        z = solve_poisson(dom, u, tol=min(tol, 1e-11), x0=guess).values
        alt = float(np.dot(u, u) / np.dot(u, z))
        u_new = z / np.max(z)
        new = dirichlet_energy(dom, ScalarField(dom, u_new)) / integrate(dom, u_new * u_new)
        if lam > 0 and abs(new - lam) <= tol * new:
            lam = new
            u = u_new
            break
        lam = new
        u = u_new
    else:
        raise ConvergenceError(f"inverse power iteration hit the {maxiter}-step cap")
    u /= math.sqrt(integrate(dom, u * u))
    U = ScalarField(dom, u)
    res_vec = apply_laplacian(dom, U).values - lam * u
    residual = float(np.linalg.norm(res_vec) / (lam * np.linalg.norm(u)))
    return FrequencySolution(
        q=2.0,
        w=U,
        lambda1=lam,
        lambda1_alt=alt,
        primal_max=None,
        iterations=it,
        residual=residual,
    )


def solve_sublinear(dom: GridDomain, q: float, tol: float = 1e-9,
                    maxiter: int = 300) -> FrequencySolution:
    """Frequency for 1 < q < 2 via the normalized sublinear fixed point.

    Iterates v <- (-lap)^(-1) v^(q-1) with sup-normalization: if the
    normalized iteration settles at -lap v = mu v^(q-1) with max v = 1,
    then w = mu^(1/(2-q)) v solves the unnormalized equation.  The
    iteration starts from the torsion function, which is positive with
    the right boundary decay.  Convergence requires both the successive
    sup-distance and the weak equation residual to drop below tol.  The
    frequency follows from the energy identity of the extremal, with the
    rescaling handled in log space because mu^(1/(2-q)) degenerates
    toward q = 2.
    """
    if not 1.0 < q < 2.0:
        raise ValueError("q must lie strictly inside (1, 2); "
                         "the endpoint solvers handle q = 1 and q = 2")
    inner_tol = min(1e-11, 0.01 * tol)
    v = solve_poisson(dom, 1.0, tol=inner_tol).values
    v /= np.max(v)
    mu = 1.0
    z_prev = None
    for it in range(1, maxiter + 1):
        rhs = v ** (q - 1.0)
        z = solve_poisson(dom, rhs, tol=inner_tol, x0=z_prev).values
        z_prev = z
        mu = float(np.max(z))
        v_new = z / mu
        dist = float(np.max(np.abs(v_new - v)))
        lap = apply_laplacian(dom, ScalarField(dom, mu * v_new)).values
        target = v_new ** (q - 1.0)
        residual = float(np.linalg.norm(lap - target) / np.linalg.norm(target))
        v = v_new
        if dist <= tol and residual <= tol:
            break
    else:
        raise ConvergenceError(
            f"sublinear fixed point did not reach tol {tol:.1e} in {maxiter} "
            f"iterations (sup-distance {dist:.3e}, residual {residual:.3e})")
    log_scale = math.log(mu) / (2.0 - q)
    scale = math.exp(log_scale)
    if not (np.isfinite(scale) and scale > 0):
        raise ConvergenceError(f"extremal rescaling degenerates at q = {q}")
    w = ScalarField(dom, scale * v)
    log_energy = 2.0 * log_scale + math.log(dirichlet_energy(dom, ScalarField(dom, v)))
    lambda1 = math.exp(-(2.0 - q) / q * log_energy)
    log_mass = q * log_scale + math.log(integrate(dom, v**q))
    primal_max = (2.0 / q) * math.exp(log_mass) - math.exp(log_energy)
    return FrequencySolution(
        q=q,
        w=w,
        lambda1=lambda1,
        lambda1_alt=rayleigh(w, q),
        primal_max=primal_max,
        iterations=it,
        residual=residual,
    )


def solve_frequency(dom: GridDomain, q: float, tol: float | None = None) -> FrequencySolution:
    """Dispatch to the solver owning the exponent q."""
    if not 1.0 <= q <= 2.0:
        raise ValueError("q must lie in [1, 2]")
    if q == 1.0:
        return solve_torsion(dom) if tol is None else solve_torsion(dom, tol)
    if q == 2.0:
        return solve_eigen(dom) if tol is None else solve_eigen(dom, tol)
    return solve_sublinear(dom, q) if tol is None else solve_sublinear(dom, q, tol)


def hidden_functional(psi: ScalarField, q: float) -> float:
    """The concave functional whose maximum equals the primal value.

    Evaluates (2/q) * mass(psi) - (1/q^2) * mass of the primal integrand
    at (psi, grad psi).  Two quadrature choices keep the boundary honest:
    psi behaves like the q-th power of the distance there, so its
    gradient is formed through the smooth variable psi^(1/q) and the
    exact identity F_q(psi, grad psi) = q^2 |grad psi^(1/q)|^2, and both
    masses use the boundary-corrected weights because the integrand term
    stays order one on the half-cell strip.  Returns +inf when any node
    leaves the integrand's effective domain (psi = 0 with a nonzero raw
    gradient there).
    """
    if not 1.0 < q < 2.0:
        raise ValueError("q must lie strictly inside (1, 2)")
    vals = psi.values
    if np.any(vals < 0):
        raise ValueError("psi must be nonnegative")
    dom = psi.domain
    zero = vals == 0.0
    raw = gradient(dom, psi).values
    if np.any(zero & (np.abs(raw).sum(axis=1) > 0)):
        return float("inf")
    root = ScalarField(dom, vals ** (1.0 / q))
    chain = q * vals ** (1.0 - 1.0 / q)
    grad = chain[:, None] * gradient(dom, root).values
    f = primal_integrand(q, vals, grad)
    if np.any(np.isinf(f)):
        return float("inf")
    return (2.0 / q) * integrate_corrected(dom, vals) - integrate_corrected(dom, f) / q**2
