"""Integrands and Legendre transforms behind the duality machinery.

Extended-real convention: every function here returns ordinary floats
plus +inf as the out-of-domain sentinel; NaN never escapes.  The primal
integrand is the convexified Dirichlet density in the substituted
variable, the dual integrand is the density whose L^p norm certifies
frequency lower bounds, and the two are linked by a closed-form
Legendre-Fenchel conjugate with an explicit constant.
"""

from __future__ import annotations

import numpy as np

INF = float("inf")


def _magnitude(xi):
    """|xi| for a scalar, a 2-vector, an array of magnitudes, or (n,2) vectors."""
    arr = np.asarray(xi, dtype=float)
    if arr.ndim == 0:
        return np.abs(arr)
    if arr.ndim == 1 and arr.shape == (2,):
        return np.hypot(arr[0], arr[1])
    if arr.ndim == 2 and arr.shape[1] == 2:
        return np.hypot(arr[:, 0], arr[:, 1])
    return np.abs(arr)


def _check_q_open(q: float) -> float:
    q = float(q)
    if not 1.0 < q < 2.0:
        raise ValueError(f"q={q} outside the open interval (1, 2)")
    return q


def _check_q_closed(q: float) -> float:
    q = float(q)
    if not 1.0 <= q <= 2.0:
        raise ValueError(f"q={q} outside [1, 2]")
    return q


def primal_integrand(q: float, t, x):
    """|x|^2 t^(2/q-2) for t > 0, zero at the origin, +inf elsewhere.

    Positively 2/q-homogeneous and jointly convex; this is the density
    that turns the substituted minimization problem convex.
    """
    q = _check_q_closed(q)
    t_arr = np.asarray(t, dtype=float)
    m = _magnitude(x)
    t_b, m_b = np.broadcast_arrays(t_arr, m)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        body = np.where(t_b > 0, m_b ** 2 * np.power(np.maximum(t_b, 1e-300), 2.0 / q - 2.0), INF)
    out = np.where(t_b > 0, body, np.where((t_b == 0) & (m_b == 0), 0.0, INF))
    return float(out) if out.ndim == 0 else out


def dual_integrand(q: float, s, xi):
    """|xi|^q / |s|^(q-1) for s < 0, zero at the origin, +inf elsewhere."""
    q = _check_q_closed(q)
    s_arr = np.asarray(s, dtype=float)
    m = _magnitude(xi)
    s_b, m_b = np.broadcast_arrays(s_arr, m)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        body = np.where(s_b < 0, m_b ** q / np.power(np.abs(np.minimum(s_b, -1e-300)), q - 1.0), INF)
    out = np.where(s_b < 0, body, np.where((s_b == 0) & (m_b == 0), 0.0, INF))
    return float(out) if out.ndim == 0 else out


def conjugate_constant(q: float) -> float:
    """Multiplicative constant of the closed-form conjugate, q in (1, 2).

    Tends to 1/4 as q -> 1+ and to 0 as q -> 2-; endpoint q values are a
    domain error because the conjugate degenerates there.
    """
    q = _check_q_open(q)
    return ((2.0 - q) / (2.0 * q)
            * ((q - 1.0) / q) ** (2.0 * (q - 1.0) / (2.0 - q))
            * 0.5 ** (q / (2.0 - q)))


def _log_conjugate_constant(q: float) -> float:
    # log of conjugate_constant with the exponent blowup kept in log space
    return (np.log((2.0 - q) / (2.0 * q))
            + (2.0 * (q - 1.0) / (2.0 - q)) * np.log((q - 1.0) / q)
            + (q / (2.0 - q)) * np.log(0.5))


def conjugate_closed_form(q: float, s, xi):
    """Legendre-Fenchel conjugate of the primal integrand, in closed form.

    Finite only on s < 0 (and at the origin); positively 2/(2-q)
    homogeneous in (s, xi).  Evaluated through logarithms because the
    constant and the two powers cancel across hundreds of orders of
    magnitude as q approaches 2.
    """
    q = _check_q_open(q)
    log_a = _log_conjugate_constant(q)
    s_arr = np.asarray(s, dtype=float)
    m = _magnitude(xi)
    s_b, m_b = np.broadcast_arrays(s_arr, m)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        log_body = (log_a
                    + (2.0 * q / (2.0 - q)) * np.log(np.maximum(m_b, 1e-300))
                    + (2.0 * (1.0 - q) / (2.0 - q)) * np.log(np.abs(np.minimum(s_b, -1e-300))))
        body = np.where(m_b == 0, 0.0, np.exp(log_body))
    out = np.where(s_b < 0, body, np.where((s_b == 0) & (m_b == 0), 0.0, INF))
    return float(out) if out.ndim == 0 else out


_GRID_FLOOR = 1e-280
_GRID_CEIL = 1e280


def conjugate_bruteforce(f, s: float, xi, n: int = 64,
                         box_scale: float | None = None, passes: int = 12) -> float:
    """Sampled lower estimate of the Legendre-Fenchel conjugate of f at (s, xi).

    f is a black-box integrand (t, x) -> value, vectorized or scalar, with
    x a 2-vector; +inf marks points outside its domain.  Rotational
    reduction aligns x with xi, so the search runs over (t, m) in the
    first quadrant.  The maximizer rides a curved ridge m(t) spanning many
    decades, which defeats joint rectangular zooming, so the search nests:
    for every t sample the inner variable is maximized by its own adaptive
    geometric grid, and the resulting profile in t is then refined by
    bracket zooms, chasing window edges outward or inward as needed.
    Always returns a finite value.
    """
    if n < 64:
        raise ValueError("need at least 64 samples per axis")
    s = float(s)
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float)).ravel()
    if xi_arr.size == 1:
        # scalar xi is a magnitude; align it with the first axis
        xi_arr = np.array([abs(float(xi_arr[0])), 0.0])
    m_xi = float(np.sqrt(np.sum(xi_arr**2)))
    unit = xi_arr / m_xi if m_xi > 0 else np.array([1.0, 0.0])
    if box_scale is None:
        box_scale = 10.0 * max(m_xi, 1.0) * max(1.0, 1.0 / abs(s) if s != 0 else 1.0)
    inner_passes = max(6, passes - 2)
    ramp = np.linspace(0.0, 1.0, n)[None, :]

    def row_values(t_flat, m_flat):
        # objective without the per-row constant s*t, which would otherwise
        # absorb the m-variation below float resolution when |s*t| is huge
        x = m_flat[:, None] * unit[None, :]
        try:
            out = np.asarray(f(t_flat, x), dtype=float)
            if out.shape != t_flat.shape:
                raise ValueError
        except Exception:
            out = np.array([float(f(ti, row)) for ti, row in zip(t_flat, x)])
        with np.errstate(invalid="ignore"):
            vals = m_flat * m_xi - out
        return np.where(np.isfinite(vals), vals, -INF)

    def profile(t):
        # partial max over m for every t sample, adaptive per-row windows
        nt = t.size
        lo = np.full(nt, max(box_scale * 1e-12, _GRID_FLOOR))
        hi = np.full(nt, box_scale)
        vbest = row_values(t, np.zeros(nt))  # the m = 0 column
        t_rep = np.repeat(t, n)
        rows = np.arange(nt)
        for _ in range(inner_passes):
            with np.errstate(over="ignore", under="ignore"):
                g = lo[:, None] * (hi / lo)[:, None] ** ramp
            vals = row_values(t_rep, g.ravel()).reshape(nt, n)
            j = np.argmax(vals, axis=1)
            vbest = np.maximum(vbest, vals[rows, j])
            b = g[rows, j]
            g_lo = g[rows, np.maximum(j - 1, 0)]
            g_hi = g[rows, np.minimum(j + 1, n - 1)]
            # next window spans the argmax's grid neighbours, widening only
            # the pinned side so an overshot peak is never dropped
            lo = np.where(j == 0, np.maximum(b * 1e-12, _GRID_FLOOR), g_lo)
            hi = np.where(j == n - 1, np.minimum(b * 1e12, _GRID_CEIL), g_hi)
        with np.errstate(invalid="ignore"):
            v = s * t + vbest
        return np.where(np.isnan(v), -INF, v)

    best = 0.0  # the origin is always admissible: s*0 + 0*|xi| - f(0,0) = 0
    t = np.concatenate(([0.0], np.geomspace(max(box_scale * 1e-12, _GRID_FLOOR),
                                            box_scale, n - 1)))
    for _ in range(passes):
        v = profile(t)
        k = int(np.argmax(v))
        best = max(best, float(v[k]))
        b = float(t[k])
        if b <= 0.0:
            top = float(t[1]) if t[0] == 0.0 else float(t[0])
            t = np.concatenate(([0.0], np.geomspace(max(top * 1e-12, _GRID_FLOOR),
                                                    top, n - 1)))
            continue
        # neighbour bracket, widened only on a pinned side
        if k > 0 and t[k - 1] > 0.0:
            lo = float(t[k - 1])
        else:
            lo = max(b * 1e-12, _GRID_FLOOR)
        hi = float(t[k + 1]) if k < t.size - 1 else min(b * 1e12, _GRID_CEIL)
        t = np.geomspace(lo, hi, n)
    return best


def rescaled_conjugate_identity_check(q: float, s: float, xi,
                                      n: int = 64, passes: int = 12) -> tuple[float, float]:
    """Both sides of the rescaled-conjugate identity at one point.

    lhs: brute-force conjugate of the primal integrand divided by 2q, so
    the check exercises the sampling oracle rather than the closed form.
    rhs: the dual integrand raised to 2/(2-q) with its sub-homogeneity
    constant, assembled in log space because the factors cancel across
    many orders of magnitude as q approaches 2.
    """
    q = _check_q_open(q)
    s = float(s)
    m = float(_magnitude(xi))
    if m == 0.0 and s <= 0.0:
        return 0.0, 0.0

    def scaled(t, x):
        return primal_integrand(q, t, x) / (2.0 * q)

    lhs = conjugate_bruteforce(scaled, s, xi, n=n, passes=passes)
    if s >= 0.0:
        return lhs, INF
    r = 1.0 / (2.0 - q)
    log_g = q * np.log(m) - (q - 1.0) * np.log(-s)
    log_rhs = (np.log((2.0 - q) / 2.0) + 2.0 * (q - 1.0) * r * np.log(q - 1.0)
               + 2.0 * r * log_g)
    with np.errstate(over="ignore"):
        return lhs, float(np.exp(log_rhs))
