"""Acceptance gate: nine numbered criteria, one verdict line each.

Verdicts print with output capture suspended so they appear in every
run, passing or failing; every criterion also asserts, so the suite
fails loudly when a budget is broken.  Tolerances are pinned constants,
not knobs.
"""

import math
import sys
import time

import numpy as np
import pytest

from dualfreq import (
    FEASIBILITY_TOL,
    VectorField,
    bound_report,
    build_disk,
    build_rectangle,
    cheeger_constant_rectangle,
    conjugate_bruteforce,
    conjugate_closed_form,
    gradient,
    build_pair,
    primal_integrand,
    protter_hersch_lower_bound,
    rescaled_conjugate_identity_check,
    richardson,
    sobolev_poincare_1d,
    interval_frequency,
    solve_frequency,
    solve_sublinear,
    solve_torsion,
    weak_duality_certificate,
)

DISK_EIGENVALUE = 5.78319  # square of the first Bessel zero j_{0,1}
SQUARE_EIGENVALUE = 2.0 * math.pi**2
TORSION_DISK = math.pi / 8.0

GAP_BUDGETS = {1.0: 0.01, 1.25: 0.03, 1.5: 0.03, 1.75: 0.03, 2.0: 0.02}


@pytest.fixture
def verdict(capfd):
    def _verdict(n: int, ok: bool, detail: str) -> None:
        with capfd.disabled():
            print(f"criterion {n} {'PASS' if ok else 'FAIL'}: {detail}",
                  file=sys.stderr, flush=True)
        assert ok, f"criterion {n}: {detail}"
    return _verdict


def test_criterion_1_torsion_golden(domains, verdict):
    dom = domains("disk", 1 / 128)
    t0 = time.perf_counter()
    sol = solve_torsion(dom)
    elapsed = time.perf_counter() - t0
    T = 1.0 / sol.lambda1
    rel = abs(T - TORSION_DISK) / TORSION_DISK
    verdict(1, rel <= 0.01 and elapsed < 10.0,
             f"disk rigidity {T:.6f} vs pi/8 ({rel:.3%}), {elapsed:.1f}s")


def test_criterion_2_eigen_golden(solutions, verdict):
    sq = richardson(solutions("square", 2.0, 1 / 64).lambda1,
                    solutions("square", 2.0, 1 / 128).lambda1)
    dk = richardson(solutions("disk", 2.0, 1 / 64).lambda1,
                    solutions("disk", 2.0, 1 / 128).lambda1)
    rel_sq = abs(sq - SQUARE_EIGENVALUE) / SQUARE_EIGENVALUE
    rel_dk = abs(dk - DISK_EIGENVALUE) / DISK_EIGENVALUE
    verdict(2, rel_sq <= 0.01 and rel_dk <= 0.01,
             f"square {sq:.5f} ({rel_sq:.4%}), disk {dk:.5f} ({rel_dk:.4%})")


def test_criterion_3_one_dimensional_constants(verdict):
    err2 = abs(sobolev_poincare_1d(2.0) - math.pi)
    err1 = abs(sobolev_poincare_1d(1.0) - 2.0 * math.sqrt(3.0))
    worst = 0.0
    for q in (1.25, 1.5, 1.75):
        lhs = interval_frequency(q)
        rhs = sobolev_poincare_1d(q) ** 2 * 2.0 ** (-(2.0 + q) / q)
        worst = max(worst, abs(lhs - rhs) / rhs)
    verdict(3, err2 <= 1e-4 and err1 <= 1e-4 and worst <= 1e-3,
             f"pi_2q endpoint errors {err1:.2e}/{err2:.2e}, "
             f"interval identity {worst:.2e}")


def test_criterion_4_conjugate_correctness(verdict):
    t0 = time.perf_counter()
    worst_closed = 0.0
    worst_ident = 0.0
    for q in (1.2, 1.5, 1.8):
        rng = np.random.default_rng(0)
        s = -(10.0 ** rng.uniform(-1.5, 1.5, 100))
        m = 10.0 ** rng.uniform(-1.5, 1.5, 100)
        for sk, mk in zip(s, m):
            closed = conjugate_closed_form(q, sk, mk)
            brute = conjugate_bruteforce(
                lambda t, x: primal_integrand(q, t, x), sk, mk)
            worst_closed = max(worst_closed, abs(brute - closed) / abs(closed))
            lhs, rhs = rescaled_conjugate_identity_check(q, sk, mk)
            worst_ident = max(worst_ident, abs(lhs - rhs) / abs(rhs))
    elapsed = time.perf_counter() - t0
    verdict(4, worst_closed <= 1e-3 and worst_ident <= 1e-3 and elapsed < 60.0,
             f"closed-form error {worst_closed:.2e}, rescaling {worst_ident:.2e}, "
             f"{elapsed:.1f}s")


def test_criterion_5_duality_gap_certification(domains, solutions, verdict):
    lines = []
    ok = True
    for kind in ("disk", "square"):
        for q in (1.0, 1.25, 1.5, 1.75, 2.0):
            gaps = []
            for h in (1 / 32, 1 / 64, 1 / 128):
                dom = domains(kind, h)
                sol = solutions(kind, q, h)
                pair = build_pair(dom, q, solution=sol)
                rep = weak_duality_certificate(dom, q, pair, solution=sol)
                ok = ok and pair.feasibility_residual >= -FEASIBILITY_TOL
                gaps.append(abs(rep.gap_relative))
            ok = ok and gaps[-1] <= GAP_BUDGETS[q]
            if q in (1.25, 1.5, 1.75):
                ok = ok and gaps[0] > gaps[1] > gaps[2]
            lines.append(f"{kind} q={q}: {gaps[2]:.4%}")
    verdict(5, ok, "; ".join(lines))


def test_criterion_6_protter_hersch(solutions, verdict):
    sol = solutions("disk", 2.0, 1 / 128)
    dom = sol.w.domain
    slope = -gradient(dom, sol.w).values / sol.w.values[:, None]
    bound = protter_hersch_lower_bound(VectorField(dom, slope), trim=2)
    verdict(6, bound >= 0.9 * sol.lambda1,
             f"bound {bound:.5f} vs 0.9*lambda = {0.9 * sol.lambda1:.5f}")


def test_criterion_7_bound_sandwich(domains, verdict):
    h = 1 / 64
    qs = [1.0, 1.25, 1.5, 1.75, 2.0]
    h1 = {
        "disk": 2.0,
        "square": cheeger_constant_rectangle(1.0, 1.0),
        "rect8": cheeger_constant_rectangle(8.0, 1.0),
        "lshape": None,
    }
    ok = True
    fails = []
    for kind in ("disk", "square", "rect8", "lshape"):
        rep = bound_report(domains(kind, h), qs, h1=h1[kind], tol=0.02)
        if not rep.all_satisfied:
            ok = False
            fails.extend(f"{kind}:{r.q}:{r.name}" for r in rep.rows
                         if r.satisfied is False)
        if kind == "lshape":
            continue
        vals = {(r.q, r.name): r.value for r in rep.rows}
        for q in qs:
            per = vals[(q, "hersch_makai_perimeter")]
            inr = vals[(q, "hersch_makai_inradius")]
            tra = vals[(q, "transplant")]
            if per > inr * (1 + 1e-12):
                ok = False
                fails.append(f"{kind}:{q}:per>inr")
            if np.isfinite(tra) and per > tra * (1 + 1e-12):
                ok = False
                fails.append(f"{kind}:{q}:per>transplant")
    verdict(7, ok, "all rows satisfied, orderings hold" if ok
             else "violations: " + ", ".join(fails))


def test_criterion_8_perimeter_sharpness_trend(verdict):
    h = 1 / 32
    slacks = []
    for L in (2, 4, 8, 16):
        dom = build_rectangle(float(L), 1.0, h)
        lam = solve_sublinear(dom, 1.5).lambda1
        rep = bound_report(dom, [1.5], tol=0.02)
        per = {r.name: r.value for r in rep.rows}["hersch_makai_perimeter"]
        slacks.append(lam / per)
    monotone = all(a > b for a, b in zip(slacks, slacks[1:]))
    verdict(8, monotone and slacks[-1] <= 1.3,
             "slacks " + ", ".join(f"{s:.4f}" for s in slacks))


def test_criterion_9_invariant_suites(domains, solutions, verdict):
    t0 = time.perf_counter()
    # scaling law on congruent grids
    lam_small = solutions("disk", 1.5, 1 / 32).lambda1
    lam_big = solve_sublinear(build_disk(2.0, 1 / 16), 1.5).lambda1
    scale_err = abs(lam_big / (2.0 ** (-4.0 / 1.5) * lam_small) - 1.0)
    # domain monotonicity on nested squares
    lams = [solve_frequency(build_rectangle(a, a, 1 / 32), 1.5).lambda1
            for a in (1.0, 1.5, 2.0)]
    monotone = lams[0] > lams[1] > lams[2]
    # q-limit continuity
    dom = domains("disk", 1 / 32)
    lim1 = solve_frequency(dom, 1.01).lambda1
    lim2 = solve_frequency(dom, 1.99).lambda1
    t_err = abs(lim1 / solutions("disk", 1.0, 1 / 32).lambda1 - 1.0)
    e_err = abs(lim2 / solutions("disk", 2.0, 1 / 32).lambda1 - 1.0)
    elapsed = time.perf_counter() - t0
    verdict(9, scale_err <= 0.01 and monotone and t_err <= 0.03
             and e_err <= 0.03 and elapsed < 300.0,
             f"scaling {scale_err:.2e}, nested {lams[0]:.2f}>{lams[1]:.2f}>"
             f"{lams[2]:.2f}, q-limits {t_err:.3%}/{e_err:.3%}, {elapsed:.0f}s")
