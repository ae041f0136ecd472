"""Batch front end: solve, certify, and report over (domain, q, h) grids.

Commands
    solve            primal solves, one JSON line per (q, h)
    dual             certificate pipeline: build pair, check feasibility, gap
    bounds           geometric estimate report rows
    constants        one-dimensional reference constants over a q grid
    conjugate-check  brute-force conjugate vs closed form on sampled points
    report           solve + dual + bounds combined per (q, h)

Output is JSON lines by default (CSV via --format csv), written to stdout
or --out.  A relative --out resolves against $DUALFREQ_OUT when set.  q and
h flags accept exact rationals ("1/128") so sweeps round-trip exactly.
Identical configurations, including --seed, produce byte-identical output.

Exit codes: 0 success, 1 numerical acceptance failure (non-convergence,
budget or bound violation), 2 configuration or IO error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bounds import DEFAULT_TOL, bound_report
from .convex import conjugate_bruteforce, conjugate_closed_form, \
    primal_integrand, rescaled_conjugate_identity_check
from .dual import FEASIBILITY_TOL, build_pair, weak_duality_certificate
from .geometry import domain_from_spec, load_domain
from .onedim import interval_frequency, sobolev_poincare_1d
from .primal import solve_frequency

__all__ = ["ConfigError", "RunConfig", "main"]

OUTPUT_DIR_ENV = "DUALFREQ_OUT"

_GAP_BUDGETS = {1.0: 0.01, 2.0: 0.02}
_DEFAULT_GAP_BUDGET = 0.03
_DEFAULT_H = 1.0 / 64.0


class ConfigError(ValueError):
    """Invalid configuration or unreadable input; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Validated invocation: all q in [1, 2], h positive and decreasing."""

    command: str
    domain: str | None
    qs: tuple
    hs: tuple
    tol: float | None
    fmt: str
    out: str | None
    seed: int
    h1: float | None = None
    q_grid: tuple = ()
    export_pair: str | None = None

    def __post_init__(self):
        for q in tuple(self.qs) + tuple(self.q_grid):
            if not 1.0 <= q <= 2.0:
                raise ConfigError(f"q={q} outside [1, 2]")
        if any(h <= 0 for h in self.hs):
            raise ConfigError("h values must be positive")
        if list(self.hs) != sorted(self.hs, reverse=True) or \
                len(set(self.hs)) != len(self.hs):
            raise ConfigError("h values must be strictly decreasing")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        if self.tol is not None and self.tol <= 0:
            raise ConfigError("tol must be positive")


def _rational(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a rational number: {text!r}") from exc


def _rational_list(text: str) -> tuple:
    return tuple(_rational(part) for part in text.split(",") if part.strip())


def _parse_q_grid(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("--q-grid needs the form a:b:step")
    try:
        a, b, step = (Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad q grid {text!r}") from exc
    if step <= 0 or b < a:
        raise ConfigError("q grid needs step > 0 and b >= a")
    out = []
    k = 0
    while a + k * step <= b:
        out.append(float(a + k * step))
        k += 1
    return tuple(out)


def _resolve_domains(cfg: RunConfig):
    """(h, domain) pairs for the run; literals are built per h value."""
    if cfg.domain is None:
        raise ConfigError("this command needs --domain")
    spec = cfg.domain
    if spec.partition(":")[0].lower() in ("disk", "rect", "poly"):
        hs = cfg.hs or (_DEFAULT_H,)
        try:
            return [(h, domain_from_spec(spec, h)) for h in hs]
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad domain literal {spec!r}: {exc}") from exc
    if cfg.hs:
        raise ConfigError("domain files carry their own grid spacing; drop --h")
    try:
        dom = load_domain(spec)
    except OSError as exc:
        raise ConfigError(f"cannot read domain file {spec!r}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"malformed domain file {spec!r}: {exc}") from exc
    return [(dom.h, dom)]


def _emit(records, cfg: RunConfig) -> None:
    if cfg.fmt == "json":
        text = "".join(json.dumps(r) + "\n" for r in records)
    else:
        fields = []
        for rec in records:
            for key in rec:
                if key not in fields:
                    fields.append(key)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, restval="")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: "" if v is None else v for k, v in rec.items()})
        text = buf.getvalue()
    if cfg.out is None:
        sys.stdout.write(text)
        return
    path = cfg.out
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def cmd_solve(cfg: RunConfig) -> int:
    records = []
    failed = False
    for h, dom in _resolve_domains(cfg):
        for q in cfg.qs:
            try:
                sol = solve_frequency(dom, q, tol=cfg.tol)
            except Exception as exc:
                records.append({"command": "solve", "domain": cfg.domain,
                                "q": q, "h": h, "error": str(exc)})
                failed = True
                continue
            records.append({"command": "solve", "domain": cfg.domain,
                            **sol.as_dict()})
    _emit(records, cfg)
    return 1 if failed else 0


def _gap_budget(q: float, tol: float | None) -> float:
    if tol is not None:
        return tol
    return _GAP_BUDGETS.get(q, _DEFAULT_GAP_BUDGET)


def cmd_dual(cfg: RunConfig) -> int:
    pairs = _resolve_domains(cfg)
    if cfg.export_pair is not None and len(pairs) * len(cfg.qs) != 1:
        raise ConfigError("--export-pair needs exactly one (q, h) combination")
    records = []
    failed = False
    for h, dom in pairs:
        for q in cfg.qs:
            try:
                # --tol loosens the gap budget, never the solver: a sloppy
                # solve would poison the constructed pair itself
                sol = solve_frequency(dom, q)
                pair = build_pair(dom, q, solution=sol, seed=cfg.seed)
                rep = weak_duality_certificate(dom, q, pair, solution=sol)
            except Exception as exc:
                records.append({"command": "dual", "domain": cfg.domain,
                                "q": q, "h": h, "error": str(exc)})
                failed = True
                continue
            budget = _gap_budget(q, cfg.tol)
            feasible = pair.feasibility_residual >= -FEASIBILITY_TOL
            ok = feasible and abs(rep.gap_relative) <= budget
            failed = failed or not ok
            records.append({
                "command": "dual", "domain": cfg.domain, "q": q, "h": h,
                "primal_value": rep.primal_value,
                "dual_value": rep.dual_value,
                "gap": rep.gap, "gap_relative": rep.gap_relative,
                "feasibility_residual": pair.feasibility_residual,
                "feasible": feasible, "trim": pair.trim,
                "pairing": pair.pairing, "budget": budget, "ok": ok,
            })
            if cfg.export_pair is not None:
                pair.f.to_csv(cfg.export_pair + "_f.csv")
                pair.phi.to_csv(cfg.export_pair + "_phi.csv")
    _emit(records, cfg)
    return 1 if failed else 0


def cmd_bounds(cfg: RunConfig) -> int:
    records = []
    failed = False
    for h, dom in _resolve_domains(cfg):
        rep = bound_report(dom, list(cfg.qs), h1=cfg.h1,
                           tol=cfg.tol if cfg.tol is not None else DEFAULT_TOL)
        for q, lam in zip(rep.qs, rep.lambda1):
            records.append({"command": "bounds", "domain": cfg.domain,
                            "domain_id": rep.domain_id, "q": q, "h": h,
                            "name": "lambda1", "kind": "value", "value": lam,
                            "satisfied": None, "slack": None, "note": ""})
        for row in rep.rows:
            records.append({"command": "bounds", "domain": cfg.domain,
                            "domain_id": rep.domain_id, "q": row.q, "h": h,
                            **row.as_dict()})
        failed = failed or not rep.all_satisfied
    _emit(records, cfg)
    return 1 if failed else 0


def cmd_constants(cfg: RunConfig) -> int:
    qs = cfg.q_grid or cfg.qs
    if not qs:
        raise ConfigError("constants needs --q-grid a:b:step or --q")
    records = [{"q": q, "pi_2q": sobolev_poincare_1d(q),
                "lambda1_interval": interval_frequency(q)} for q in qs]
    _emit(records, cfg)
    return 0


def cmd_conjugate_check(cfg: RunConfig) -> int:
    qs = cfg.qs or (1.5,)
    tol = cfg.tol if cfg.tol is not None else 1e-3
    records = []
    failed = False
    for q in qs:
        if not 1.0 < q < 2.0:
            raise ConfigError("conjugate-check needs q strictly inside (1, 2)")
        rng = np.random.default_rng(cfg.seed)
        s = -(10.0 ** rng.uniform(-1.5, 1.5, 100))
        xi = 10.0 ** rng.uniform(-1.5, 1.5, 100)
        worst = 0.0
        worst_ident = 0.0
        for sk, xk in zip(s, xi):
            closed = conjugate_closed_form(q, sk, xk)
            brute = conjugate_bruteforce(
                lambda t, x: primal_integrand(q, t, x), sk, xk)
            worst = max(worst, abs(brute - closed) / abs(closed))
            lhs, rhs = rescaled_conjugate_identity_check(q, sk, xk)
            worst_ident = max(worst_ident, abs(lhs - rhs) / max(abs(rhs), 1e-300))
        ok = worst <= tol and worst_ident <= tol
        failed = failed or not ok
        records.append({"command": "conjugate-check", "q": q, "n_points": 100,
                        "max_rel_error": worst,
                        "max_identity_error": worst_ident,
                        "tol": tol, "ok": ok})
    _emit(records, cfg)
    return 1 if failed else 0


def cmd_report(cfg: RunConfig) -> int:
    records = []
    failed = False
    for h, dom in _resolve_domains(cfg):
        for q in cfg.qs:
            try:
                sol = solve_frequency(dom, q)
                pair = build_pair(dom, q, solution=sol, seed=cfg.seed)
                dual_rep = weak_duality_certificate(dom, q, pair, solution=sol)
            except Exception as exc:
                records.append({"command": "report", "domain": cfg.domain,
                                "q": q, "h": h, "error": str(exc)})
                failed = True
                continue
            budget = _gap_budget(q, cfg.tol)
            ok = (pair.feasibility_residual >= -FEASIBILITY_TOL
                  and abs(dual_rep.gap_relative) <= budget)
            failed = failed or not ok
            records.append({"command": "report", "record": "solve",
                            "domain": cfg.domain, "h": h, **sol.as_dict()})
            records.append({"command": "report", "record": "dual",
                            "domain": cfg.domain, "q": q, "h": h,
                            "dual_value": dual_rep.dual_value,
                            "gap_relative": dual_rep.gap_relative,
                            "feasibility_residual": pair.feasibility_residual,
                            "budget": budget, "ok": ok})
        rep = bound_report(dom, list(cfg.qs), h1=cfg.h1,
                           tol=cfg.tol if cfg.tol is not None else DEFAULT_TOL)
        for row in rep.rows:
            records.append({"command": "report", "record": "bounds",
                            "domain": cfg.domain, "h": h, **row.as_dict()})
        failed = failed or not rep.all_satisfied
    _emit(records, cfg)
    return 1 if failed else 0


_HANDLERS = {
    "solve": cmd_solve,
    "dual": cmd_dual,
    "bounds": cmd_bounds,
    "constants": cmd_constants,
    "conjugate-check": cmd_conjugate_check,
    "report": cmd_report,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualfreq",
        description="Generalized principal frequency: solves, dual "
                    "certificates, and geometric bounds on grid domains.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("solve", "primal solves over a (q, h) grid"),
        ("dual", "build and certify dual pairs"),
        ("bounds", "geometric bound report"),
        ("constants", "1-D reference constants over a q grid"),
        ("conjugate-check", "verify the closed-form conjugate numerically"),
        ("report", "combined solve + dual + bounds"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--domain", help="disk:r=1 | rect:w=2,h=1 | "
                       "poly:x1,y1;x2,y2;... | path to a domain file")
        p.add_argument("--q", default="", help="comma list of exponents, "
                       "rationals allowed (e.g. 1,3/2,2)")
        p.add_argument("--h", default="", help="comma list of grid spacings, "
                       "strictly decreasing (e.g. 1/64,1/128)")
        p.add_argument("--tol", default=None,
                       help="check tolerance override: gap budget on dual/"
                            "report, bound slack on bounds, max error on "
                            "conjugate-check, solver tolerance on solve")
        p.add_argument("--format", default="csv" if name == "constants" else "json",
                       choices=("json", "csv"), dest="fmt")
        p.add_argument("--out", default=None,
                       help=f"output path; relative paths resolve against "
                            f"${OUTPUT_DIR_ENV} when set")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for the randomized feasibility checks")
        if name in ("bounds", "report"):
            p.add_argument("--h1", default=None,
                           help="certified Cheeger constant for the domain")
        if name == "constants":
            p.add_argument("--q-grid", default=None, dest="q_grid",
                           help="a:b:step inclusive grid, e.g. 1:2:0.05")
        if name == "dual":
            p.add_argument("--export-pair", default=None, dest="export_pair",
                           help="path prefix for f/phi CSV dumps")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        domain=args.domain,
        qs=_rational_list(args.q),
        hs=_rational_list(args.h),
        tol=None if args.tol is None else _rational(args.tol),
        fmt=args.fmt,
        out=args.out,
        seed=args.seed,
        h1=None if getattr(args, "h1", None) is None else _rational(args.h1),
        q_grid=(_parse_q_grid(args.q_grid)
                if getattr(args, "q_grid", None) else ()),
        export_pair=getattr(args, "export_pair", None),
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
