"""Command line front end.

    mfseries compute <config>            full pipeline, writes result.json, run.log, domain.svg
    mfseries verify <config> <result>    re-run the checks on stored coefficients
    mfseries oracle-qexp <config>        level 11 q-expansion oracle at the configured centre
    mfseries domain <config>             fundamental domain and its SVG only

Exit status: 0 when every requested check passes, 1 otherwise, 2 for a
malformed configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .analysis import (
    ExpansionResult,
    eta_product_expansion,
    normalize_cm,
    power_series_from_qexp,
    verify_automorphy,
    verify_hecke,
)
from .catalog import disc6_k4_exact
from .config import ConfigError, RunConfig, build_generators, eval_exact, eval_numeric, load_config
from .fuchsian import DirichletDomain, FuchsianGroup, compute_dirichlet_domain
from .hyper import RealMatrix2
from .models import PeriodLattice, hyperelliptic_fit, j_from_lattice, period_integral
from .mpnum import Arith, backend
from .pipeline import SolveOptions, solve
from .relations import (
    ExpansionProblem,
    RelationError,
    classical_hecke_cosets,
    hecke_kernel,
    normalized_hecke_eigenvalue,
    truncation_degree,
)

log = logging.getLogger("mfseries")

REFERENCES = {"disc6_k4": disc6_k4_exact}
ORACLES = {"eta11": 11}


# ---------------------------------------------------------------------------
# helpers


def _pair(ar: Arith, z) -> list[str]:
    return [ar.fmt(z.real), ar.fmt(z.imag)]


def _unpair(ar: Arith, pair) -> object:
    return ar.cplx(ar.real(pair[0]), ar.real(pair[1]))


def _configure_logging(out_dir: Path | None):
    root = logging.getLogger("mfseries")
    root.setLevel(logging.INFO)
    for h in list(root.handlers):
        root.removeHandler(h)
    err = logging.StreamHandler(sys.stderr)
    err.setLevel(logging.WARNING)
    err.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(err)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        fh = logging.FileHandler(out_dir / "run.log", mode="w")
        fh.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root.addHandler(fh)


def build_domain(cfg: RunConfig, ar: Arith) -> DirichletDomain:
    center = eval_numeric(cfg.center, ar)
    gens = build_generators(cfg)
    group = FuchsianGroup(gens, ar.cplx(center), ar)
    cocompact = cfg.R is None
    return compute_dirichlet_domain(
        group, search_height=cfg.search_height, require_cocompact=cocompact, signature=cfg.signature
    )


def build_problem(cfg: RunConfig, domain: DirichletDomain, ar: Arith) -> ExpansionProblem:
    R = eval_numeric(cfg.R, ar).real if cfg.R is not None else None
    N = cfg.N
    if N is None:
        N = truncation_degree(cfg.epsilon, float(R if R is not None else domain.rho))
    er = eval_numeric(cfg.eval_radius, ar).real if cfg.eval_radius is not None else None
    return ExpansionProblem(domain, cfg.weight, N, Q=cfg.Q, R=R, eval_radius=er)


def hecke_operators(cfg: RunConfig, ar: Arith) -> list:
    ops = []
    for spec in cfg.hecke:
        ev = eval_numeric(spec.eigenvalue, ar)
        if spec.classical:
            p = spec.prime
            ops.append((spec.label, classical_hecke_cosets(p, ar), normalized_hecke_eigenvalue(ev, p, cfg.weight)))
        else:
            mats = [RealMatrix2(*(eval_exact(e).numeric(ar) for e in entries)).normalized(ar) for entries in spec.cosets]
            ops.append((spec.label, mats, ev))
    return ops


def domain_svg(domain: DirichletDomain, R=None, size: int = 480) -> str:
    """SVG of the polygon in the unit disc, with the quadrature circle |w| = R."""
    half = size / 2
    scale = half * 0.95

    def pt(w):
        w = complex(w)
        return half + scale * w.real, half - scale * w.imag

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{half}" cy="{half}" r="{scale}" fill="none" stroke="#888" stroke-width="1"/>',
    ]
    if R is not None:
        parts.append(
            f'<circle cx="{half}" cy="{half}" r="{scale * float(R):.4f}" fill="none" stroke="#c33" '
            f'stroke-dasharray="4 3" stroke-width="1" class="quadrature"/>'
        )
    verts = [complex(v) for v in domain.vertices]
    n = len(verts)
    path = []
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        x0, y0 = pt(a)
        x1, y1 = pt(b)
        if i == 0:
            path.append(f"M {x0:.4f} {y0:.4f}")
        c = _geodesic_centre(a, b)
        if c is None:
            path.append(f"L {x1:.4f} {y1:.4f}")
            continue
        r = abs(a - c) * scale
        cx, cy = pt(c)
        cross = (x0 - cx) * (y1 - cy) - (y0 - cy) * (x1 - cx)
        sweep = 1 if cross > 0 else 0
        path.append(f"A {r:.4f} {r:.4f} 0 0 {sweep} {x1:.4f} {y1:.4f}")
    parts.append(f'<path d="{" ".join(path)} Z" fill="#dde8f5" stroke="#235" stroke-width="1.2"/>')
    for i, v in enumerate(verts):
        x, y = pt(v)
        parts.append(f'<circle class="vertex" data-index="{i}" cx="{x:.4f}" cy="{y:.4f}" r="2.5" fill="#235"/>')
    parts.append(f'<circle cx="{half}" cy="{half}" r="2" fill="#c33"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _geodesic_centre(a: complex, b: complex):
    # circle orthogonal to the unit circle through a and b: 2 Re(c conj v) = 1 + |v|^2
    if abs(a) >= 1 - 1e-12 and abs(b) >= 1 - 1e-12:
        return None
    x1, y1, x2, y2 = a.real, a.imag, b.real, b.imag
    det = x1 * y2 - x2 * y1
    if abs(det) < 1e-12:
        return None
    r1, r2 = (1 + abs(a) ** 2) / 2, (1 + abs(b) ** 2) / 2
    return complex((r1 * y2 - r2 * y1) / det, (x1 * r2 - x2 * r1) / det)


def _result_from_json(data: dict, ar: Arith, weight: int) -> ExpansionResult:
    b = [_unpair(ar, p) for p in data["coefficients"]]
    R = ar.real(data["R"])
    res = ExpansionResult(b, R, weight, ar.digits)
    if data.get("theta"):
        res.theta = _unpair(ar, data["theta"])
    return res


def _run_checks(cfg: RunConfig, res: ExpansionResult, prob: ExpansionProblem, ar: Arith, hecke: list) -> dict:
    checks: dict = {}
    residuals: dict = {}
    if cfg.reference:
        ref = REFERENCES[cfg.reference](ar)
        err = max(float(abs(res.b[n] - ref[n]) * float(res.R) ** n) for n in range(min(len(ref), len(res.b))))
        checks["reference"] = {"name": cfg.reference, "max_scaled_error": err, "tol": cfg.reference_tol,
                               "terms": min(len(ref), len(res.b)), "pass": err <= cfg.reference_tol}
    if cfg.oracle:
        err = _oracle_error(cfg, res, prob, ar)
        checks["oracle"] = {"name": cfg.oracle, "max_scaled_error": err, "tol": cfg.oracle_tol,
                            "terms": cfg.oracle_terms, "pass": err <= cfg.oracle_tol}
    if cfg.automorphy_points:
        r = verify_automorphy(res, prob, cfg.automorphy_points, cfg.seed)
        residuals["automorphy"] = r
        checks["automorphy"] = {"residual": r, "tol": cfg.automorphy_tol, "pass": r <= cfg.automorphy_tol}
    if hecke:
        residuals["hecke"] = {}
        for label, cosets, ev in hecke:
            r = verify_hecke(res, prob, cosets, ev)
            residuals["hecke"][label] = r
            checks[f"hecke:{label}"] = {"residual": r, "tol": cfg.hecke_tol, "pass": r <= cfg.hecke_tol}
    return {"checks": checks, "residuals": residuals}


def _oracle_error(cfg: RunConfig, res: ExpansionResult, prob: ExpansionProblem, ar: Arith) -> float:
    level = ORACLES[cfg.oracle]
    oar = backend(max(30, ar.digits))
    f = eta_product_expansion(cfg.oracle_M, level)
    p = oar.cplx(eval_numeric(cfg.center, oar))
    orc = power_series_from_qexp(f, p, cfg.oracle_terms - 1, oar)
    R = float(res.R)
    b0 = orc.b[0]
    return max(
        float(abs(oar.cplx(res.b[n].real, res.b[n].imag) - orc.b[n] / b0)) * R ** n for n in range(cfg.oracle_terms)
    )


# ---------------------------------------------------------------------------
# commands


def cmd_compute(cfg: RunConfig, out: Path) -> int:
    ar = backend(cfg.digits)
    bundle: dict = {"status": "error", "precision_digits": cfg.digits, "timings_ms": {}, "errors": []}
    t = time.perf_counter()
    status = 1
    try:
        domain = build_domain(cfg, ar)
        bundle["timings_ms"]["domain"] = 1e3 * (time.perf_counter() - t)
        bundle["rho"] = ar.fmt(domain.rho)
        bundle["domain"] = {"vertices": len(domain.vertices), "area": domain.area, "converged": domain.converged}
        prob = build_problem(cfg, domain, ar)
        (out / "domain.svg").write_text(domain_svg(domain, prob.R))
        bundle.update({"N": prob.N, "Q": prob.Q, "R": ar.fmt(prob.R)})
        hecke = hecke_operators(cfg, ar)
        usable = []
        for op in hecke:
            try:
                hecke_kernel(prob, op[1])
                usable.append(op)
            except RelationError as exc:
                log.warning("Hecke operator %s skipped: %s", op[0], exc)
                bundle["errors"].append({"stage": "relations", "hecke": op[0], "message": str(exc)})
        opts = SolveOptions(quadrature=cfg.quadrature, method=cfg.method, hecke=usable,
                            expected_dim=cfg.expected_dim, seed=cfg.seed)
        t = time.perf_counter()
        res = solve(prob, opts)
        d = res.diagnostics
        bundle["timings_ms"]["assembly"] = 1e3 * d["assembly_seconds"]
        bundle["timings_ms"]["solve"] = 1e3 * d["solve_seconds"]
        log.info("assembly %.1f ms, solve %.1f ms", 1e3 * d["assembly_seconds"], 1e3 * d["solve_seconds"])
        if "singular_values" in d:
            log.info("singular values: %s", " ".join(f"{s:.3e}" for s in d["singular_values"]))
        bundle["coefficients"] = [_pair(ar, b) for b in res.b]
        bundle["scaled"] = False
        bundle["singular_values"] = d.get("singular_values", [])
        bundle["kernel"] = {k: d[k] for k in ("kernel_dimension", "kernel_threshold", "kernel_quality", "kernel_flagged") if k in d}
        bundle["relation_residual"] = d["relation_residual"]
        bundle["theta"] = None
        bundle["c"] = None
        if cfg.normalize_cm:
            theta = eval_numeric(cfg.theta, ar) if cfg.theta else None
            res = normalize_cm(res, theta_override=theta)
            bundle["theta"] = _pair(ar, ar.cplx(res.theta))
            bundle["theta_source"] = res.theta_source
            bundle["c"] = [_pair(ar, ar.cplx(c)) for c in res.c]
        t = time.perf_counter()
        verdict = _run_checks(cfg, res, prob, ar, usable)
        bundle["timings_ms"]["verify"] = 1e3 * (time.perf_counter() - t)
        bundle.update(verdict)
        if cfg.expected_dim is not None:
            ok = not d.get("kernel_flagged", False)
            bundle["checks"]["kernel_dimension"] = {"expected": cfg.expected_dim, "found": d.get("kernel_dimension"), "pass": ok}
        _postprocess(cfg, res, domain, ar, bundle)
        passed = all(c["pass"] for c in bundle["checks"].values())
        bundle["status"] = "ok" if passed else "failed_checks"
        status = 0 if passed else 1
    except ConfigError:
        raise
    except Exception as exc:  # noqa: BLE001 - reported in the bundle with its origin
        log.exception("run failed")
        bundle["errors"].append({"stage": type(exc).__module__.rsplit(".", 1)[-1], "type": type(exc).__name__,
                                 "message": str(exc)})
    order = ["status", "precision_digits", "rho", "N", "Q", "R", "coefficients", "scaled", "theta", "c",
             "singular_values", "residuals", "timings_ms"]
    bundle = {**{k: bundle[k] for k in order if k in bundle}, **bundle}
    (out / "result.json").write_text(json.dumps(bundle, indent=1, allow_nan=True) + "\n")
    print(json.dumps({"status": bundle["status"], "out": str(out), "checks": {
        k: v.get("pass") for k, v in bundle.get("checks", {}).items()}}))
    return status


def _postprocess(cfg: RunConfig, res: ExpansionResult, domain: DirichletDomain, ar: Arith, bundle: dict):
    if cfg.periods:
        vals = []
        for a, b in cfg.periods:
            vals.append(period_integral(res, domain.vertices[a], domain.vertices[b]))
        bundle["periods"] = [_pair(ar, ar.cplx(v)) for v in vals]
        if len(vals) >= 2:
            L = PeriodLattice(vals[0], vals[1])
            bundle["lattice"] = {"tau": _pair(ar, L.tau), "j": _pair(ar, ar.cplx(j_from_lattice(L, ar)))}
    if cfg.hyperelliptic_h:
        data = json.loads(Path(cfg.hyperelliptic_h).read_text())
        h = _result_from_json(data, ar, cfg.weight)
        fit = hyperelliptic_fit(res, h)
        bundle["hyperelliptic"] = {"q": [_pair(ar, ar.cplx(c)) for c in fit.q], "residual": fit.residual,
                                   "variable": fit.variable}


def cmd_verify(cfg: RunConfig, result_path: Path) -> int:
    ar = backend(cfg.digits)
    data = json.loads(result_path.read_text())
    domain = build_domain(cfg, ar)
    prob = build_problem(cfg, domain, ar)
    res = _result_from_json(data, ar, cfg.weight)
    prob.N = min(prob.N, res.N)
    hecke = []
    for op in hecke_operators(cfg, ar):
        try:
            hecke_kernel(prob, op[1])
            hecke.append(op)
        except RelationError as exc:
            log.warning("Hecke operator %s skipped: %s", op[0], exc)
    verdict = _run_checks(cfg, res, prob, ar, hecke)
    passed = all(c["pass"] for c in verdict["checks"].values())
    print(json.dumps({"status": "ok" if passed else "failed_checks", **verdict}, indent=1))
    return 0 if passed else 1


def cmd_oracle(cfg: RunConfig, out: Path | None) -> int:
    ar = backend(max(30, cfg.digits))
    f = eta_product_expansion(cfg.oracle_M, ORACLES.get(cfg.oracle or "eta11", 11))
    p = ar.cplx(eval_numeric(cfg.center, ar))
    res = normalize_cm(power_series_from_qexp(f, p, cfg.oracle_terms - 1, ar))
    data = {
        "precision_digits": ar.digits,
        "M": cfg.oracle_M,
        "coefficients": [_pair(ar, b) for b in res.b],
        "normalized": [_pair(ar, b / res.b[0]) for b in res.b],
        "theta": _pair(ar, res.theta),
        "c": [_pair(ar, c) for c in res.c],
        "c_rounded": [int(round(float(c.real))) for c in res.c],
    }
    text = json.dumps(data, indent=1)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "oracle.json").write_text(text + "\n")
    print(text)
    return 0


def cmd_domain(cfg: RunConfig, out: Path) -> int:
    ar = backend(cfg.digits)
    domain = build_domain(cfg, ar)
    R = eval_numeric(cfg.R, ar).real if cfg.R is not None else domain.rho
    (out / "domain.svg").write_text(domain_svg(domain, R))
    exp = domain.export()
    (out / "domain.json").write_text(json.dumps(exp, indent=1) + "\n")
    print(json.dumps({"vertices": len(domain.vertices), "rho": float(domain.rho), "area": domain.area,
                      "converged": domain.converged, "out": str(out)}))
    return 0


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.digits is not None:
        cfg.digits = args.digits
    if args.n is not None:
        cfg.N = args.n
    if args.q is not None:
        cfg.Q = args.q
    if args.quadrature is not None:
        cfg.quadrature = args.quadrature
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg.validate()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mfseries", description="Power series expansions of modular forms")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config")
        p.add_argument("--digits", type=int)
        p.add_argument("--n", type=int, help="truncation degree N")
        p.add_argument("--q", type=int, help="quadrature parameter Q")
        p.add_argument("--quadrature", choices=["simpson", "riemann"])
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=Path, help="output directory (default results/<config name>)")

    common(sub.add_parser("compute", help="run the full pipeline"))
    pv = sub.add_parser("verify", help="check stored coefficients")
    common(pv)
    pv.add_argument("result", type=Path)
    common(sub.add_parser("oracle-qexp", help="q-expansion oracle at the configured centre"))
    common(sub.add_parser("domain", help="fundamental domain and SVG"))
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = args.out or Path("results") / Path(args.config).stem
    if args.command in ("compute", "domain"):
        out.mkdir(parents=True, exist_ok=True)
        _configure_logging(out)
    else:
        _configure_logging(None)
    try:
        if args.command == "compute":
            return cmd_compute(cfg, out)
        if args.command == "verify":
            return cmd_verify(cfg, args.result)
        if args.command == "oracle-qexp":
            return cmd_oracle(cfg, args.out)
        return cmd_domain(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
