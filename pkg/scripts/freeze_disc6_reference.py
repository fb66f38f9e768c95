"""Compute b_0..b_N of the weight 4 disc-6 form in extended precision and freeze them.

Two runs at different N must agree (in the rho^n scaled metric) and the
first nine coefficients must match the closed forms before anything is
written.
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from mfseries.catalog import DISC6_SIGNATURE, disc6_group, disc6_k4_exact
from mfseries.fuchsian import compute_dirichlet_domain
from mfseries.mpnum import backend
from mfseries.pipeline import SolveOptions, solve
from mfseries.relations import ExpansionProblem


@dataclass
class FreezeConfig:
    digits: int = 40
    N: int = 90
    N_check: int = 100
    keep: int = 60  # coefficients written out
    tol: float = 1e-28
    out: str = "tests/data/disc6_k4_reference.json"


def run(cfg: FreezeConfig) -> dict:
    ar = backend(cfg.digits)
    dom = compute_dirichlet_domain(disc6_group(ar), signature=DISC6_SIGNATURE)
    a = solve(ExpansionProblem(dom, 4, cfg.N), SolveOptions())
    b = solve(ExpansionProblem(dom, 4, cfg.N_check), SolveOptions())
    rho = dom.rho
    drift = max(float(abs(a.b[n] - b.b[n]) * rho ** n) for n in range(cfg.keep + 1))
    exact = disc6_k4_exact(ar)
    err = max(float(abs(a.b[n] - exact[n]) * rho ** n) for n in range(len(exact)))
    print(f"N={cfg.N} vs N={cfg.N_check}: max rho^n drift {drift:.3e}; closed-form error {err:.3e}")
    if drift > cfg.tol or err > cfg.tol:
        raise SystemExit("reference not converged; raise digits or N")
    return {
        "config": asdict(cfg),
        "rho": ar.fmt(rho),
        "drift": drift,
        "closed_form_error": err,
        "b": [[ar.fmt(x.real), ar.fmt(x.imag)] for x in b.b[: cfg.keep + 1]],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for name, val in asdict(FreezeConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(val), default=val)
    cfg = FreezeConfig(**vars(ap.parse_args()))
    data = run(cfg)
    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
