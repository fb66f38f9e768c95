"""Domain -> relations -> numerical kernel -> coefficients."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .analysis import ExpansionResult
from .numkernel import dehomogenize_solve, normalize_vector, numerical_kernel
from .relations import (
    ExpansionProblem,
    RelationSystem,
    automorphy_system,
    cauchy_system,
    hecke_system,
    scale_system,
)

log = logging.getLogger(__name__)


@dataclass
class SolveOptions:
    quadrature: str = "simpson"
    method: str = "lu"  # lu | svd
    diagonal_scaling: bool = True
    automorphy_points: int = 0
    expected_dim: int | None = None
    kernel_floor: float | None = None
    seed: int = 0
    hecke: list = field(default_factory=list)  # (label, cosets, eigenvalue)


def assemble(prob: ExpansionProblem, opts: SolveOptions) -> RelationSystem:
    sys = cauchy_system(prob, opts.quadrature, scaled=True)
    if opts.diagonal_scaling:
        sys = scale_system(sys, ar=prob.ar)
    if opts.hecke:
        sys = sys.stack(hecke_system(prob, opts.hecke, scaled=True))
    if opts.automorphy_points:
        from .analysis import _off_domain_points

        pts = _off_domain_points(prob, opts.automorphy_points, opts.seed)
        sys = sys.stack(automorphy_system(prob, pts, scaled=True))
    return sys


def solve(prob: ExpansionProblem, opts: SolveOptions | None = None) -> ExpansionResult:
    """Compute ``b_0..b_N`` normalised by ``b_0 = 1``.

    ``method="lu"`` fixes ``b'_0 = 1`` and solves the remaining relations
    (square: dropping the n = 0 Cauchy row, which the normalisation
    replaces; otherwise in the least-squares sense).  ``method="svd"`` takes
    the right singular vector of the smallest singular value.
    """
    opts = opts or SolveOptions()
    ar = prob.ar
    diag: dict = {"quadrature": opts.quadrature, "method": opts.method, "N": prob.N, "Q": prob.Q}
    t0 = time.perf_counter()
    sys = assemble(prob, opts)
    diag["assembly_seconds"] = time.perf_counter() - t0
    diag["rows"] = sys.shape[0]
    diag["dropped_rows"] = sys.dropped_rows
    t1 = time.perf_counter()
    kern = None
    if opts.method == "svd" or opts.expected_dim is not None:
        kern = numerical_kernel(sys, opts.expected_dim, ar, opts.kernel_floor)
        diag["singular_values"] = [float(s) for s in kern.singular_values]
        diag["kernel_dimension"] = kern.dimension
        diag["kernel_threshold"] = kern.kernel_threshold
        diag["kernel_quality"] = kern.quality
        diag["kernel_flagged"] = kern.flagged
    if opts.method == "svd":
        if kern.dimension == 0:
            log.warning("no singular value below threshold; using the smallest one")
        v = kern.basis[0] if kern.dimension else _smallest_vector(sys, ar)
        bs = normalize_vector(v)
    elif opts.method == "lu":
        square = sys.shape[0] == sys.shape[1]
        bs = dehomogenize_solve(sys.matrix, ar, drop_row=0 if square else None)
    else:
        raise ValueError(f"unknown method {opts.method!r}")
    diag["solve_seconds"] = time.perf_counter() - t1
    resid = sys.matrix @ bs
    diag["relation_residual"] = float(max(abs(x) for x in resid))
    R = prob.R
    b = [bs[n] / R ** n for n in range(prob.N + 1)]
    return ExpansionResult(b, R, prob.weight, ar.digits, diagnostics=diag)


def _smallest_vector(sys, ar):
    from .numkernel import svd

    res = svd(sys.matrix, ar)
    return res.V[:, -1]


__all__ = ["SolveOptions", "assemble", "solve"]
