"""Linear relations on the coefficients b_n of f = (1 - w)^k sum b_n w^n.

Three sources of relations are assembled here:

* automorphy rows at single points w (``f(z') = j(g, z)^k f(z)``),
* the Cauchy integral for b_n over the circle |w| = R, discretised with the
  rectangle rule or composite Simpson, each node pulled back into the
  fundamental domain,
* Hecke rows ``a_p f(p) = sum_i j(pi_i, p)^-k f(pi_i p)``.

Unknowns are ``b'_n = b_n R^n`` whenever a system is flagged ``scaled``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .fuchsian import DirichletDomain, Reducer, ReductionOutput
from .hyper import RealMatrix2, from_disc, to_disc
from .mpnum import Arith, DoubleArith

log = logging.getLogger(__name__)


class RelationError(RuntimeError):
    pass


def truncation_degree(epsilon: float, rho: float) -> int:
    """Degree N with rho^N <= epsilon, assuming |b_n| <= 1."""
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    return int(math.ceil(math.log(epsilon) / math.log(float(rho))))


@dataclass
class ExpansionProblem:
    domain: DirichletDomain
    weight: int
    N: int
    Q: int | None = None
    R: object = None
    use_unit_automorphy: bool | None = None
    reduction_tol: float | None = None
    # Hecke images may land in R < |w'| <= eval_radius when the series is known
    # to converge there (cusped groups); defaults to R
    eval_radius: object = None
    _reducer: Reducer | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.weight <= 0 or self.weight % 2:
            raise ValueError("weight must be a positive even integer")
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.Q is None:
            self.Q = 2 * self.N
        ar = self.ar
        self.R = self.domain.rho if self.R is None else ar.real(self.R)
        if not self.R < 1:
            raise ValueError(f"quadrature radius R = {self.R} must be < 1 (set R explicitly for non-cocompact groups)")
        if self.use_unit_automorphy is None:
            self.use_unit_automorphy = self.weight >= 8 or self.R > 0.8
        self.eval_radius = self.R if self.eval_radius is None else ar.real(self.eval_radius)
        if self.eval_radius < self.R or not self.eval_radius < 1:
            raise ValueError("eval_radius must satisfy R <= eval_radius < 1")

    @property
    def ar(self) -> Arith:
        return self.domain.ar

    @property
    def group(self):
        return self.domain.group

    @property
    def center(self):
        return self.domain.center

    @property
    def reducer(self) -> Reducer:
        if self._reducer is None:
            self._reducer = Reducer(self.domain, self.reduction_tol)
        return self._reducer


@dataclass
class RelationSystem:
    """Rows A with ``A b ~ 0``; ``provenance[i]`` tags row i."""

    matrix: np.ndarray
    provenance: list
    R: object
    scaled: bool
    diagonally_scaled: bool = False
    row_factors: np.ndarray | None = None
    col_factors: np.ndarray | None = None
    dropped_rows: int = 0

    @property
    def shape(self):
        return self.matrix.shape

    def operator(self, ar: Arith) -> np.ndarray:
        """For a Cauchy system, the quadrature operator K (the matrix is K - I)."""
        n = self.matrix.shape[1]
        return self.matrix + ar.eye(n)

    def stack(self, other: "RelationSystem") -> "RelationSystem":
        if self.scaled != other.scaled or self.matrix.shape[1] != other.matrix.shape[1]:
            raise RelationError("cannot stack systems with different unknowns")
        return RelationSystem(
            np.vstack([self.matrix, other.matrix]),
            list(self.provenance) + list(other.provenance),
            self.R,
            self.scaled,
            dropped_rows=self.dropped_rows + other.dropped_rows,
        )


def _powers(x, n: int, ar: Arith):
    """Row vector (1, x, ..., x^n)."""
    out = ar.zeros(n + 1)
    acc = ar.cplx(1)
    for i in range(n + 1):
        out[i] = acc
        acc = acc * x
    return out


# ---------------------------------------------------------------------------
# automorphy


def automorphy_row(prob: ExpansionProblem, w, scaled: bool = False, red: ReductionOutput | None = None):
    """Row K^a(w) with ``sum_n K^a_n(w) b_n ~ 0``; returns ``(row, trivial)``.

    ``trivial`` is true when w already lies in the fundamental domain, in
    which case the row is identically zero.
    """
    ar, k, N = prob.ar, prob.weight, prob.N
    if abs(w) > prob.R * (1 + ar.tol(6)):
        raise RelationError(f"|w| = {abs(w)} exceeds the validated radius {prob.R}")
    red = red or prob.reducer(w)
    if not red.word:
        return ar.zeros(N + 1), True
    p = prob.center
    z = from_disc(p, w)
    wp = red.w_prime
    j = red.g.j(z)
    lhs = j ** k * (1 - w) ** k
    rhs = (1 - wp) ** k
    if prob.use_unit_automorphy:
        zp = from_disc(p, wp)
        lhs = lhs * zp.imag ** (k // 2)
        rhs = rhs * zp.imag ** (k // 2)
    if scaled:
        w_pow, wp_pow = _powers(w / prob.R, N, ar), _powers(wp / prob.R, N, ar)
    else:
        w_pow, wp_pow = _powers(w, N, ar), _powers(wp, N, ar)
    return lhs * w_pow - rhs * wp_pow, False


def automorphy_system(prob: ExpansionProblem, points, scaled: bool = True) -> RelationSystem:
    rows, prov, dropped = [], [], 0
    for w in points:
        row, trivial = automorphy_row(prob, w, scaled=scaled)
        if trivial:
            dropped += 1
            continue
        rows.append(row)
        prov.append("automorphy")
    if not rows:
        mat = prob.ar.zeros((0, prob.N + 1))
    else:
        mat = np.vstack(rows)
    return RelationSystem(mat, prov, prob.R, scaled, dropped_rows=dropped)


# ---------------------------------------------------------------------------
# Cauchy integral


@dataclass
class _Nodes:
    w: list
    weights: list
    reductions: list


def _circle_nodes(prob: ExpansionProblem, count: int, weights) -> _Nodes:
    ar = prob.ar
    ws, reds = [], []
    two_pi = 2 * ar.pi
    for m in range(1, count + 1):
        w = prob.R * ar.expj(two_pi * m / count)
        try:
            reds.append(prob.reducer(w))
        except Exception as exc:  # noqa: BLE001 - re-raised with the offending node
            raise RelationError(f"quadrature node w_{m} = {w} failed to reduce: {exc}") from exc
        ws.append(w)
    return _Nodes(ws, weights, reds)


def _cauchy_from_nodes(prob: ExpansionProblem, nodes: _Nodes, scaled: bool) -> np.ndarray:
    ar, k, N = prob.ar, prob.weight, prob.N
    p = prob.center
    R = prob.R
    Q = len(nodes.w)
    J = ar.zeros((N + 1, Q))
    W = ar.zeros((Q, N + 1))
    for m, (w, wt, red) in enumerate(zip(nodes.w, nodes.weights, nodes.reductions)):
        z = from_disc(p, w)
        j = red.g.j(z)
        wp = red.w_prime
        u = w / R if scaled else w
        up = wp / R if scaled else wp
        head = wt / (j ** k * (1 - w) ** k)
        J[:, m] = head * _powers(1 / u, N, ar)
        W[m, :] = (1 - wp) ** k * _powers(up, N, ar)
    return J @ W


def cauchy_matrix_riemann(prob: ExpansionProblem, scaled: bool = True) -> RelationSystem:
    """Rectangle-rule discretisation K^c of the Cauchy integral, as K^c - I.

    Q nodes ``w_m = R exp(2 pi i m / Q)``; the weight includes the factor
    ``(1 - w'_m)^k`` of ``f_N(z'_m)``.
    """
    if prob.Q < 3:
        raise ValueError("Riemann quadrature needs Q >= 3")
    ar = prob.ar
    wt = ar.real(1) / prob.Q
    nodes = _circle_nodes(prob, prob.Q, [wt] * prob.Q)
    K = _cauchy_from_nodes(prob, nodes, scaled)
    n = prob.N + 1
    return RelationSystem(K - ar.eye(n), [("cauchy", i) for i in range(n)], prob.R, scaled)


def simpson_weights(Q: int, ar: Arith) -> list:
    """Composite Simpson weights on 2Q periodic nodes: 1/(3Q) odd, 2/(3Q) even."""
    odd, even = ar.real(1) / (3 * Q), ar.real(2) / (3 * Q)
    return [odd if m % 2 == 1 else even for m in range(1, 2 * Q + 1)]


def cauchy_matrix_simpson(prob: ExpansionProblem, scaled: bool = True) -> RelationSystem:
    """Composite Simpson discretisation L^c of the Cauchy integral, as L^c - I.

    Uses 2Q equally spaced nodes with the 1-4-1 pattern; node 2Q+1 wraps to
    node 1.
    """
    if prob.Q < 2:
        raise ValueError("Simpson quadrature needs Q >= 2")
    ar = prob.ar
    nodes = _circle_nodes(prob, 2 * prob.Q, simpson_weights(prob.Q, ar))
    L = _cauchy_from_nodes(prob, nodes, scaled)
    n = prob.N + 1
    return RelationSystem(L - ar.eye(n), [("cauchy", i) for i in range(n)], prob.R, scaled)


def cauchy_system(prob: ExpansionProblem, quadrature: str = "simpson", scaled: bool = True) -> RelationSystem:
    if quadrature == "simpson":
        return cauchy_matrix_simpson(prob, scaled)
    if quadrature == "riemann":
        return cauchy_matrix_riemann(prob, scaled)
    raise ValueError(f"unknown quadrature {quadrature!r}")


# ---------------------------------------------------------------------------
# Hecke operators


def classical_hecke_cosets(p: int, ar: Arith) -> list[RealMatrix2]:
    """Coset representatives (1 j; 0 p), (p 0; 0 1) of T_p on Gamma_0(N), det-normalised."""
    s = ar.sqrt(ar.real(p))
    one, zero = ar.real(1), ar.real(0)
    cos = [RealMatrix2(one / s, ar.real(j) / s, zero, ar.real(p) / s) for j in range(p)]
    cos.append(RealMatrix2(ar.real(p) / s, zero, zero, one / s))
    return cos


def normalized_hecke_eigenvalue(a_p, p: int, k: int):
    """Eigenvalue of ``f -> sum j(pi_i, z)^-k f(pi_i z)`` for det-1 cosets: p^(1 - k/2) a_p."""
    return a_p * p ** (1 - k / 2) if k != 2 else a_p


def hecke_kernel(prob: ExpansionProblem, cosets, scaled: bool = False):
    """Vector K^h with ``(T f)(p) ~ sum_n K^h_n b_n``."""
    ar, k, N = prob.ar, prob.weight, prob.N
    p = prob.center
    out = ar.zeros(N + 1)
    for pi in cosets:
        zi, jp = pi.act(p), pi.j(p)
        wi = to_disc(p, zi)
        if not abs(wi) < 1:
            raise RelationError("Hecke image left the disc")
        red = prob.reducer(wi)
        wp = red.w_prime
        if abs(wp) > prob.eval_radius * (1 + ar.tol(6)):
            raise RelationError(
                f"Hecke image reduces to |w'| = {float(abs(wp)):.6f} beyond {float(prob.eval_radius):.6f}"
            )
        jg = red.g.j(zi)
        coef = (1 - wp) ** k / (jp ** k * jg ** k)
        out = out + coef * _powers(wp / prob.R if scaled else wp, N, ar)
    return out


def hecke_row(prob: ExpansionProblem, cosets, a_p, scaled: bool = False):
    """Row for ``a_p b_0 = sum_n K^h_n b_n`` written as ``(K^h - a_p e_0) b = 0``."""
    row = hecke_kernel(prob, cosets, scaled)
    row[0] = row[0] - a_p
    return row


def hecke_system(prob: ExpansionProblem, operators, scaled: bool = True) -> RelationSystem:
    """``operators`` is a list of ``(label, cosets, a_p)``."""
    rows, prov = [], []
    for label, cosets, a_p in operators:
        rows.append(hecke_row(prob, cosets, a_p, scaled))
        prov.append(("hecke", label))
    return RelationSystem(np.vstack(rows), prov, prob.R, scaled)


# ---------------------------------------------------------------------------
# scaling


def scale_system(sys: RelationSystem, R=None, diagonal: bool = True, ar: Arith | None = None) -> RelationSystem:
    """Substitute ``b'_n = b_n R^n`` and normalise Cauchy rows to unit diagonal.

    Columns are multiplied by R^-n.  A Cauchy row n is also multiplied by
    R^n (a similarity, so ``K - I`` keeps its diagonal) and, when
    ``diagonal`` is set, divided by that diagonal entry ``K_nn - 1``.  The
    factors are recorded so :func:`unscale_system` can undo them.
    """
    if sys.scaled and sys.diagonally_scaled:
        raise RelationError("system is already scaled")
    R = sys.R if R is None else R
    M, n = sys.matrix.shape
    mat = sys.matrix.copy()
    one = R ** 0
    if not sys.scaled:
        cols = np.array([R ** (-i) for i in range(n)], dtype=mat.dtype)
        rows = np.array([R ** e[1] if isinstance(e, tuple) and e[0] == "cauchy" else one for e in sys.provenance],
                        dtype=mat.dtype)
    else:
        cols = np.array([one] * n, dtype=mat.dtype)
        rows = np.array([one] * M, dtype=mat.dtype)
    mat = mat * cols[None, :] * rows[:, None]
    tiny = ar.tol(3) if ar is not None else 1e-12
    diag_done = False
    if diagonal:
        for i, e in enumerate(sys.provenance):
            if isinstance(e, tuple) and e[0] == "cauchy":
                d = mat[i, e[1]]
                if abs(d) < tiny:
                    log.warning("row %d: |K_nn - 1| = %.3g too small, skipping diagonal scaling", i, float(abs(d)))
                    continue
                mat[i, :] = mat[i, :] / d
                rows[i] = rows[i] / d
                diag_done = True
    return RelationSystem(
        mat, list(sys.provenance), R, True, diag_done or sys.diagonally_scaled, rows, cols, sys.dropped_rows
    )


def unscale_system(sys: RelationSystem) -> RelationSystem:
    if sys.row_factors is None:
        raise RelationError("system carries no recorded scaling")
    mat = sys.matrix / sys.row_factors[:, None] / sys.col_factors[None, :]
    # unit column factors mean the rows were assembled in the scaled variables
    was_scaled = all(c == 1 for c in sys.col_factors)
    return RelationSystem(mat, list(sys.provenance), sys.R, was_scaled, False, dropped_rows=sys.dropped_rows)


def condition_estimate(mat: np.ndarray) -> float:
    m = np.asarray(np.vectorize(complex, otypes=[complex])(mat))
    s = np.linalg.svd(m, compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


__all__ = [
    "ExpansionProblem",
    "RelationError",
    "RelationSystem",
    "automorphy_row",
    "automorphy_system",
    "cauchy_matrix_riemann",
    "cauchy_matrix_simpson",
    "cauchy_system",
    "classical_hecke_cosets",
    "condition_estimate",
    "hecke_kernel",
    "hecke_row",
    "hecke_system",
    "normalized_hecke_eigenvalue",
    "scale_system",
    "simpson_weights",
    "truncation_degree",
    "unscale_system",
]
