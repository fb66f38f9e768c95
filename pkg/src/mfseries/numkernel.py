"""Dense complex linear algebra at working precision.

Everything here works on numpy ``complex128`` arrays and on ``object``
arrays of mpmath numbers alike; the scalar operations used are those common
to both.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .mpnum import Arith, backend

log = logging.getLogger(__name__)


class KernelError(RuntimeError):
    pass


class RankDeficientError(KernelError):
    def __init__(self, msg: str, condition: float):
        super().__init__(f"{msg} (condition estimate {condition:.3g})")
        self.condition = condition


def _guess_arith(A) -> Arith:
    if A.dtype != object:
        return backend()
    x = A.reshape(-1)[0]
    ctx = getattr(x, "context", None)
    dps = getattr(ctx, "dps", 15)
    return backend(max(15, int(dps)))


def _conj(x):
    return x.conjugate()


def _dot(x, y):
    """Hermitian inner product x* y."""
    if x.dtype == object:
        s = 0
        for a, b in zip(x, y):
            s += a.conjugate() * b
        return s
    return np.vdot(x, y)


def _norm2(x):
    if x.dtype == object:
        s = 0
        for a in x:
            s += a.real * a.real + a.imag * a.imag
        return s
    return float(np.real(np.vdot(x, x)))


@dataclass
class SVDResult:
    U: np.ndarray
    S: list
    V: np.ndarray
    sweeps: int

    def reconstruct(self):
        n = len(self.S)
        Vh = np.array([[_conj(self.V[j, i]) for j in range(self.V.shape[0])] for i in range(n)], dtype=self.V.dtype)
        return (self.U * np.array(self.S, dtype=self.U.dtype)[None, :]) @ Vh


def svd(A, ar: Arith | None = None, max_sweeps: int = 60) -> SVDResult:
    """One-sided (Hestenes) Jacobi SVD with complex rotations.

    Columns of a working copy of A are orthogonalised pairwise; V
    accumulates the rotations.  Singular values are the final column norms,
    which keeps small singular values accurate to roughly unit roundoff
    relative to the column they live in.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("svd expects a matrix")
    M, K = A.shape
    if M < K:
        raise ValueError(f"svd needs M >= K, got {M}x{K}")
    if K < 1:
        raise ValueError("empty matrix")
    ar = ar or _guess_arith(A)
    W = A.astype(ar.dtype, copy=True)
    V = ar.eye(K)
    eps = ar.unit_roundoff * 10
    tiny = ar.real(ar.unit_roundoff) ** 2
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        rotated = False
        norms = [_norm2(W[:, i]) for i in range(K)]
        for p in range(K - 1):
            for q in range(p + 1, K):
                alpha, beta = norms[p], norms[q]
                if alpha <= tiny or beta <= tiny:
                    continue
                gamma = _dot(W[:, p], W[:, q])
                ag = abs(gamma)
                if ag <= eps * ar.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2 * ag)
                sgn = 1 if zeta >= 0 else -1
                t = sgn / (abs(zeta) + ar.sqrt(1 + zeta * zeta))
                c = 1 / ar.sqrt(1 + t * t)
                s = c * t
                ph = gamma / ag
                e_minus = s * ph.conjugate()
                e_plus = s * ph
                wp, wq = W[:, p].copy(), W[:, q].copy()
                W[:, p] = c * wp - e_minus * wq
                W[:, q] = e_plus * wp + c * wq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - e_minus * vq
                V[:, q] = e_plus * vp + c * vq
                norms[p] = _norm2(W[:, p])
                norms[q] = _norm2(W[:, q])
        if not rotated:
            break
    else:
        log.warning("Jacobi SVD did not converge in %d sweeps", max_sweeps)
    sig = [ar.sqrt(_norm2(W[:, i])) for i in range(K)]
    order = sorted(range(K), key=lambda i: -float(sig[i]))
    S = [sig[i] for i in order]
    V = V[:, order]
    W = W[:, order]
    U = ar.zeros((M, K))
    for i in range(K):
        if S[i] > 0:
            U[:, i] = W[:, i] / S[i]
    return SVDResult(U, S, V, sweeps)


# ---------------------------------------------------------------------------
# LU


def lu_factor(A, ar: Arith | None = None):
    """LU with partial pivoting; returns ``(LU, perm)`` with ``P A = L U``."""
    A = np.asarray(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("lu_factor expects a square matrix")
    ar = ar or _guess_arith(A)
    LU = A.astype(ar.dtype, copy=True)
    perm = list(range(n))
    for k in range(n):
        mags = [abs(LU[i, k]) for i in range(k, n)]
        piv = k + int(np.argmax([float(m) for m in mags]))
        if mags[piv - k] == 0:
            raise RankDeficientError("matrix is singular", float("inf"))
        if piv != k:
            LU[[k, piv], :] = LU[[piv, k], :]
            perm[k], perm[piv] = perm[piv], perm[k]
        LU[k + 1:, k] = LU[k + 1:, k] / LU[k, k]
        LU[k + 1:, k + 1:] = LU[k + 1:, k + 1:] - np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, perm


def lu_solve(LU, perm, rhs, ar: Arith | None = None):
    n = LU.shape[0]
    ar = ar or _guess_arith(LU)
    x = np.asarray(rhs).astype(ar.dtype)[perm].copy()
    for i in range(n):
        x[i] = x[i] - (LU[i, :i] @ x[:i] if i else 0)
    for i in range(n - 1, -1, -1):
        acc = LU[i, i + 1:] @ x[i + 1:] if i < n - 1 else 0
        x[i] = (x[i] - acc) / LU[i, i]
    return x


def _condition_from_lu(LU) -> float:
    d = [abs(complex(LU[i, i])) for i in range(LU.shape[0])]
    lo = min(d)
    return float("inf") if lo == 0 else max(d) / lo


def lu_least_squares(A, rhs, ar: Arith | None = None, refine: int = 1):
    """Least-squares solution of ``A x = rhs``.

    Square systems use LU with partial pivoting.  Tall systems solve the
    normal equations ``A* A x = A* rhs`` by LU and take ``refine`` steps of
    iterative refinement on the residual.
    """
    A = np.asarray(A)
    ar = ar or _guess_arith(A)
    M, K = A.shape
    if M < K:
        raise ValueError(f"underdetermined system {M}x{K}")
    rhs = np.asarray(rhs).astype(ar.dtype)
    if M == K:
        LU, perm = lu_factor(A, ar)
        cond = _condition_from_lu(LU)
        if cond > 10.0 ** (ar.digits - 2):
            raise RankDeficientError("square system is numerically singular", cond)
        return lu_solve(LU, perm, rhs, ar)
    Ah = np.conjugate(A.T) if A.dtype != object else np.vectorize(_conj, otypes=[object])(A.T)
    N = Ah @ A
    LU, perm = lu_factor(N, ar)
    cond = _condition_from_lu(LU)
    # the normal equations square the condition number
    if cond > 10.0 ** (2 * (ar.digits - 2)):
        raise RankDeficientError("least-squares system is rank deficient", cond ** 0.5)
    x = lu_solve(LU, perm, Ah @ rhs, ar)
    for _ in range(refine):
        r = rhs - A @ x
        x = x + lu_solve(LU, perm, Ah @ r, ar)
    return x


def dehomogenize_solve(A, ar: Arith | None = None, drop_row: int | None = -1, pivot: int = 0):
    """Solve ``A b = 0`` with ``b[pivot] = 1``.

    The pivot column moves to the right-hand side.  For a square A one row is
    dropped (the last by default) to leave a square system; pass
    ``drop_row=None`` to keep all rows and solve in the least-squares sense.
    """
    A = np.asarray(A)
    ar = ar or _guess_arith(A)
    M, K = A.shape
    cols = [c for c in range(K) if c != pivot]
    rows = list(range(M))
    if drop_row is not None and M >= K:
        del rows[drop_row]
    sub = A[np.ix_(rows, cols)]
    rhs = -A[rows, pivot]
    x = lu_least_squares(sub, rhs, ar)
    b = ar.zeros(K)
    b[pivot] = ar.cplx(1)
    b[cols] = x
    return b


# ---------------------------------------------------------------------------
# kernel


@dataclass
class KernelResult:
    basis: list
    singular_values: list
    kernel_threshold: float
    dimension: int
    quality: float
    expected_dim: int | None = None
    flagged: bool = False
    residuals: list = field(default_factory=list)

    @property
    def vector(self):
        if not self.basis:
            raise KernelError("numerical kernel is empty")
        return self.basis[0]


def numerical_kernel(system, expected_dim: int | None = None, ar: Arith | None = None,
                     floor: float | None = None) -> KernelResult:
    """Right singular vectors with singular values below the threshold.

    ``system`` is a RelationSystem or a bare matrix.  The threshold is
    ``max(1e3 u sigma_max, floor)`` with u the unit roundoff and
    ``floor = 10**(6 - digits)`` unless given.  A wrong ``expected_dim`` is
    flagged, never used to truncate.
    """
    A = np.asarray(getattr(system, "matrix", system))
    ar = ar or _guess_arith(A)
    M, K = A.shape
    if M < K:
        A = np.vstack([A, ar.zeros((K - M, K))])
    res = svd(A, ar)
    S = res.S
    smax = float(S[0])
    if smax == 0:
        raise KernelError("degenerate input: zero matrix")
    floor = ar.tol(6) if floor is None else floor
    thr = max(1e3 * ar.unit_roundoff * smax, floor)
    dim = sum(1 for s in S if float(s) < thr)
    basis = [res.V[:, K - 1 - i] for i in range(dim)][::-1]
    if 0 < dim < K:
        kept, dropped = float(S[K - dim - 1]), float(S[K - dim])
        quality = kept / dropped if dropped > 0 else float("inf")
    else:
        quality = float("nan")
    resid = [float(_norm2(A @ v) ** 0.5) for v in basis]
    flagged = expected_dim is not None and expected_dim != dim
    if flagged:
        log.warning("numerical kernel has dimension %d, expected %d", dim, expected_dim)
    return KernelResult(basis, S, thr, dim, quality, expected_dim, flagged, resid)


def normalize_vector(v, index: int = 0):
    """Rescale so that ``v[index] == 1``."""
    if abs(v[index]) == 0:
        raise KernelError(f"component {index} vanishes; cannot normalise")
    return v / v[index]


__all__ = [
    "KernelError",
    "KernelResult",
    "RankDeficientError",
    "SVDResult",
    "dehomogenize_solve",
    "lu_factor",
    "lu_least_squares",
    "lu_solve",
    "normalize_vector",
    "numerical_kernel",
    "svd",
]
