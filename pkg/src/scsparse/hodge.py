"""Signed boundary matrices and matrix-free weighted up/down Laplacians."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complex import SimplicialComplex
from .errors import DimensionMismatch, OrderOutOfRange, ZeroOperator


@dataclass(frozen=True)
class SignedIncidence:
    """Sparse ``B_k`` as triplets ``(face index, simplex index, sign)``.

    Entries are stored column-major: the ``k+1`` entries of column ``j`` are
    contiguous and ordered by omitted-vertex position.
    """

    rows: int
    cols: int
    face_index: np.ndarray = field(repr=False)
    simplex_index: np.ndarray = field(repr=False)
    sign: np.ndarray = field(repr=False)  # int8, +-1

    @property
    def nnz(self) -> int:
        return int(self.sign.size)

    def column(self, j: int) -> list[tuple[int, int]]:
        sel = self.simplex_index == j
        return list(zip(self.face_index[sel].tolist(), self.sign[sel].tolist()))

    def to_sparse(self, dtype=np.float64) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.sign.astype(dtype), (self.face_index, self.simplex_index)),
            shape=(self.rows, self.cols),
        )

    def to_dense(self, dtype=np.float64) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=dtype)
        out[self.face_index, self.simplex_index] = self.sign
        return out

    def with_sign_flipped(self, entry: int) -> SignedIncidence:
        s = self.sign.copy()
        s[entry] = -s[entry]
        return SignedIncidence(self.rows, self.cols, self.face_index, self.simplex_index, s)


def boundary_matrix(c: SimplicialComplex, k: int) -> SignedIncidence:
    """``B_k`` mapping ``k``-chains to ``(k-1)``-chains in the lexicographic bases."""
    if not 1 <= k <= c.dim:
        raise OrderOutOfRange(f"boundary order {k} outside [1, {c.dim}]")
    verts = c.vertex_array(k)
    m = len(verts)
    faces = np.empty((m, k + 1), dtype=np.int64)
    lower = c._index[k - 1]
    keep = np.ones(k + 1, dtype=bool)
    for j in range(k + 1):
        keep[:] = True
        keep[j] = False
        sub = verts[:, keep]
        faces[:, j] = [lower[tuple(row)] for row in sub.tolist()]
    signs = np.tile(np.where(np.arange(k + 1) % 2, -1, 1).astype(np.int8), m)
    cols = np.repeat(np.arange(m, dtype=np.int64), k + 1)
    return SignedIncidence(c.m(k - 1), m, faces.ravel(), cols, signs)


def boundary_product_is_zero(lower: SignedIncidence, upper: SignedIncidence) -> bool:
    """True iff ``lower @ upper`` vanishes exactly (integer arithmetic)."""
    if lower.cols != upper.rows:
        raise DimensionMismatch(f"cannot compose {lower.rows}x{lower.cols} with {upper.rows}x{upper.cols}")
    prod = lower.to_sparse(np.int64) @ upper.to_sparse(np.int64)
    prod.eliminate_zeros()
    return prod.nnz == 0


def chain_complex_check(c: SimplicialComplex, k: int) -> bool:
    """Check ``B_k B_{k+1} = 0``; ``B_0`` is the zero map."""
    if not 0 <= k or k + 1 > c.dim:
        raise OrderOutOfRange(f"need 0 <= k and k+1 <= {c.dim}, got k={k}")
    if k == 0:
        return True
    return boundary_product_is_zero(boundary_matrix(c, k), boundary_matrix(c, k + 1))


class UpDownOperator:
    """Matrix-free ``L_k^up = B W^2 B^T`` and ``L_{k+1}^down = W B^T B W``.

    ``B`` is ``B_{k+1}`` and ``W = diag(sqrt(w))`` for the ``(k+1)``-simplex
    weights ``w``.  ``applications`` counts applied columns (a vector counts
    once, an ``n x p`` block counts ``p``).
    """

    def __init__(self, boundary: SignedIncidence, weights=None, mode: str = "down"):
        if mode not in ("up", "down"):
            raise ValueError(f"mode must be 'up' or 'down', got {mode!r}")
        self.boundary = boundary
        w = np.ones(boundary.cols) if weights is None else np.asarray(weights, dtype=float)
        if w.shape != (boundary.cols,):
            raise DimensionMismatch(f"expected {boundary.cols} weights, got {w.shape}")
        self.weights = w
        self.mode = mode
        self._B = boundary.to_sparse()
        self._Bt = self._B.T.tocsr()
        self.applications = 0

    @classmethod
    def from_complex(cls, c: SimplicialComplex, k: int, mode: str = "down", weights=None) -> UpDownOperator:
        """Operator for sparsification at order ``k`` (uses ``B_{k+1}``)."""
        B = boundary_matrix(c, k + 1)
        return cls(B, c.weights(k + 1) if weights is None else weights, mode)

    @property
    def m_k(self) -> int:
        return self.boundary.rows

    @property
    def m_k1(self) -> int:
        return self.boundary.cols

    @property
    def dim(self) -> int:
        return self.m_k if self.mode == "up" else self.m_k1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.dim, self.dim)

    def with_mode(self, mode: str) -> UpDownOperator:
        return UpDownOperator(self.boundary, self.weights, mode)

    def scaled(self, factor: float) -> UpDownOperator:
        """Same operator with every weight multiplied by ``factor``."""
        return UpDownOperator(self.boundary, self.weights * factor, self.mode)

    def _count(self, x):
        self.applications += 1 if x.ndim == 1 else x.shape[1]

    def apply_up(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.m_k:
            raise DimensionMismatch(f"up operator acts on length {self.m_k}, got {x.shape[0]}")
        self._count(x)
        w = self.weights if x.ndim == 1 else self.weights[:, None]
        return self._B @ (w * (self._Bt @ x))

    def apply_down(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape[0] != self.m_k1:
            raise DimensionMismatch(f"down operator acts on length {self.m_k1}, got {y.shape[0]}")
        self._count(y)
        s = np.sqrt(self.weights)
        if y.ndim > 1:
            s = s[:, None]
        return s * (self._Bt @ (self._B @ (s * y)))

    def apply(self, x):
        return self.apply_up(x) if self.mode == "up" else self.apply_down(x)

    __matmul__ = apply

    def norm_bound(self) -> float:
        """Upper bound ``||BW||_1 * ||BW||_inf`` on the largest eigenvalue."""
        BW = abs(self._B) @ sp.diags(np.sqrt(self.weights))
        col = float(np.max(np.asarray(BW.sum(axis=0)))) if BW.shape[1] else 0.0
        row = float(np.max(np.asarray(BW.sum(axis=1)))) if BW.shape[0] else 0.0
        return col * row


class ScaledOperator:
    """``H = A / scale`` for an :class:`UpDownOperator` ``A``."""

    def __init__(self, op: UpDownOperator, scale: float):
        self.op = op
        self.scale = float(scale)

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def shape(self):
        return self.op.shape

    def __matmul__(self, x):
        return self.op.apply(x) / self.scale


@dataclass(frozen=True)
class OperatorScale:
    lambda_max: float
    safety: float
    iterations_used: int
    converged: bool = True

    @property
    def scale(self) -> float:
        return self.lambda_max * self.safety


def estimate_lambda_max(
    op: UpDownOperator,
    tol: float = 1e-6,
    safety: float = 1.01,
    seed: int = 0,
    max_iter: int | None = None,
) -> OperatorScale:
    """Largest eigenvalue of the down mode by power iteration.

    Stops when the Rayleigh quotient changes by less than ``tol`` (relative).
    If that does not happen within ``max_iter`` steps (default
    ``10*ceil(ln m)``, at least 10), a Lanczos refinement takes over and its
    Ritz value plus residual norm is returned; only if that also fails does the
    rigorous bound :meth:`UpDownOperator.norm_bound` apply.
    """
    down = op.with_mode("down")
    m = down.dim
    if m == 0:
        raise ZeroOperator("operator has dimension 0")
    if max_iter is None:
        max_iter = max(10 * math.ceil(math.log(m)), 10)
    rng = np.random.default_rng(seed)
    v = None
    for _ in range(64):
        x = rng.standard_normal(m)
        x /= np.linalg.norm(x)
        y = down.apply_down(x)
        if np.linalg.norm(y) > 0:
            v = x
            break
    if v is None:
        raise ZeroOperator("operator annihilates 64 random starts")

    rq_old = float(v @ y)
    it = 1
    while it < max_iter:
        v = y / np.linalg.norm(y)
        y = down.apply_down(v)
        it += 1
        rq = float(v @ y)
        if abs(rq - rq_old) <= tol * abs(rq):
            return OperatorScale(rq, safety, it, True)
        rq_old = rq
    # Near-degenerate top eigenvalues (common in VR complexes) stall the power
    # method; the norm bound is then 2-3x too large, which wastes Chebyshev
    # resolution.  Lanczos from the last iterate usually settles it.
    refined = _lanczos_top(down, v, tol)
    if refined is not None:
        bound, mv = refined
        return OperatorScale(bound, safety, it + mv, True)
    return OperatorScale(down.norm_bound(), safety, it, False)


def _lanczos_top(op: UpDownOperator, v0: np.ndarray, tol: float):
    """``(ritz + residual, matvecs)`` for the top eigenpair, or ``None``."""
    count = [0]

    def mv(x):
        count[0] += 1
        return op.apply_down(np.asarray(x).ravel())

    lin = spla.LinearOperator((op.dim, op.dim), matvec=mv, dtype=float)
    if op.dim < 3:
        return None
    try:
        vals, vecs = spla.eigsh(lin, k=1, which="LA", v0=v0, tol=tol, ncv=min(op.dim, 20), maxiter=50 * op.dim)
    except spla.ArpackError:
        return None
    x = vecs[:, 0]
    resid = float(np.linalg.norm(op.apply_down(x) - vals[0] * x))
    count[0] += 1
    # Some eigenvalue lies within ``resid`` of the Ritz value; for the converged
    # top Ritz pair that eigenvalue is the largest one.
    return float(vals[0]) + resid, count[0]
