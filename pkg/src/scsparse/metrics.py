"""Dense spectral ground truth: distances, epsilon-closeness, exact local densities of states."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .complex import SimplicialComplex
from .errors import LevelMismatch, OrderOutOfRange, SizeGuard, ValidationError
from .exact import DENSE_LIMIT, RANK_TOL
from .hodge import boundary_matrix

KERNEL_ATOL = 1e-8


def _guard(n: int):
    if n > DENSE_LIMIT:
        raise SizeGuard(f"dense operator of dimension {n} exceeds limit {DENSE_LIMIT}")


def dense_up_laplacian(c: SimplicialComplex, k: int, weights=None) -> np.ndarray:
    """``L_k^up = B_{k+1} diag(w) B_{k+1}^T`` as a dense array (zero if there are no ``(k+1)``-simplices)."""
    m_k = c.m(k)
    if m_k == 0:
        raise OrderOutOfRange(f"complex has no {k}-simplices")
    _guard(m_k)
    if c.m(k + 1) == 0:
        return np.zeros((m_k, m_k))
    _guard(c.m(k + 1))
    B = boundary_matrix(c, k + 1).to_sparse()
    w = c.weights(k + 1) if weights is None else np.asarray(weights, dtype=float)
    return np.asarray((B.multiply(w) @ B.T).todense())


def dense_down_laplacian(c: SimplicialComplex, k: int) -> np.ndarray:
    """``L_{k+1}^down = W B_{k+1}^T B_{k+1} W`` (dimension ``m_{k+1}``)."""
    _guard(c.m(k + 1))
    BW = boundary_matrix(c, k + 1).to_dense() * c.sqrt_weights(k + 1)
    return BW.T @ BW


def _shared_level(a: SimplicialComplex, b: SimplicialComplex, k: int):
    if a.level(k) != b.level(k):
        raise LevelMismatch(f"complexes differ at order {k}")


def spectral_distance(c_ref: SimplicialComplex, c_cmp: SimplicialComplex, k: int, cmp_weights=None) -> float:
    """``||L_k^up(ref) - L_k^up(cmp)||_2 / lambda_max(L_k^up(ref))``.

    ``cmp_weights`` overrides the ``(k+1)``-weights stored in ``c_cmp``.
    """
    _shared_level(c_ref, c_cmp, k)
    A = dense_up_laplacian(c_ref, k)
    B = dense_up_laplacian(c_cmp, k, cmp_weights)
    lam = np.linalg.eigvalsh(A)[-1]
    if lam <= 0:
        raise ValidationError("reference up-Laplacian is zero")
    d = np.linalg.eigvalsh(A - B)
    return float(max(abs(d[0]), abs(d[-1])) / lam)


def eigenvalue_distance(c_ref: SimplicialComplex, c_cmp: SimplicialComplex, k: int) -> float:
    """l2 distance between sorted spectra, normalized by ``lambda_max`` of the reference."""
    _shared_level(c_ref, c_cmp, k)
    a = np.linalg.eigvalsh(dense_up_laplacian(c_ref, k))
    b = np.linalg.eigvalsh(dense_up_laplacian(c_cmp, k))
    return float(np.linalg.norm(a - b) / a[-1])


def relative_spectrum(c_ref: SimplicialComplex, c_cmp: SimplicialComplex, k: int) -> tuple[np.ndarray, float]:
    """Generalized eigenvalues of ``L(cmp)`` relative to ``L(ref)`` on ``im L(ref)``.

    Also returns the size of ``L(cmp)`` on the kernel of ``L(ref)`` (2-norm of
    the restriction), which must vanish for the two to be comparable.
    """
    _shared_level(c_ref, c_cmp, k)
    A = dense_up_laplacian(c_ref, k)
    B = dense_up_laplacian(c_cmp, k)
    lam, Q = np.linalg.eigh(A)
    pos = lam > RANK_TOL * max(lam[-1], 0.0)
    Qp, Qn = Q[:, pos], Q[:, ~pos]
    isq = 1.0 / np.sqrt(lam[pos])
    C = isq[:, None] * (Qp.T @ B @ Qp) * isq[None, :]
    gen = np.linalg.eigvalsh((C + C.T) / 2)
    leak = float(np.linalg.norm(B @ Qn, 2)) if Qn.shape[1] else 0.0
    return gen, leak


def eps_close_check(c_ref: SimplicialComplex, c_cmp: SimplicialComplex, k: int, eps: float) -> bool:
    """``(1 - eps) L(ref) <= L(cmp) <= (1 + eps) L(ref)`` in the Loewner order."""
    if eps <= 0:
        raise ValidationError("eps must be positive")
    gen, leak = relative_spectrum(c_ref, c_cmp, k)
    scale = max(1.0, float(np.max(np.abs(gen))) if gen.size else 1.0)
    if leak > KERNEL_ATOL * scale:
        return False
    if gen.size == 0:
        return True
    return bool(gen[0] >= 1 - eps and gen[-1] <= 1 + eps)


@dataclass(frozen=True)
class LdosTable:
    """Eigenvalues and squared eigenvector entries: ``masses[j, i] = |e_j^T q_i|^2``."""

    eigenvalues: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def nonzero_mass(self, tol: float = RANK_TOL) -> np.ndarray:
        """Per-index mass on eigenvalues above ``tol * lambda_max``."""
        lam = self.eigenvalues
        keep = lam > tol * max(lam.max(initial=0.0), 0.0)
        return self.masses[:, keep].sum(axis=1)


def exact_ldos(c: SimplicialComplex, k: int, which: str = "down") -> LdosTable:
    """Local densities of states of ``L_k^up`` (``which='up'``) or ``L_{k+1}^down``."""
    if which == "up":
        A = dense_up_laplacian(c, k)
    elif which == "down":
        A = dense_down_laplacian(c, k)
    else:
        raise ValidationError(f"which must be 'up' or 'down', got {which!r}")
    lam, Q = np.linalg.eigh(A)
    return LdosTable(lam, Q**2)


@dataclass(frozen=True)
class HistogramSpec:
    bin_count: int
    lo: float = 0.0
    hi: float = 1.0
    mollifier: str | None = None  # None, "box" or "gaussian"
    width: float = 0.0

    def __post_init__(self):
        if self.bin_count < 1:
            raise ValidationError("bin_count must be >= 1")
        if not self.lo < self.hi:
            raise ValidationError("need lo < hi")
        if self.mollifier not in (None, "box", "gaussian"):
            raise ValidationError(f"unknown mollifier {self.mollifier!r}")
        if self.mollifier is not None and not self.width > 0:
            raise ValidationError("mollifier width must be positive")

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bin_count + 1)


def _point_mass_bins(x: np.ndarray, spec: HistogramSpec) -> np.ndarray:
    """``(len(x), bins)`` fraction of a unit mass at each ``x`` landing in each bin."""
    edges = spec.edges
    if spec.mollifier is None:
        idx = np.searchsorted(edges, x, side="right") - 1
        idx = np.where(x == edges[-1], spec.bin_count - 1, idx)
        out = np.zeros((x.size, spec.bin_count))
        ok = (idx >= 0) & (idx < spec.bin_count)
        out[np.flatnonzero(ok), idx[ok]] = 1.0
        return out
    if spec.mollifier == "box":
        h = spec.width / 2
        lo = np.clip(edges[None, :-1], x[:, None] - h, x[:, None] + h)
        hi = np.clip(edges[None, 1:], x[:, None] - h, x[:, None] + h)
        return (hi - lo) / spec.width
    s = spec.width
    cdf = 0.5 * (1 + erf((edges[None, :] - x[:, None]) / (s * np.sqrt(2))))
    return np.diff(cdf, axis=1)


def ldos_histogram(t: LdosTable, spec: HistogramSpec, symmetrize: bool = False) -> np.ndarray:
    """Per-index bin masses (``n x bin_count``).

    With ``symmetrize`` the nonzero eigenvalues also contribute negative mass at
    ``-lambda`` and the kernel is dropped, giving an odd histogram.
    """
    lam = t.eigenvalues
    if symmetrize:
        keep = lam > RANK_TOL * max(lam.max(initial=0.0), 0.0)
        pos = _point_mass_bins(lam[keep], spec)
        neg = _point_mass_bins(-lam[keep], spec)
        return t.masses[:, keep] @ (pos - neg)
    return t.masses @ _point_mass_bins(lam, spec)
