"""Exact generalized effective resistance and Betti numbers (dense oracles).

Two deliberately separate routes compute the resistance vector so each can
check the other: squared row norms of the right singular vectors of ``B W``
(:func:`ger_svd`) and the diagonal of ``W B^T (L^up)^+ B W`` from an explicit
pseudo-inverse (:func:`ger_pinv`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .complex import SimplicialComplex
from .errors import NoSimplices, OrderOutOfRange, SizeGuard
from .hodge import boundary_matrix

DENSE_LIMIT = 5000
RANK_TOL = 1e-10


@dataclass(frozen=True)
class ResistanceVector:
    """Per-``(k+1)``-simplex resistances, weights included (``r_i`` in ``[0, 1]``)."""

    values: np.ndarray = field(repr=False)
    k: int

    def __len__(self):
        return len(self.values)

    @property
    def l1(self) -> float:
        return float(np.sum(self.values))


@dataclass(frozen=True)
class BettiProfile:
    betti: tuple[int, ...]
    ranks: tuple[int, ...]  # ranks[i-1] = rank B_i


def _guard(n: int, what: str, limit: int | None = None):
    limit = DENSE_LIMIT if limit is None else limit
    if n > limit:
        raise SizeGuard(f"{what} has dimension {n} > dense limit {limit}")


def weighted_boundary_dense(c: SimplicialComplex, k: int) -> np.ndarray:
    """Dense ``B_{k+1} W_{k+1}`` (``m_k x m_{k+1}``)."""
    if not 0 <= k < c.dim:
        if c.m(k + 1) == 0:
            raise NoSimplices(f"complex has no {k + 1}-simplices")
        raise OrderOutOfRange(f"order {k} outside [0, {c.dim - 1}]")
    _guard(c.m(k + 1), f"V_{k + 1}")
    _guard(c.m(k), f"V_{k}")
    return boundary_matrix(c, k + 1).to_dense() * c.sqrt_weights(k + 1)


def numerical_rank(A: np.ndarray, tol: float = RANK_TOL) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol * s[0])) if s[0] > 0 else 0


def ger_svd(c: SimplicialComplex, k: int, tol: float = RANK_TOL) -> ResistanceVector:
    """Resistances as squared row norms of the retained right singular vectors of ``B W``."""
    BW = weighted_boundary_dense(c, k)
    _, s, vt = np.linalg.svd(BW, full_matrices=False)
    keep = s > tol * s[0] if s.size and s[0] > 0 else np.zeros(s.size, dtype=bool)
    V = vt[keep]
    return ResistanceVector(np.einsum("ij,ij->j", V, V), k)


def ger_pinv(c: SimplicialComplex, k: int, tol: float = RANK_TOL) -> ResistanceVector:
    """Resistances as ``diag(W B^T (B W^2 B^T)^+ B W)`` via a Hermitian pseudo-inverse."""
    BW = weighted_boundary_dense(c, k)
    L = BW @ BW.T
    # Squaring the singular-value cutoff (tol**2) would fall below the rounding
    # noise of eigh, so the eigenvalue cutoff is tol * lambda_max.
    Lp = scipy.linalg.pinvh(L, atol=0.0, rtol=tol)
    return ResistanceVector(np.einsum("ij,ij->j", BW, Lp @ BW), k)


def betti_numbers(c: SimplicialComplex, up_to: int) -> BettiProfile:
    """Betti numbers ``beta_0..beta_up_to`` from boundary ranks."""
    if not 0 <= up_to <= c.dim:
        raise OrderOutOfRange(f"up_to={up_to} outside [0, {c.dim}]")
    ranks = []
    for i in range(1, up_to + 2):
        if i > c.dim:
            ranks.append(0)
            continue
        _guard(max(c.m(i), c.m(i - 1)), f"B_{i}")
        ranks.append(numerical_rank(boundary_matrix(c, i).to_dense()))
    rank = [0] + ranks  # rank[i] = rank B_i, rank B_0 = 0
    betti = tuple(c.m(i) - rank[i] - rank[i + 1] for i in range(up_to + 1))
    return BettiProfile(betti, tuple(ranks))


def alternating_rank(c: SimplicialComplex, k: int, profile: BettiProfile | None = None) -> int:
    """``sum_{i=0}^{k} (-1)^(k-i) (m_i - beta_i)``, which equals ``rank B_{k+1}``."""
    profile = profile or betti_numbers(c, k)
    return sum((-1) ** (k - i) * (c.m(i) - profile.betti[i]) for i in range(k + 1))


def printed_l1_formula(c: SimplicialComplex, k: int, profile: BettiProfile | None = None) -> int:
    """``m_k - sum_{i=-1}^{k-1} (-1)^(k-1-i) (m_i - beta_{i+1})`` evaluated literally (``m_{-1} = 0``).

    Kept for comparison only; it disagrees with the resistance mass already on
    a single filled triangle.
    """
    profile = profile or betti_numbers(c, k)
    total = 0
    for i in range(-1, k):
        m_i = c.m(i) if i >= 0 else 0
        total += (-1) ** (k - 1 - i) * (m_i - profile.betti[i + 1])
    return c.m(k) - total


def r_l1_identity(c: SimplicialComplex, k: int) -> tuple[float, int, int]:
    """``(||r||_1, rank B_{k+1} W, alternating Betti sum)``; all three agree."""
    r = ger_svd(c, k)
    rank = numerical_rank(weighted_boundary_dense(c, k))
    alt = alternating_rank(c, k)
    if abs(r.l1 - rank) > 1e-8 or rank != alt:
        raise ArithmeticError(f"l1 identity violated: {r.l1} vs rank {rank} vs alternating {alt}")
    return r.l1, rank, alt
