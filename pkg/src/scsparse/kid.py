"""Kernel-ignoring decomposition (KID) of local densities of states.

The resistance of the ``i``-th ``(k+1)``-simplex is the mass that the local
density of states of ``L_{k+1}^down`` puts on nonzero eigenvalues.  With
``H = L_{k+1}^down / lambda`` (spectrum in ``[0, 1]``) that mass is
``[s(H)]_ii`` where ``s`` is the sign function on ``[0, 1]`` with ``s(0) = 0``.
The odd extension of the density has only odd Chebyshev moments, each equal to
``2 [T_m(H)]_ii``; those diagonals are estimated with Rademacher probes and the
three-term recurrence, and integrated against the closed-form weights

    c_m = int_0^1 T_m(x) * 2 / (pi sqrt(1 - x^2)) dx = 2 sin(m pi / 2) / (pi m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complex import SimplicialComplex
from .errors import DimensionMismatch, NoSimplices, ValidationError
from .exact import ResistanceVector
from .hodge import OperatorScale, ScaledOperator, UpDownOperator, estimate_lambda_max
from .sparsify import ProbabilityMeasure, measure_from_ger

N_Z_PREFACTOR = 0.1


def _ceil(x: float) -> int:
    # absorb representation error so that e.g. 300 / (0.1 * 100) stays 30
    return math.ceil(x - 1e-9 * max(1.0, abs(x)))


@dataclass(frozen=True)
class KidParameters:
    M: int
    N_z: int
    dense_enough: bool | None = None


def default_parameters(
    m_k: int,
    m_k1: int,
    delta: float,
    *,
    m_km1: int | None = None,
    beta_k: int | None = None,
    prefactor: float = N_Z_PREFACTOR,
) -> KidParameters:
    """Empirically scaled moment and probe counts.

    ``M = ceil(m_{k+1} / (delta m_k))`` and
    ``N_z = ceil(prefactor * 8/pi^2 * (m_{k+1} / (delta m_k))^2)``.  With
    ``m_km1`` and ``beta_k`` the density condition ``m_k/2 >= m_{k-1} + beta_k``
    is reported as well.
    """
    if min(m_k, m_k1) <= 0 or delta <= 0:
        raise ValidationError("m_k, m_{k+1} and delta must be positive")
    ratio = m_k1 / (delta * m_k)
    M = max(1, _ceil(ratio))
    N_z = max(1, _ceil(prefactor * 8 / math.pi**2 * ratio**2))
    dense = None
    if m_km1 is not None and beta_k is not None:
        dense = m_k / 2 >= m_km1 + beta_k
    return KidParameters(M, N_z, dense)


def theoretical_parameters(m_k: int, m_k1: int, delta: float, lipschitz: float, mollifier_sup: float) -> KidParameters:
    """Worst-case counts ``M >= 24 L m_{k+1}/(delta m_k)``, ``N_z >= 8 K^2/pi^2 (m_{k+1}/(delta m_k))^2``."""
    ratio = m_k1 / (delta * m_k)
    return KidParameters(_ceil(24 * lipschitz * ratio), _ceil(8 * mollifier_sup**2 / math.pi**2 * ratio**2))


@dataclass(frozen=True)
class KidConfig:
    delta: float = 0.1
    M: int | None = None
    N_z: int | None = None
    seed: int = 0
    lipschitz_estimate: float | None = None
    mollifier_sup: float | None = None
    safety: float = 1.01
    tol: float = 1e-6
    damping: str | None = None

    def __post_init__(self):
        if not self.delta > 0:
            raise ValidationError(f"delta must be > 0, got {self.delta}")
        for name in ("M", "N_z"):
            v = getattr(self, name)
            if v is not None and (int(v) != v or v < 1):
                raise ValidationError(f"{name} must be a positive integer, got {v}")
        if self.safety < 1:
            raise ValidationError("safety factor must be >= 1")
        if self.damping not in (None, "jackson"):
            raise ValidationError(f"unknown damping {self.damping!r}")


@dataclass(frozen=True)
class RademacherBlock:
    Z: np.ndarray = field(repr=False)
    seed: int = 0


def make_rademacher(m: int, N_z: int, seed: int) -> RademacherBlock:
    """``m x N_z`` matrix of iid +-1 signs.

    Column ``c`` is drawn from its own stream ``SeedSequence(seed, spawn_key=(c,))``,
    so the first columns do not change when ``N_z`` grows.
    """
    if m < 1 or N_z < 1:
        raise ValidationError("need m >= 1 and N_z >= 1")
    Z = np.empty((m, N_z))
    for col in range(N_z):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(col,)))
        Z[:, col] = 2.0 * rng.integers(0, 2, size=m) - 1.0
    Z.setflags(write=False)
    return RademacherBlock(Z, seed)


@dataclass(frozen=True)
class MomentMatrix:
    """Estimated ``diag T_m(H)`` for odd ``m <= M`` (row ``i`` holds ``m = 2i + 1``)."""

    values: np.ndarray = field(repr=False)
    M: int
    scale: float = 1.0

    @property
    def orders(self) -> np.ndarray:
        return np.arange(1, 2 * self.values.shape[0], 2)

    def row(self, m: int) -> np.ndarray:
        if m % 2 == 0:
            return np.zeros(self.values.shape[1])
        return self.values[(m - 1) // 2]


def _as_matmul(H):
    if callable(H) and not hasattr(H, "__matmul__"):
        return H
    return lambda X: H @ X


def kid_moments(H, Z: RademacherBlock | np.ndarray, M: int) -> MomentMatrix:
    """Hutchinson estimates of ``diag T_m(H)`` for odd ``m <= M``.

    ``H`` is anything supporting ``H @ block`` (or a callable).  One operator
    application is spent per Chebyshev step ``m = 1..M``; even steps feed the
    recurrence but are not stored.
    """
    Zm = Z.Z if isinstance(Z, RademacherBlock) else np.asarray(Z, dtype=float)
    if M < 1:
        raise ValidationError("M must be >= 1")
    dim = getattr(H, "shape", (Zm.shape[0],))[0]
    if dim != Zm.shape[0]:
        raise DimensionMismatch(f"operator has dimension {dim}, probes have {Zm.shape[0]} rows")
    apply = _as_matmul(H)
    n_z = Zm.shape[1]
    rows = np.empty(((M + 1) // 2, Zm.shape[0]))
    t_prev, t_cur = Zm, apply(Zm)
    rows[0] = np.einsum("ij,ij->i", Zm, t_cur) / n_z
    for m in range(2, M + 1):
        t_prev, t_cur = t_cur, 2.0 * apply(t_cur) - t_prev
        if m % 2:
            rows[m // 2] = np.einsum("ij,ij->i", Zm, t_cur) / n_z
    return MomentMatrix(rows, M, float(getattr(H, "scale", 1.0)))


def chebyshev_half_integrals(orders) -> np.ndarray:
    """``int_0^1 T_m(x) 2 / (pi sqrt(1 - x^2)) dx = 2 sin(m pi/2) / (pi m)``."""
    m = np.asarray(orders, dtype=float)
    sign = np.where(np.asarray(orders) % 4 == 1, 1.0, -1.0)
    return np.where(np.asarray(orders) % 2 == 1, 2.0 * sign / (np.pi * m), 0.0)


def jackson_coefficients(orders, M: int) -> np.ndarray:
    """Jackson damping factors ``g_m`` for a series truncated after degree ``M``."""
    n = M + 1
    m = np.asarray(orders, dtype=float)
    return ((n - m + 1) * np.cos(np.pi * m / (n + 1)) + np.sin(np.pi * m / (n + 1)) / np.tan(np.pi / (n + 1))) / (n + 1)


def integrate_moments(D: MomentMatrix, damping: str | None = None, clamp: bool = True) -> ResistanceVector:
    """Resistances ``sum_m 2 D[m] c_m`` over odd ``m``, negative values clamped to 0."""
    if D.values.size == 0:
        raise ValidationError("empty moment matrix")
    coef = 2.0 * chebyshev_half_integrals(D.orders)
    if damping == "jackson":
        coef = coef * jackson_coefficients(D.orders, D.M)
    elif damping is not None:
        raise ValidationError(f"unknown damping {damping!r}")
    r = coef @ D.values
    if clamp:
        r = np.clip(r, 0.0, None)
    return ResistanceVector(r, k=-1)


def integrate_moments_histogram(D: MomentMatrix, bins: int = 256, clamp: bool = True) -> ResistanceVector:
    """Cross-check: bin the reconstructed density on ``[0, 1]`` and drop the bin at zero.

    With ``x = cos(theta)`` the bin integral of ``w(x) T_m(x)`` is
    ``2 (sin(m theta_lo) - sin(m theta_hi)) / (pi m)`` exactly.
    """
    edges = np.linspace(0.0, 1.0, bins + 1)
    theta = np.arccos(edges)
    m = D.orders.astype(float)[:, None]
    per_bin = 2.0 * (np.sin(m * theta[None, :-1]) - np.sin(m * theta[None, 1:])) / (np.pi * m)
    weights = 2.0 * per_bin[:, 1:].sum(axis=1)
    r = weights @ D.values
    if clamp:
        r = np.clip(r, 0.0, None)
    return ResistanceVector(r, k=-1)


@dataclass(frozen=True)
class KidResult:
    resistance: ResistanceVector
    measure: ProbabilityMeasure
    M: int
    N_z: int
    scale: OperatorScale
    applications: int


def kid_run(c: SimplicialComplex, k: int, cfg: KidConfig = KidConfig()) -> KidResult:
    """Full KID pipeline with run metadata; see :func:`kid_resistance`."""
    m_k, m_k1 = c.m(k), c.m(k + 1)
    if m_k1 == 0:
        raise NoSimplices(f"complex has no {k + 1}-simplices")
    params = default_parameters(m_k, m_k1, cfg.delta)
    M = cfg.M or params.M
    N_z = cfg.N_z or params.N_z
    op = UpDownOperator.from_complex(c, k, mode="down")
    scale = estimate_lambda_max(op, tol=cfg.tol, safety=cfg.safety, seed=cfg.seed)
    op.applications = 0
    H = ScaledOperator(op, scale.scale)
    Z = make_rademacher(m_k1, N_z, cfg.seed)
    D = kid_moments(H, Z, M)
    r = integrate_moments(D, damping=cfg.damping)
    r = ResistanceVector(r.values, k)
    p = measure_from_ger(r, c.weights(k + 1))
    return KidResult(r, p, M, N_z, scale, op.applications)


def kid_resistance(c: SimplicialComplex, k: int, cfg: KidConfig = KidConfig()) -> tuple[ResistanceVector, ProbabilityMeasure]:
    """Approximate resistances and sampling measure of the ``(k+1)``-simplices.

    ``lambda_max`` by power iteration, Rademacher probes, odd Chebyshev moments
    of the scaled down-Laplacian, closed-form integration, normalization.
    ``M`` and ``N_z`` default to :func:`default_parameters`.
    """
    res = kid_run(c, k, cfg)
    return res.resistance, res.measure
