"""Unbiased random sparsification of (k+1)-simplices, plus baselines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complex import SimplicialComplex, boundary_faces
from .errors import DegenerateMeasure, InvalidEps, OrderOutOfRange, ValidationError


@dataclass(frozen=True)
class ProbabilityMeasure:
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValidationError("a measure needs a nonempty 1-d support")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValidationError("probabilities must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValidationError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return self.probs.size

    @classmethod
    def normalized(cls, values) -> ProbabilityMeasure:
        v = np.asarray(values, dtype=float)
        total = v.sum()
        if not total > 0:
            raise DegenerateMeasure("cannot normalize a zero vector into a measure")
        p = v / total
        # one more pass pins the sum to 1 within a couple of ulps
        return cls(p / p.sum())

    @classmethod
    def uniform(cls, m: int) -> ProbabilityMeasure:
        return cls(np.full(m, 1.0 / m))


@dataclass(frozen=True)
class SparsifyConfig:
    q: int
    eps: float | None = None
    C: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise ValidationError(f"q must be a positive integer, got {self.q}")
        if self.eps is not None and not 0 < self.eps < 1:
            raise InvalidEps(f"eps must lie in (0, 1), got {self.eps}")
        if not self.C > 0:
            raise ValidationError(f"C must be positive, got {self.C}")


@dataclass(frozen=True)
class SparsifierResult:
    sub_complex: SimplicialComplex
    kept: np.ndarray = field(repr=False)            # indices into the original V_{k+1}
    new_sq_weights: np.ndarray = field(repr=False)  # aligned with ``kept``
    draw_log: np.ndarray = field(repr=False)        # one original index per draw
    k: int = 1

    @property
    def n_kept(self) -> int:
        return int(self.kept.size)


def measure_from_resistance(r, weights) -> ProbabilityMeasure:
    """``p = W^2 r / ||W^2 r||_1`` with ``W^2 = diag(weights)``."""
    r = np.asarray(getattr(r, "values", r), dtype=float)
    w = np.asarray(weights, dtype=float)
    if r.shape != w.shape:
        raise ValidationError(f"{r.size} resistances but {w.size} weights")
    v = np.clip(w * r, 0.0, None)
    if not v.sum() > 0:
        raise DegenerateMeasure("W^2 r is the zero vector")
    return ProbabilityMeasure.normalized(v)


def measure_from_ger(r, weights) -> ProbabilityMeasure:
    """Sampling measure from weight-inclusive resistances ``diag(W B^T L^+ B W)``.

    Those already carry one factor of ``W^2`` relative to ``diag(B^T L^+ B)``,
    so dividing by the weights first and then applying
    :func:`measure_from_resistance` amounts to normalizing them directly.
    """
    w = np.asarray(weights, dtype=float)
    r = np.asarray(getattr(r, "values", r), dtype=float)
    return measure_from_resistance(r / w, w)


def default_q(m_k: int, eps: float, C: float = 1.0) -> int:
    """``ceil(9 C^2 m_k ln(m_k / eps^2))`` samples."""
    if eps <= 0 or m_k < 1:
        raise InvalidEps(f"need eps > 0 and m_k >= 1, got eps={eps}, m_k={m_k}")
    arg = m_k / eps**2
    if arg <= 1 or eps <= 1 / math.sqrt(m_k):
        raise InvalidEps(f"eps={eps} must exceed 1/sqrt(m_k)={1 / math.sqrt(m_k):.4g}")
    return math.ceil(9 * C**2 * m_k * math.log(arg))


def _check_order(c: SimplicialComplex, k: int):
    if not 0 <= k < c.dim:
        raise OrderOutOfRange(f"no {k + 1}-simplices to sparsify (dim {c.dim})")


def _result(c: SimplicialComplex, k: int, kept: np.ndarray, new_w: np.ndarray, draws: np.ndarray):
    level = c.level(k + 1)
    sub = c.with_level(k + 1, [level[i] for i in kept.tolist()], new_w)
    return SparsifierResult(sub, kept, new_w, draws, k)


def sample_sparsifier(
    c: SimplicialComplex, k: int, p: ProbabilityMeasure, cfg: SparsifyConfig
) -> SparsifierResult:
    """Draw ``q`` simplices of order ``k+1`` with replacement from ``p``.

    Each draw of ``sigma`` adds ``w(sigma) / (q p(sigma))`` to its new squared
    weight; orders ``<= k`` are copied unchanged.
    """
    _check_order(c, k)
    m = c.m(k + 1)
    if len(p) != m:
        raise ValidationError(f"measure has {len(p)} entries but V_{k + 1} has {m}")
    rng = np.random.default_rng(cfg.seed)
    cdf = np.cumsum(p.probs)
    u = rng.random(cfg.q) * cdf[-1]
    draws = np.minimum(np.searchsorted(cdf, u, side="right"), m - 1)
    w = c.weights(k + 1)
    acc = np.zeros(m)
    np.add.at(acc, draws, w[draws] / (cfg.q * p.probs[draws]))
    kept = np.flatnonzero(acc > 0)
    return _result(c, k, kept, acc[kept], draws)


def uniform_sparsifier(c: SimplicialComplex, k: int, q: int, seed: int = 0) -> SparsifierResult:
    _check_order(c, k)
    return sample_sparsifier(c, k, ProbabilityMeasure.uniform(c.m(k + 1)), SparsifyConfig(q, seed=seed))


def kneighbours_sparsifier(c: SimplicialComplex, k: int, cap: int) -> SparsifierResult:
    """Greedy lexicographic pass: keep a simplex while all its faces have fewer than ``cap`` kept co-faces.

    Original weights are kept; this baseline is not reweighted.
    """
    _check_order(c, k)
    if cap < 1:
        raise ValidationError(f"cap must be >= 1, got {cap}")
    load = np.zeros(c.m(k), dtype=np.int64)
    kept = []
    for j, s in enumerate(c.level(k + 1)):
        faces = [c.index(f) for f, _ in boundary_faces(s)]
        if all(load[f] < cap for f in faces):
            kept.append(j)
            load[faces] += 1
    kept = np.array(kept, dtype=np.int64)
    return _result(c, k, kept, c.weights(k + 1)[kept].copy(), kept.copy())


def perturb_measure(p: ProbabilityMeasure, delta: float, seed: int = 0) -> ProbabilityMeasure:
    """Uniform noise on ``(-delta/m, delta/m)``, clamped at 0 and renormalized.

    If renormalization pushes some entry ``delta/m`` or further from ``p``, the
    noise is halved and the step repeated.
    """
    if delta < 0:
        raise ValidationError(f"delta must be >= 0, got {delta}")
    if delta == 0:
        return p
    m = len(p)
    bound = delta / m
    noise = np.random.default_rng(seed).uniform(-bound, bound, size=m)
    for _ in range(60):
        v = np.clip(p.probs + noise, 0.0, None)
        if v.sum() > 0:
            out = v / v.sum()
            if np.max(np.abs(out - p.probs)) < bound:
                return ProbabilityMeasure.normalized(out)
        noise *= 0.5
    return p
