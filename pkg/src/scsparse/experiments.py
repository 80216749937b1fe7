"""Experiment building blocks shared by the benchmark CLI and the acceptance suite."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .builders import FiltrationConfig, sample_clustered_points, vietoris_rips
from .complex import SimplicialComplex
from .exact import DENSE_LIMIT, ger_svd
from .kid import KidConfig, default_parameters, kid_run
from .metrics import spectral_distance
from .sparsify import (
    ProbabilityMeasure,
    SparsifyConfig,
    default_q,
    kneighbours_sparsifier,
    measure_from_ger,
    sample_sparsifier,
    uniform_sparsifier,
)

DEFAULT_OFFSET = 3.0
EPS_GRID = tuple(np.round(np.arange(0.25, 8.0 + 1e-9, 0.25), 2))


@lru_cache(maxsize=64)
def vr_complex(m0: int, filtration_eps: float, seed: int = 0, offset: float = DEFAULT_OFFSET, max_order: int = 2) -> SimplicialComplex:
    """Two-cluster VR complex (cached; complexes are immutable)."""
    return vietoris_rips(sample_clustered_points(m0, offset, seed), FiltrationConfig(filtration_eps, max_order))


def dense_vr_epsilon(m0: int, k: int = 1, seed: int = 0, offset: float = DEFAULT_OFFSET, limit: int = DENSE_LIMIT) -> float | None:
    """Smallest grid threshold with ``m_{k+1} >= m_k ln m_k`` and ``m_{k+1} <= limit``."""
    for eps in EPS_GRID:
        c = vr_complex(m0, float(eps), seed, offset, k + 1)
        mk, mk1 = c.m(k), c.m(k + 1)
        if mk1 > limit:
            return None
        if mk > 1 and mk1 >= mk * math.log(mk):
            return float(eps)
    return None


def densest_vr_epsilon(m0: int, k: int = 1, seed: int = 0, offset: float = DEFAULT_OFFSET, limit: int = DENSE_LIMIT) -> float:
    """Largest grid threshold whose complex still fits the dense limit."""
    best = None
    for eps in EPS_GRID:
        c = vr_complex(m0, float(eps), seed, offset, k + 1)
        if max(c.m(k), c.m(k + 1)) > limit:
            break
        best = float(eps)
    if best is None:
        raise ValueError(f"no VR complex with m0={m0} fits the dense limit")
    return best


@lru_cache(maxsize=64)
def exact_measure(c: SimplicialComplex, k: int) -> ProbabilityMeasure:
    return measure_from_ger(ger_svd(c, k), c.weights(k + 1))


def sup_error(p: ProbabilityMeasure, p_hat: ProbabilityMeasure) -> float:
    return float(np.max(np.abs(p.probs - p_hat.probs)))


@dataclass(frozen=True)
class KidTrial:
    error_inf: float
    M: int
    N_z: int
    wall_time_ms: float
    measure: ProbabilityMeasure


def kid_trial(c: SimplicialComplex, k: int, delta: float, seed: int, M: int | None = None, N_z: int | None = None) -> KidTrial:
    p = exact_measure(c, k)
    t0 = time.perf_counter()
    res = kid_run(c, k, KidConfig(delta=delta, M=M, N_z=N_z, seed=seed))
    ms = (time.perf_counter() - t0) * 1e3
    return KidTrial(sup_error(p, res.measure), res.M, res.N_z, ms, res.measure)


def timed_exact(c: SimplicialComplex, k: int) -> tuple[ProbabilityMeasure, float]:
    t0 = time.perf_counter()
    p = measure_from_ger(ger_svd(c, k), c.weights(k + 1))
    return p, (time.perf_counter() - t0) * 1e3


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(lx, ly, 1)[0])


def geometric_grid(hi: int, decades: float = 1.0, points: int = 6, odd: bool = False) -> list[int]:
    """Integers spaced geometrically from ``hi / 10**decades`` to ``hi``."""
    lo = hi / 10**decades
    vals = np.geomspace(lo, hi, points)
    out = []
    for v in vals:
        n = max(1, int(round(v)))
        if odd and n % 2 == 0:
            n += 1
        if not out or n > out[-1]:
            out.append(n)
    return out


def sparsifier_distance(c: SimplicialComplex, k: int, method: str, q: int, seed: int, *, delta: float = 0.1, cap: int = 4) -> float:
    """Spectral distance of one sparsifier drawn by ``method``."""
    if method == "exact":
        sub = sample_sparsifier(c, k, exact_measure(c, k), SparsifyConfig(q, seed=seed)).sub_complex
    elif method == "kid":
        p = kid_run(c, k, KidConfig(delta=delta, seed=seed)).measure
        sub = sample_sparsifier(c, k, p, SparsifyConfig(q, seed=seed)).sub_complex
    elif method == "uniform":
        sub = uniform_sparsifier(c, k, q, seed).sub_complex
    elif method == "kneighbours":
        sub = kneighbours_sparsifier(c, k, cap).sub_complex
    else:
        raise ValueError(f"unknown method {method!r}")
    return spectral_distance(c, sub, k)


def table_q(c: SimplicialComplex, k: int, eps: float = 0.5, C: float = 1.0) -> int:
    return default_q(c.m(k), eps, C)


def default_kid_parameters(c: SimplicialComplex, k: int, delta: float):
    return default_parameters(c.m(k), c.m(k + 1), delta)
