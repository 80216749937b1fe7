"""Benchmark complexes: clustered Vietoris-Rips clouds and closed hypergraphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from collections.abc import Iterable

import numpy as np

from .complex import SimplicialComplex, canonical_simplex
from .errors import EmptyInput, OddCount, ValidationError


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray = field(repr=False)
    seed: int | None = None
    cluster_offset: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValidationError(f"points must have shape (n, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class FiltrationConfig:
    epsilon: float
    max_order: int = 2

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValidationError(f"filtration threshold must be finite and > 0, got {self.epsilon}")
        if int(self.max_order) != self.max_order or self.max_order < 1:
            raise ValidationError(f"max_order must be an integer >= 1, got {self.max_order}")


def _box_muller(rng: np.random.Generator, n: int) -> np.ndarray:
    # Explicit Box-Muller on PCG64 uniforms so clouds do not depend on numpy's
    # internal normal sampler.
    u1 = 1.0 - rng.random(n)  # (0, 1]
    u2 = rng.random(n)
    rad = np.sqrt(-2.0 * np.log(u1))
    return np.column_stack((rad * np.cos(2 * np.pi * u2), rad * np.sin(2 * np.pi * u2)))


def sample_clustered_points(m0: int, c: float, seed: int) -> PointCloud:
    """Two Gaussian clusters in the plane: ``N(0, I)`` and ``N(c*1, I)``, ``m0/2`` points each."""
    if m0 < 2 or m0 % 2:
        raise OddCount(f"m0 must be an even integer >= 2, got {m0}")
    if c < 0:
        raise ValidationError(f"cluster offset must be >= 0, got {c}")
    rng = np.random.default_rng(seed)
    pts = _box_muller(rng, m0)
    pts[m0 // 2:] += c
    return PointCloud(pts, seed=seed, cluster_offset=float(c))


def neighborhood_graph(points: np.ndarray, epsilon: float) -> np.ndarray:
    """Boolean adjacency of the Euclidean ``epsilon``-graph (distance <= epsilon)."""
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    adj = dist <= epsilon
    np.fill_diagonal(adj, False)
    return adj


def clique_complex(adj: np.ndarray, max_order: int) -> SimplicialComplex:
    """Clique complex of a graph, orders ``0..max_order``.

    Each ``k``-clique is extended only by common neighbours larger than its last
    vertex, so new levels come out already in lexicographic order.
    """
    n = adj.shape[0]
    levels = [[(i,) for i in range(n)]]
    current = np.arange(n, dtype=np.int64).reshape(n, 1)
    above = np.triu(np.ones((n, n), dtype=bool), k=1)
    for _ in range(max_order):
        if len(current) == 0:
            break
        common = above[current[:, -1]].copy()
        for col in range(current.shape[1]):
            common &= adj[current[:, col]]
        rows, ext = np.nonzero(common)
        current = np.column_stack((current[rows], ext))
        if len(current) == 0:
            break
        levels.append([tuple(row) for row in current.tolist()])
    return SimplicialComplex(levels)


def vietoris_rips(pc: PointCloud, cfg: FiltrationConfig) -> SimplicialComplex:
    """Vietoris-Rips complex of a point cloud, unit weights."""
    if len(pc) < 1:
        raise ValidationError("at least one point is required")
    return clique_complex(neighborhood_graph(pc.points, cfg.epsilon), int(cfg.max_order))


def ingest_hypergraph(
    hyperedges: Iterable[Iterable[int]],
    max_edge_size: int = 10,
    closure_order: int = 2,
) -> SimplicialComplex:
    """Simplicial closure of a hypergraph.

    Hyperedges with more than ``max_edge_size`` vertices are skipped; every
    subset of at most ``closure_order + 1`` vertices of a kept hyperedge becomes
    a simplex.
    """
    if closure_order < 0:
        raise ValidationError("closure_order must be >= 0")
    kept: set[tuple[int, ...]] = set()
    for he in hyperedges:
        verts = sorted(set(int(v) for v in he))
        if not verts or len(verts) > max_edge_size:
            continue
        kept.add(canonical_simplex(verts))
    if not kept:
        raise EmptyInput("no hyperedge survives the size filter")
    levels: list[set[tuple[int, ...]]] = [set() for _ in range(closure_order + 1)]
    for he in kept:
        for size in range(1, min(len(he), closure_order + 1) + 1):
            levels[size - 1].update(combinations(he, size))
    while levels and not levels[-1]:
        levels.pop()
    return SimplicialComplex([sorted(level) for level in levels])
