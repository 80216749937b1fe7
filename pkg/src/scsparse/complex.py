"""Weighted simplicial complexes with a fixed lexicographic orientation.

A simplex is a strictly increasing tuple of nonnegative integer node ids; its
order is ``len(simplex) - 1``.  A :class:`SimplicialComplex` stores, for every
order ``k``, the sorted list of ``k``-simplices together with one positive
weight ``w_k(sigma)`` per simplex.  The diagonal weight matrix used by the
Laplacians is ``W_k = diag(sqrt(w_k))``.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ClosureViolation,
    ConflictingWeight,
    DuplicateVertex,
    EmptySimplex,
    NonpositiveWeight,
    NotFound,
    OrderOutOfRange,
    ValidationError,
)

Simplex = tuple[int, ...]

_WEIGHT_ATOL = 1e-12


def canonical_simplex(vertices: Iterable[int]) -> Simplex:
    """Return ``vertices`` as a sorted tuple, rejecting empty or repeated input."""
    verts = [int(v) for v in vertices]
    if not verts:
        raise EmptySimplex("a simplex needs at least one vertex")
    if any(v < 0 for v in verts):
        raise ValidationError(f"node ids must be nonnegative, got {verts}")
    s = tuple(sorted(verts))
    for a, b in zip(s, s[1:]):
        if a == b:
            raise DuplicateVertex(f"vertex {a} repeated in {list(vertices)}")
    return s


def boundary_faces(s: Simplex) -> list[tuple[Simplex, int]]:
    """Faces of ``s`` with their incidence signs.

    The face omitting the ``j``-th vertex carries sign ``(-1)**j``.  Nodes have
    an empty boundary.
    """
    if len(s) <= 1:
        return []
    return [(s[:j] + s[j + 1:], -1 if j % 2 else 1) for j in range(len(s))]


def _is_canonical(s) -> bool:
    return isinstance(s, tuple) and len(s) > 0 and all(a < b for a, b in zip(s, s[1:]))


class SimplicialComplex:
    """Immutable weighted simplicial complex.

    Use :func:`assemble_complex` for unsorted or partial input; the constructor
    expects canonical, sorted, duplicate-free levels and validates them.
    """

    __slots__ = ("_levels", "_weights", "_index", "_arrays", "_hash")

    def __init__(self, levels: Sequence[Sequence[Simplex]], weights: Sequence[np.ndarray] | None = None):
        lv = tuple(tuple(level) for level in levels)
        while lv and not lv[-1]:
            lv = lv[:-1]
        if weights is None:
            ws = tuple(np.ones(len(level)) for level in lv)
        else:
            if len(weights) < len(lv):
                raise ValidationError("one weight vector per order is required")
            ws = tuple(np.array(w, dtype=float) for w in weights[: len(lv)])
        for k, (level, w) in enumerate(zip(lv, ws)):
            if w.shape != (len(level),):
                raise ValidationError(f"order {k}: {len(level)} simplices but {w.size} weights")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                bad = int(np.flatnonzero(~(w > 0) | ~np.isfinite(w))[0])
                raise NonpositiveWeight(f"weight of {level[bad]} is {w[bad]!r}; weights must be > 0")
            w.setflags(write=False)
            for s in level:
                if not _is_canonical(s) or len(s) != k + 1:
                    raise ValidationError(f"order {k}: {s!r} is not a canonical {k}-simplex")
            for a, b in zip(level, level[1:]):
                if not a < b:
                    raise ValidationError(f"order {k}: level is not strictly sorted at {a}, {b}")
        self._levels = lv
        self._weights = ws
        self._index = tuple({s: i for i, s in enumerate(level)} for level in lv)
        self._arrays: dict[int, np.ndarray] = {}
        self._hash = None
        self._check_closure()

    def _check_closure(self):
        for k in range(1, len(self._levels)):
            below = self._index[k - 1]
            for s in self._levels[k]:
                for face, _ in boundary_faces(s):
                    if face not in below:
                        raise ClosureViolation(f"face {list(face)} of {list(s)} is missing")

    @property
    def dim(self) -> int:
        """Largest order present; -1 for the empty complex."""
        return len(self._levels) - 1

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self._levels)

    def m(self, k: int) -> int:
        """Number of ``k``-simplices (0 outside ``[0, dim]``)."""
        if 0 <= k < len(self._levels):
            return len(self._levels[k])
        return 0

    def level(self, k: int) -> tuple[Simplex, ...]:
        if not 0 <= k < len(self._levels):
            if k >= 0:
                return ()
            raise OrderOutOfRange(f"order {k} is negative")
        return self._levels[k]

    def weights(self, k: int) -> np.ndarray:
        """Read-only vector of ``w_k(sigma)`` in level order."""
        if not 0 <= k < len(self._levels):
            return np.ones(0)
        return self._weights[k]

    def sqrt_weights(self, k: int) -> np.ndarray:
        return np.sqrt(self.weights(k))

    def vertex_array(self, k: int) -> np.ndarray:
        """``m_k x (k+1)`` integer array of the level's vertex tuples."""
        if k not in self._arrays:
            level = self.level(k)
            arr = np.array(level, dtype=np.int64).reshape(len(level), k + 1)
            arr.setflags(write=False)
            self._arrays[k] = arr
        return self._arrays[k]

    def index(self, s: Simplex) -> int:
        return simplex_index(self, s)

    def __contains__(self, s) -> bool:
        s = tuple(s)
        k = len(s) - 1
        return 0 <= k < len(self._index) and s in self._index[k]

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self._levels == other._levels and all(
            np.array_equal(a, b) for a, b in zip(self._weights, other._weights)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._levels)
        return self._hash

    def __repr__(self):
        return f"SimplicialComplex(counts={self.counts})"

    def simplices(self) -> Iterable[tuple[Simplex, float]]:
        """All simplices with weights, order by order."""
        for level, w in zip(self._levels, self._weights):
            yield from zip(level, w.tolist())

    def with_level(self, k: int, simplices: Sequence[Simplex], weights) -> SimplicialComplex:
        """Copy with order ``k`` replaced and all higher orders dropped."""
        levels = list(self._levels[:k]) + [list(simplices)]
        ws = list(self._weights[:k]) + [np.asarray(weights, dtype=float)]
        return SimplicialComplex(levels, ws)

    def truncated(self, k: int) -> SimplicialComplex:
        """Sub-complex of all simplices of order ``<= k``."""
        return SimplicialComplex(self._levels[: k + 1], self._weights[: k + 1])


def simplex_index(c: SimplicialComplex, s: Iterable[int]) -> int:
    """0-based position of ``s`` within its (sorted) level of ``c``."""
    t = tuple(int(v) for v in s)
    k = len(t) - 1
    try:
        return c._index[k][t]
    except (IndexError, KeyError):
        raise NotFound(f"simplex {list(t)} is not in the complex") from None


def assemble_complex(
    simplices: Sequence[Iterable[Iterable[int]]] | Iterable[Iterable[int]],
    weights: Sequence[Sequence[float]] | Mapping[Simplex, float] | None = None,
    *,
    by_order: bool | None = None,
) -> SimplicialComplex:
    """Build a complex from simplex lists.

    ``simplices`` is either a sequence of per-order lists (``by_order=True``) or
    a flat iterable of vertex lists of mixed orders (``by_order=False``).  When
    ``by_order`` is omitted, a sequence whose items are all sequences of
    sequences is treated as per-order.  ``weights`` mirrors the per-order
    layout, or is a mapping from simplex tuples to weights; missing weights
    default to 1.  Duplicate simplices are merged; their weights must agree.
    """
    simplices = list(simplices)
    if by_order is None:
        by_order = bool(simplices) and all(
            isinstance(x, (list, tuple)) and all(isinstance(y, (list, tuple)) for y in x) for x in simplices
        )

    pairs: list[tuple[Simplex, float | None]] = []
    if by_order:
        for k, level in enumerate(simplices):
            wk = None
            if weights is not None and not isinstance(weights, Mapping) and k < len(weights):
                wk = list(weights[k])
                if len(wk) != len(level):
                    raise ValidationError(f"order {k}: {len(level)} simplices but {len(wk)} weights")
            for i, verts in enumerate(level):
                s = canonical_simplex(verts)
                if len(s) != k + 1:
                    raise ValidationError(f"{list(s)} listed at order {k} but has order {len(s) - 1}")
                pairs.append((s, None if wk is None else float(wk[i])))
    else:
        if weights is not None and not isinstance(weights, Mapping):
            flat = list(weights)
            if len(flat) != len(simplices):
                raise ValidationError("flat weights must match the simplex list")
        else:
            flat = None
        for i, verts in enumerate(simplices):
            pairs.append((canonical_simplex(verts), None if flat is None else float(flat[i])))

    if isinstance(weights, Mapping):
        wmap = {canonical_simplex(s): float(v) for s, v in weights.items()}
        pairs = [(s, wmap.get(s, w)) for s, w in pairs]

    merged: dict[Simplex, float | None] = {}
    for s, w in pairs:
        if s in merged:
            prev = merged[s]
            if prev is not None and w is not None and abs(prev - w) > _WEIGHT_ATOL:
                raise ConflictingWeight(f"{list(s)} given with weights {prev!r} and {w!r}")
            if prev is None:
                merged[s] = w
        else:
            merged[s] = w

    if not merged:
        return SimplicialComplex([])
    top = max(len(s) for s in merged) - 1
    levels: list[list[Simplex]] = [[] for _ in range(top + 1)]
    for s in merged:
        levels[len(s) - 1].append(s)
    ws = []
    for k in range(top + 1):
        levels[k].sort()
        w = np.array([1.0 if merged[s] is None else merged[s] for s in levels[k]])
        ws.append(w)
    return SimplicialComplex(levels, ws)
