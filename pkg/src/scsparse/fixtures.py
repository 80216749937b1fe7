"""Small named complexes with hand-checkable spectra."""

from itertools import combinations

from .complex import SimplicialComplex, assemble_complex


def filled_triangle() -> SimplicialComplex:
    return assemble_complex([[1], [2], [3], [1, 2], [1, 3], [2, 3], [1, 2, 3]], by_order=False)


def hollow_triangle() -> SimplicialComplex:
    return assemble_complex([[1], [2], [3], [1, 2], [1, 3], [2, 3]], by_order=False)


def figure_one() -> SimplicialComplex:
    """Five nodes, seven edges, triangles [1,2,3] and [1,3,4]."""
    edges = [[1, 2], [1, 3], [1, 4], [2, 3], [3, 4], [3, 5], [4, 5]]
    return assemble_complex([[[v] for v in range(1, 6)], edges, [[1, 2, 3], [1, 3, 4]]], by_order=True)


def hollow_tetrahedron() -> SimplicialComplex:
    verts = [1, 2, 3, 4]
    simplices = [list(s) for n in (1, 2, 3) for s in combinations(verts, n)]
    return assemble_complex(simplices, by_order=False)


def two_disjoint_edges() -> SimplicialComplex:
    return assemble_complex([[1], [2], [3], [4], [1, 2], [3, 4]], by_order=False)
