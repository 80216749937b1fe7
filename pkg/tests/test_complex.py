import numpy as np
import pytest

from scsparse import fixtures
from scsparse.complex import SimplicialComplex, assemble_complex, boundary_faces, canonical_simplex, simplex_index
from scsparse.errors import (
    ClosureViolation,
    ConflictingWeight,
    DuplicateVertex,
    EmptySimplex,
    NonpositiveWeight,
    NotFound,
    ValidationError,
)


def test_canonical_sorts():
    assert canonical_simplex([3, 1, 2]) == (1, 2, 3)
    assert canonical_simplex([5]) == (5,)


def test_canonical_rejects_bad_input():
    with pytest.raises(DuplicateVertex):
        canonical_simplex([1, 1, 2])
    with pytest.raises(EmptySimplex):
        canonical_simplex([])
    with pytest.raises(ValidationError):
        canonical_simplex([-1, 2])


@pytest.mark.parametrize(
    "s, want",
    [
        ((1, 2, 3), [((2, 3), 1), ((1, 3), -1), ((1, 2), 1)]),
        ((1, 3, 4), [((3, 4), 1), ((1, 4), -1), ((1, 3), 1)]),
        ((1, 2), [((2,), 1), ((1,), -1)]),
        ((7,), []),
    ],
)
def test_boundary_faces(s, want):
    assert boundary_faces(s) == want


def test_figure_one_counts_and_index():
    c = fixtures.figure_one()
    assert c.counts == (5, 7, 2)
    assert simplex_index(c, [1, 2]) == 0
    assert simplex_index(c, [4, 5]) == 6
    assert c.index((1, 3, 4)) == 1
    with pytest.raises(NotFound):
        simplex_index(c, [9, 10])
    with pytest.raises(KeyError):
        simplex_index(c, [9, 10])


def test_closure_violation_names_face():
    with pytest.raises(ClosureViolation, match=r"\[1, 3\]"):
        assemble_complex([[1], [2], [3], [1, 2], [2, 3], [1, 2, 3]], by_order=False)


def test_nodes_only():
    c = assemble_complex([[1], [2], [3]], by_order=False)
    assert c.counts == (3,)
    assert c.dim == 0


def test_per_order_input_detected():
    c = assemble_complex([[[1], [2]], [[1, 2]]])
    assert c.counts == (2, 1)


def test_duplicates_merge_and_conflicts_raise():
    c = assemble_complex([[1], [2], [2, 1], [1, 2]], by_order=False)
    assert c.counts == (2, 1)
    assemble_complex([[1], [2], [1, 2], [1, 2]], [1, 1, 2.0, 2.0], by_order=False)
    with pytest.raises(ConflictingWeight):
        assemble_complex([[1], [2], [1, 2], [2, 1]], [1, 1, 2.0, 3.0], by_order=False)


def test_weights_mapping_and_defaults():
    c = assemble_complex([[1], [2], [3], [1, 2], [2, 3]], {(2, 1): 4.0}, by_order=False)
    np.testing.assert_array_equal(c.weights(1), [4.0, 1.0])
    np.testing.assert_array_equal(c.sqrt_weights(1), [2.0, 1.0])
    assert not c.weights(1).flags.writeable


@pytest.mark.parametrize("w", [0.0, -1.0, float("nan")])
def test_nonpositive_weight(w):
    with pytest.raises(NonpositiveWeight):
        assemble_complex([[1], [2], [1, 2]], [1, 1, w], by_order=False)


def test_constructor_rejects_unsorted_levels():
    with pytest.raises(ValidationError):
        SimplicialComplex([[(2,), (1,)]])
    with pytest.raises(ValidationError):
        SimplicialComplex([[(1,), (2,)], [(2, 1)]])


def test_equality_hash_contains():
    a, b = fixtures.filled_triangle(), fixtures.filled_triangle()
    assert a == b and hash(a) == hash(b)
    assert (1, 2, 3) in a and (1, 4) not in a
    assert a != fixtures.hollow_triangle()


def test_with_level_and_truncated():
    c = fixtures.figure_one()
    t = c.truncated(1)
    assert t.counts == (5, 7)
    s = c.with_level(2, [(1, 2, 3)], [2.5])
    assert s.counts == (5, 7, 1)
    assert s.weights(2).tolist() == [2.5]
    assert c.with_level(2, [], []).dim == 1


def test_vertex_array_shape():
    c = fixtures.figure_one()
    arr = c.vertex_array(2)
    assert arr.shape == (2, 3)
    assert arr.tolist() == [[1, 2, 3], [1, 3, 4]]
