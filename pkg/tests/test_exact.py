import numpy as np
import pytest

from scsparse import fixtures
from scsparse.acceptance import shared_edge_pair
from scsparse.errors import NoSimplices, OrderOutOfRange, SizeGuard
from scsparse.exact import (
    alternating_rank,
    betti_numbers,
    ger_pinv,
    ger_svd,
    printed_l1_formula,
    r_l1_identity,
    weighted_boundary_dense,
)
from scsparse.experiments import vr_complex


@pytest.mark.parametrize("route", [ger_svd, ger_pinv])
@pytest.mark.parametrize(
    "make, want",
    [(fixtures.filled_triangle, [1.0]), (shared_edge_pair, [1.0, 1.0]), (fixtures.hollow_tetrahedron, [0.75] * 4)],
)
def test_closed_forms(route, make, want):
    np.testing.assert_allclose(route(make(), 1).values, want, atol=1e-10)


def test_routes_agree_with_numpy_pinv_weighted():
    # third, independent route: numpy's SVD-based pinv on the weighted operator
    c = vr_complex(20, 2.0, 5)
    w = np.random.default_rng(3).uniform(0.2, 3.0, c.m(2))
    c = c.with_level(2, c.level(2), w)
    BW = weighted_boundary_dense(c, 1)
    oracle = np.diag(BW.T @ np.linalg.pinv(BW @ BW.T, rcond=1e-10) @ BW)
    np.testing.assert_allclose(ger_svd(c, 1).values, oracle, atol=1e-9)
    np.testing.assert_allclose(ger_pinv(c, 1).values, oracle, atol=1e-9)


def test_resistances_in_unit_interval():
    r = ger_svd(vr_complex(24, 2.5, 1), 1).values
    assert np.all(r >= -1e-12) and np.all(r <= 1 + 1e-12)


def test_betti():
    assert betti_numbers(fixtures.hollow_triangle(), 1).betti == (1, 1)
    assert betti_numbers(fixtures.filled_triangle(), 1).betti == (1, 0)
    assert betti_numbers(fixtures.two_disjoint_edges(), 1).betti[0] == 2
    assert betti_numbers(fixtures.hollow_tetrahedron(), 2).betti == (1, 0, 1)


@pytest.mark.parametrize(
    "make, want",
    [(fixtures.filled_triangle, (1.0, 1, 1)), (fixtures.hollow_tetrahedron, (3.0, 3, 3)), (fixtures.figure_one, (2.0, 2, 2))],
)
def test_l1_identity(make, want):
    l1, rank, alt = r_l1_identity(make(), 1)
    assert l1 == pytest.approx(want[0], abs=1e-8)
    assert (rank, alt) == want[1:]


def test_printed_formula_disagrees_on_triangle():
    c = fixtures.filled_triangle()
    assert printed_l1_formula(c, 1) == -1
    assert alternating_rank(c, 1) == 1


def test_no_simplices_and_order_errors():
    with pytest.raises(NoSimplices):
        ger_svd(fixtures.hollow_triangle(), 1)
    with pytest.raises(OrderOutOfRange):
        ger_svd(fixtures.filled_triangle(), -1)


def test_size_guard(monkeypatch):
    import scsparse.exact as ex

    monkeypatch.setattr(ex, "DENSE_LIMIT", 50)
    with pytest.raises(SizeGuard):
        ex.ger_svd(vr_complex(20, 2.0, 3), 1)
