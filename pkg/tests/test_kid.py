import math

import numpy as np
import pytest

from scsparse import fixtures
from scsparse.errors import DimensionMismatch, NoSimplices, ValidationError
from scsparse.exact import ger_svd
from scsparse.experiments import exact_measure, sup_error, vr_complex
from scsparse.hodge import ScaledOperator, UpDownOperator, estimate_lambda_max
from scsparse.kid import (
    KidConfig,
    MomentMatrix,
    chebyshev_half_integrals,
    default_parameters,
    integrate_moments,
    integrate_moments_histogram,
    jackson_coefficients,
    kid_moments,
    kid_resistance,
    kid_run,
    make_rademacher,
    theoretical_parameters,
)
from scsparse.metrics import dense_down_laplacian


def test_default_parameters():
    p = default_parameters(100, 300, 0.1)
    assert (p.M, p.N_z) == (30, 73)
    assert math.ceil(0.1 * 8 / math.pi**2 * 900) == 73
    p = default_parameters(100, 300, 1.0)
    assert (p.M, p.N_z) == (3, 1)


def test_density_condition_reported():
    assert default_parameters(100, 300, 0.1, m_km1=40, beta_k=5).dense_enough
    assert not default_parameters(100, 300, 0.1, m_km1=60, beta_k=5).dense_enough


def test_theoretical_parameters():
    p = theoretical_parameters(100, 300, 0.1, lipschitz=1.0, mollifier_sup=1.0)
    assert p.M == 720
    assert p.N_z == math.ceil(8 / math.pi**2 * 900)


def test_config_validation():
    with pytest.raises(ValidationError):
        KidConfig(delta=0)
    with pytest.raises(ValidationError):
        KidConfig(M=0)
    with pytest.raises(ValidationError):
        KidConfig(damping="lorentz")


def test_rademacher():
    a, b = make_rademacher(50, 8, 3), make_rademacher(50, 8, 3)
    np.testing.assert_array_equal(a.Z, b.Z)
    assert set(np.unique(a.Z)) == {-1.0, 1.0}
    # growing N_z keeps the leading columns
    np.testing.assert_array_equal(make_rademacher(50, 12, 3).Z[:, :8], a.Z)
    assert not np.array_equal(make_rademacher(50, 8, 4).Z, a.Z)


def test_moments_scalar_case():
    Z = make_rademacher(1, 5, 0)
    D = kid_moments(np.array([[1.0]]), Z, 9)
    np.testing.assert_array_equal(D.values, np.ones((5, 1)))
    np.testing.assert_array_equal(D.orders, [1, 3, 5, 7, 9])
    np.testing.assert_array_equal(D.row(4), [0.0])


def test_moments_zero_operator():
    D = kid_moments(np.zeros((4, 4)), make_rademacher(4, 3, 0), 7)
    np.testing.assert_array_equal(D.values, 0.0)


def test_moments_count_one_application_per_step():
    c = vr_complex(16, 2.0, 0)
    op = UpDownOperator.from_complex(c, 1)
    H = ScaledOperator(op, estimate_lambda_max(op).scale)
    op.applications = 0
    kid_moments(H, make_rademacher(c.m(2), 4, 0), 11)
    assert op.applications == 11 * 4


def test_moments_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        kid_moments(np.eye(3), make_rademacher(4, 2, 0), 3)


def test_moments_converge_to_exact_diagonal():
    """20-triangle VR complex, N_z = 1e4: estimates within 0.05 of diag T_m(H)."""
    c = vr_complex(10, 2.8, 3)
    assert c.m(2) == 20
    op = UpDownOperator.from_complex(c, 1)
    H = dense_down_laplacian(c, 1) / estimate_lambda_max(op).scale
    lam, Q = np.linalg.eigh(H)
    D = kid_moments(H, make_rademacher(c.m(2), 10_000, 0), 15)
    exact = np.cos(D.orders[:, None] * np.arccos(lam)[None, :]) @ (Q**2).T
    assert np.max(np.abs(D.values - exact)) <= 0.05


def test_half_integrals():
    np.testing.assert_allclose(chebyshev_half_integrals([1, 2, 3, 5]), [2 / np.pi, 0, -2 / (3 * np.pi), 2 / (5 * np.pi)])


def test_half_integral_quadrature():
    from scipy.integrate import quad

    for m in (1, 3, 5, 7, 9):
        # substitute x = cos(t): int_0^{pi/2} cos(m t) 2/pi dt
        num, _ = quad(lambda t: np.cos(m * t) * 2 / np.pi, 0, np.pi / 2)
        assert chebyshev_half_integrals([m])[0] == pytest.approx(num, abs=1e-12)


def test_integrate_triangle_leibniz():
    D = MomentMatrix(np.ones((100, 1)), 199)
    r = integrate_moments(D).values[0]
    leibniz = 4 / np.pi * sum((-1) ** j / (2 * j + 1) for j in range(100))
    assert r == pytest.approx(leibniz, rel=1e-12)
    assert abs(r - 1) <= 4 / (np.pi * 201)


def test_integrate_zero_and_clamp():
    assert np.all(integrate_moments(MomentMatrix(np.zeros((3, 4)), 5)).values == 0)
    neg = MomentMatrix(-np.ones((1, 2)), 1)
    assert np.all(integrate_moments(neg).values == 0)
    assert np.all(integrate_moments(neg, clamp=False).values < 0)


def test_histogram_cross_check_close_to_closed_form():
    # exact moments of a real complex; the binned route only drops the bin at 0
    c = vr_complex(20, 2.0, 1)
    op = UpDownOperator.from_complex(c, 1)
    lam, Q = np.linalg.eigh(dense_down_laplacian(c, 1) / estimate_lambda_max(op).scale)
    orders = np.arange(1, 52, 2)
    D = MomentMatrix(np.cos(orders[:, None] * np.arccos(lam)[None, :]) @ (Q**2).T, 51)
    a = integrate_moments(D).values
    b = integrate_moments_histogram(D, bins=256).values
    assert np.max(np.abs(a - b)) < 0.02
    assert np.max(np.abs(a - ger_svd(c, 1).values)) < 0.1


def test_jackson_damping():
    g = jackson_coefficients(np.arange(0, 20), 19)
    assert g[0] == pytest.approx(1.0)
    assert np.all(np.diff(g) <= 1e-12)


def test_triangle_measure_is_one():
    for delta in (0.1, 0.5, 1.0):
        r, p = kid_resistance(fixtures.filled_triangle(), 1, KidConfig(delta=delta))
        assert p.probs.tolist() == [1.0]


def test_kid_deterministic():
    c = vr_complex(20, 2.0, 1)
    a = kid_run(c, 1, KidConfig(seed=3)).measure.probs
    b = kid_run(c, 1, KidConfig(seed=3)).measure.probs
    np.testing.assert_array_equal(a, b)


def test_kid_no_simplices():
    with pytest.raises(NoSimplices):
        kid_run(fixtures.hollow_triangle(), 1)


def test_kid_recovers_exact_with_many_probes():
    c = vr_complex(20, 2.0, 1)
    r_exact = ger_svd(c, 1).values
    r_hat = kid_run(c, 1, KidConfig(M=201, N_z=4000, seed=0)).resistance.values
    assert np.max(np.abs(r_hat - r_exact)) < 0.05


def test_kid_error_decreases_with_probes():
    c = vr_complex(20, 2.0, 1)
    p = exact_measure(c, 1)
    few = np.mean([sup_error(p, kid_run(c, 1, KidConfig(M=41, N_z=10, seed=s)).measure) for s in range(5)])
    many = np.mean([sup_error(p, kid_run(c, 1, KidConfig(M=41, N_z=1000, seed=s)).measure) for s in range(5)])
    assert many < few / 3


def test_kid_target_on_small_vr_majority():
    """m0 = 40, eps = 1.5, delta = 0.1, default parameters: error <= 0.1/m2 on most seeds."""
    c = vr_complex(40, 1.5, 0)
    p = exact_measure(c, 1)
    tol = 0.1 / c.m(2)
    hits = sum(sup_error(p, kid_run(c, 1, KidConfig(delta=0.1, seed=s)).measure) <= tol for s in range(10))
    assert hits >= 6
