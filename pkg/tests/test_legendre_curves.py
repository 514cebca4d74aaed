"""Contact lifts of planar fronts and their extracted geometry."""

import numpy as np
import pytest

from liesurf import (
    LegendreCurve,
    contact_lift_curve,
    curve_geometry,
    curve_residuals,
    detect_constrained_elastic,
    elastic_complex_vector,
    euclidean_frame,
    geometry_residuals,
    inner,
    verify_linear_conserved,
)

from conftest import circle_front

FR = euclidean_frame()


def test_legendre_curve_shape_validation():
    with pytest.raises(ValueError, match="shape"):
        LegendreCurve(u=np.zeros(3), frames=np.zeros((3, 6)), ambient_line=np.zeros(6))
    with pytest.raises(ValueError, match="disagree"):
        LegendreCurve(u=np.zeros(4), frames=np.zeros((3, 2, 6)), ambient_line=np.zeros(6))


def test_contact_lift_input_validation():
    _, pts, nor = circle_front(50)
    with pytest.raises(ValueError, match="matching"):
        contact_lift_curve(pts, nor[:, :1], FR)
    with pytest.raises(ValueError, match="degenerate sampling"):
        contact_lift_curve(pts[:4], nor[:4], FR)
    with pytest.raises(ValueError, match="unit"):
        contact_lift_curve(pts, 2.0 * nor, FR)


def test_circle_lift_satisfies_contact_conditions():
    _, pts, nor = circle_front(200)
    curve = contact_lift_curve(pts, nor, FR, closed=True)
    assert curve.closed
    assert curve.n == 200
    res = curve_residuals(curve)
    assert res["isotropy"] <= 1e-12
    assert res["ambient"] <= 1e-12
    assert res["legendre"] <= 1e-5


def test_circle_geometry_recovers_curvature():
    _, pts, nor = circle_front(400, radius=0.5, center=(1.0, 2.0))
    curve = contact_lift_curve(pts, nor, FR, closed=True)
    g = curve_geometry(curve, FR)
    assert geometry_residuals(g) <= 1e-10
    # outward-oriented unit-speed circle of radius 0.5 has |k| = 2
    assert np.allclose(np.abs(g.k), 2.0, atol=1e-3)
    assert np.allclose(np.diff(g.s), g.speed[:-1] * np.diff(g.u), rtol=1e-2)


def test_circle_detected_as_circular_elastic():
    _, pts, nor = circle_front(300)
    curve = contact_lift_curve(pts, nor, FR, closed=True)
    fit = detect_constrained_elastic(curve_geometry(curve, FR), FR)
    assert fit.circular
    assert fit.is_elastic
    assert fit.complex_residual <= 1e-6


def test_soliton_profile_is_detected_with_multipliers(soliton):
    _, sol, geo, curve = soliton
    res = curve_residuals(curve)
    assert res["isotropy"] <= 1e-10
    # central-difference estimator floor is O(step^2)
    assert res["legendre"] <= 1e-4
    fit = detect_constrained_elastic(geo, FR)
    assert not fit.circular
    assert fit.is_elastic
    assert abs(fit.mu - (-1.0)) <= 1e-3
    assert abs(fit.lam) <= 1e-3
    assert fit.residual <= 1e-4


def test_conserved_vector_template_matches_fit(soliton):
    _, _, geo, _ = soliton
    fit = detect_constrained_elastic(geo, FR)
    r = elastic_complex_vector(geo, fit.mu, fit.lam, FR)
    drift = np.linalg.norm(r - r.mean(axis=0), axis=1).max()
    assert drift <= 1e-4 * np.linalg.norm(r.mean(axis=0))
    checks = verify_linear_conserved(geo, fit.r_vec)
    assert checks["res0"] <= 1e-10  # constant input stays constant
    assert checks["res1"] <= 1e-2
    assert checks["res2"] <= 1e-4  # same O(step^2) estimator floor


def test_geometry_normalizations_pin_contractions(soliton):
    _, _, geo, _ = soliton
    assert np.allclose(inner(geo.point_lift, FR.form_vector), -1.0, atol=1e-12)
    assert np.allclose(inner(geo.point_lift, FR.point_complex), 0.0, atol=1e-12)
    assert np.allclose(inner(geo.plane_lift, FR.form_vector), 0.0, atol=1e-9)
    assert np.allclose(inner(geo.plane_lift, FR.point_complex), -1.0, atol=1e-9)


def test_geometry_rejects_tangential_curve():
    # a curve of plane-like elements only: rows both orthogonal to the
    # point complex, so the 2x2 normalization is singular
    n = 32
    u = np.linspace(0.0, 1.0, n)
    r1 = np.tile(FR.form_vector, (n, 1))
    r2 = np.zeros((n, 6))
    r2[:, 0] = 1.0
    r2 += FR.form_vector * 0.1
    curve = LegendreCurve(u=u, frames=np.stack([r1, r2], axis=1),
                          ambient_line=np.zeros(6))
    with pytest.raises(ValueError, match="transversal"):
        curve_geometry(curve, FR)
