"""Complex families, group transport, and the surface sweep."""

import numpy as np
import pytest

from liesurf import (
    ComplexCurve,
    connection_form,
    evolve_surface,
    fit_constant_envelope,
    integrate_evolution,
    make_complex_curve,
    norm2,
    rotating_plane_complex,
    rotating_sphere_center_complex,
)
from liesurf.core import ortho_defect

from conftest import bending_complex, torus_pipeline


def closed_grid(n):
    return np.arange(n) * 2.0 * np.pi / n


def rotation_oracle(v):
    """Closed-form transport for the rotating-plane family: the inverse
    rotation in the e2-e3 block."""
    a = np.tile(np.eye(6), (v.size, 1, 1))
    a[:, 1, 1] = np.cos(v)
    a[:, 2, 2] = np.cos(v)
    a[:, 1, 2] = np.sin(v)
    a[:, 2, 1] = -np.sin(v)
    return a


def test_make_complex_curve_normalizes_and_fixes_sign():
    v = np.linspace(0.0, 1.0, 50)
    raw = np.zeros((50, 6))
    raw[:, 2] = 3.0
    raw[25:, 2] = -3.0  # sampling artifact: sign flip halfway
    cc = make_complex_curve(v, raw)
    assert np.allclose(norm2(cc.l), 1.0)
    assert np.allclose(cc.l[:, 2], 1.0)  # flipped back to a continuous branch


def test_make_complex_curve_rejects_bad_sections():
    v = np.linspace(0.0, 1.0, 10)
    null = np.zeros((10, 6))
    null[:, 3] = 1.0
    null[:, 4] = 1.0
    with pytest.raises(ValueError, match="spacelike"):
        make_complex_curve(v, null)
    open_run = np.zeros((10, 6))
    open_run[:, 1] = np.cos(v)
    open_run[:, 2] = np.sin(v)
    with pytest.raises(ValueError, match="close up"):
        make_complex_curve(v, open_run, closed=True)


def test_connection_form_requires_unit_sections():
    v = np.linspace(0.0, 1.0, 40)
    cc = rotating_plane_complex(v)
    forms = connection_form(cc)
    assert len(forms) == v.size
    # metric-skewness of each generator
    from liesurf import METRIC

    w = forms[7].matrix
    assert np.allclose(METRIC @ w, -(METRIC @ w).T, atol=1e-12)
    # non-unit sections are refused, uniformly scaled or not
    with pytest.raises(ValueError, match="non-unit"):
        connection_form(ComplexCurve(v=v, l=2.0 * cc.l, closed=False))
    bad = ComplexCurve(v=v, l=(1.0 + 0.5 * v)[:, None] * cc.l, closed=False)
    with pytest.raises(ValueError, match="non-unit"):
        connection_form(bad)


def test_transport_matches_rotation_oracle():
    v = closed_grid(500)
    emap = integrate_evolution(rotating_plane_complex(v, closed=True))
    assert np.abs(emap.mats - rotation_oracle(v)).max() <= 1e-7
    assert emap.ortho_defect <= 1e-10
    assert emap.monodromy_defect <= 1e-8
    assert emap.parallelism_defect() <= 1e-7
    inv = emap.inverse_mats()
    assert np.abs(inv @ emap.mats - np.eye(6)).max() <= 1e-9


def test_transport_validates_arguments():
    v = closed_grid(16)
    cc = rotating_plane_complex(v, closed=True)
    with pytest.raises(ValueError, match="v0_index"):
        integrate_evolution(cc, v0_index=16)
    with pytest.raises(ValueError, match="substeps"):
        integrate_evolution(cc, substeps=0)


def test_hyperbolic_family_keeps_relative_group_defect():
    v = np.linspace(0.0, 2.0 * np.pi, 400)
    emap = integrate_evolution(
        rotating_sphere_center_complex(v, 2.0, 1.0), substeps=4
    )
    growth = float(np.abs(emap.mats).max())
    assert growth > 1e3  # genuinely hyperbolic transport
    assert emap.ortho_defect <= 1e-9  # defect judged relative to growth^2
    worst = max(
        ortho_defect(m) / max(1.0, float(np.abs(m).max()) ** 2) for m in emap.mats
    )
    assert worst <= 1e-9


def test_sphere_center_complex_validation():
    v = closed_grid(32)
    with pytest.raises(ValueError, match="positive"):
        rotating_sphere_center_complex(v, 2.0, 0.0)


def test_evolve_surface_grid_contract(torus):
    curve, emap, grid = torus
    assert grid.shape == (60, 60)
    assert grid.closed_u and grid.closed_v
    assert grid.lifts.shape == (60, 60, 2, 6)
    assert grid.valid.all()
    assert (grid.regularity > 1e-6).all()
    # column at the starting index is the curve itself
    j0 = emap.v0_index
    assert np.abs(grid.lifts[:, j0] - curve.frames).max() <= 1e-12


def test_evolve_surface_rejects_foreign_curve(torus):
    curve, _, _ = torus
    v = np.linspace(0.0, 2.0 * np.pi, 200)
    emap = integrate_evolution(
        rotating_sphere_center_complex(v, 2.0, 1.0), substeps=4
    )
    with pytest.raises(ValueError, match="starting complex"):
        evolve_surface(emap, curve)


def test_evolve_surface_rejects_constant_complex(torus):
    curve, _, _ = torus
    v = np.linspace(0.0, 1.0, 30)
    still = np.zeros((30, 6))
    still[:, 2] = 1.0
    emap = integrate_evolution(ComplexCurve(v=v, l=still, closed=False))
    with pytest.raises(ValueError, match="no surface"):
        evolve_surface(emap, curve)


def test_constant_envelope_dimensions():
    four = fit_constant_envelope(bending_complex(n=240))
    assert four.dim == 4
    assert four.residual <= 1e-8
    assert four.w0 is not None and four.w0.dim == 3
    five = fit_constant_envelope(bending_complex(n=240, form_weight=0.1), rel_tol=1e-4)
    assert five.dim == 5
    plain = fit_constant_envelope(rotating_plane_complex(closed_grid(100), closed=True))
    assert plain.dim == 2
    with pytest.raises(ValueError, match=r"\(n, 6\)"):
        fit_constant_envelope(np.zeros((4, 5)))
