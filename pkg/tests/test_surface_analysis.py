"""Surface diagnostics: curvature spheres, special lifts, classification."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import generic_pipeline
from liesurf import (
    ChannelSurfaceError,
    analyze_surface,
    euclidean_frame,
)
from liesurf.analysis import (
    contact_lift_surface,
    curvature_sphere_fields,
    osculating_complexes,
    special_lifts,
    spherical_line_residual,
    surface_residuals,
)


@pytest.fixture(scope="module")
def torus_analysis(torus, frame):
    _, _, grid = torus
    pd, od, report = analyze_surface(grid, frame)
    return grid, pd, od, report


@pytest.fixture(scope="module")
def generic_analysis(generic_surface, frame):
    _, _, _, grid = generic_surface
    pd, od, report = analyze_surface(grid, frame)
    return grid, pd, od, report


def sphere_patch(n_u=24, n_v=36, radius=2.0):
    """Round sphere sampled away from the poles: every point is umbilic."""
    fr = euclidean_frame()
    u = np.linspace(0.3, np.pi - 0.3, n_u)
    v = np.linspace(0.0, 2.0 * np.pi, n_v, endpoint=False)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    nor = np.stack(
        [np.sin(uu) * np.cos(vv), np.sin(uu) * np.sin(vv), np.cos(uu)], axis=-1
    )
    return contact_lift_surface(radius * nor, nor, fr, u=u, v=v, closed_v=True)


def test_contact_lift_surface_validation(frame):
    pts = np.zeros((6, 6, 3))
    nor = np.zeros((6, 5, 3))
    with pytest.raises(ValueError, match="matching"):
        contact_lift_surface(pts, nor, frame)
    with pytest.raises(ValueError, match="degenerate sampling"):
        contact_lift_surface(np.zeros((3, 6, 3)), np.zeros((3, 6, 3)), frame)
    nor = np.zeros((6, 6, 3))
    nor[..., 0] = 2.0  # not unit length
    with pytest.raises(ValueError, match="unit"):
        contact_lift_surface(pts, nor, frame)


def test_torus_lift_residuals(torus):
    _, _, grid = torus
    res = surface_residuals(grid)
    assert res["isotropy"] <= 1e-7
    assert res["legendre"] <= 1e-6


def test_torus_curvature_spheres_constant_along_lines(torus_analysis):
    _, pd, _, _ = torus_analysis
    assert not pd.umbilic_mask.any()
    assert float(np.max(pd.residual1)) <= 1e-9
    assert float(np.max(pd.residual2)) <= 1e-9
    # each tube sphere is shared by a whole u-line, each swept sphere by a
    # whole v-line, so the fields are constant along their own directions
    assert np.abs(np.diff(pd.s1, axis=0)).max() <= 1e-12
    assert np.abs(np.diff(pd.s2, axis=1)).max() <= 1e-12


def test_torus_channel_routing(torus):
    _, _, grid = torus
    pd = curvature_sphere_fields(grid)
    # the raw coupling coefficients are undefined on a doubly channel grid
    assert pd.beta is None
    assert pd.channel_families == ()
    with pytest.raises(ValueError, match="channel surface"):
        special_lifts(pd)
    relaxed = special_lifts(pd, strict=False)
    assert relaxed.beta is not None
    assert relaxed.channel_families == (1, 2)


def test_torus_report(torus_analysis):
    _, pd, _, report = torus_analysis
    assert pd.channel_families == (1, 2)
    assert report.umbilic_fraction == 0.0
    fam1, fam2 = report.families
    assert fam1.method == "row-complement"
    assert fam2.method == "row-complement"
    assert fam1.spherical_max <= 1e-9
    assert fam1.monge_flag <= 1e-9
    assert fam1.orthogonal_flag <= 1e-9
    assert fam1.envelope_dim == 2
    assert fam2.envelope_dim == 3
    assert fam1.bundle_signature == (2, 0, 1)
    assert report.blaschke_case == "doubly planar"
    assert report.pde_residuals is None
    assert report.lie_applicable_one_family is True
    assert report.elastic_circular is True
    assert report.elastic_residual <= 1e-9
    text = report.to_text()
    assert "doubly planar" in text
    assert "family 1" in text


def test_torus_spherical_line_residual(torus_analysis):
    grid, pd, od, _ = torus_analysis
    assert float(np.max(spherical_line_residual(od, 1))) <= 1e-9
    with pytest.raises(ValueError, match="family must be 1 or 2"):
        spherical_line_residual(od, 3)
    with pytest.raises(ValueError, match="unknown method"):
        osculating_complexes(pd, grid, method="nope")


def test_generic_surface_report(generic_analysis):
    _, pd, _, report = generic_analysis
    assert pd.channel_families == ()
    assert report.umbilic_fraction <= 1e-2
    fam1 = report.families[0]
    assert fam1.spherical_max <= 1e-9
    assert fam1.envelope_dim == 4
    assert report.blaschke_case == "unclassified"
    assert report.lie_applicable_two_family is False
    assert report.envelope_dim == 4
    assert report.envelope_residual <= 1e-9
    # at grid step 1e-2 the fitted profile misses the strict gate by the
    # second-order estimator floor, so the verdict is an honest negative
    assert report.lie_applicable_one_family is False
    assert 1e-5 < report.elastic_residual < 1e-3
    nr = pd.normalization_residuals
    assert set(nr) == {"u", "v", "u_max", "v_max"}
    assert nr["u"] <= 0.05
    assert nr["v"] <= 0.05


def test_generic_surface_finer_step_passes_gate(frame):
    _, _, _, grid = generic_pipeline(n_u_step=0.005)
    _, _, report = analyze_surface(grid, frame)
    assert report.envelope_dim == 4
    assert report.elastic_residual <= 1e-4
    assert report.lie_applicable_one_family is True


def test_all_umbilic_sphere_rejected(frame):
    g = sphere_patch()
    with pytest.raises(ChannelSurfaceError, match="special lifts undefined") as exc:
        analyze_surface(g, frame)
    assert isinstance(exc.value, ValueError)
    assert exc.value.families == (1, 2)
    assert exc.value.umbilic is True


def test_misaligned_grid_rejected(frame):
    # torus sampled along sheared parameters: curvature lines cross the grid
    n = 48
    a = np.arange(n) * 2.0 * np.pi / n
    b = np.arange(n) * 2.0 * np.pi / n
    aa, bb = np.meshgrid(a, b, indexing="ij")
    aa = aa + 0.5 * bb
    pts = np.stack(
        [np.sin(aa), (2 + np.cos(aa)) * np.cos(bb), (2 + np.cos(aa)) * np.sin(bb)],
        axis=-1,
    )
    nor = np.stack(
        [np.sin(aa), np.cos(aa) * np.cos(bb), np.cos(aa) * np.sin(bb)], axis=-1
    )
    g = contact_lift_surface(pts, nor, frame, u=a, v=b, closed_u=True, closed_v=True)
    with pytest.raises(ValueError, match="reparametrize input"):
        curvature_sphere_fields(g)
