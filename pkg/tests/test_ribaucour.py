"""Channel Ribaucour partners: chart, evolution, verification."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import circle_front
from liesurf import contact_lift_curve
from liesurf.core import basis_vector, inner, norm2
from liesurf.curves import LegendreCurve
from liesurf.ribaucour import (
    channel_partner_chart,
    ribaucour_evolve,
    verify_ribaucour,
)
from liesurf.spaceforms import lift_point


@pytest.fixture(scope="module")
def torus_pair(torus):
    curve, emap, grid = torus
    l0 = emap.sections[emap.v0_index]
    c_hat = channel_partner_chart(l0, 0.5, 0.7, 4.0)
    pair = ribaucour_evolve(emap, curve, c_hat=c_hat)
    return curve, emap, grid, c_hat, pair


def test_chart_produces_complex_members():
    # reference position: the starting line is already the third axis
    c = channel_partner_chart(basis_vector(3), 0.5, 0.7, 4.0)
    assert abs(norm2(c)) <= 1e-12
    assert abs(inner(c, basis_vector(3))) <= 1e-12
    # generic position: reflected onto another spacelike line
    c = channel_partner_chart(basis_vector(2), 1.0, -0.5, 2.0)
    assert abs(norm2(c)) <= 1e-12
    assert abs(inner(c, basis_vector(2))) <= 1e-12
    # grazing position: the difference from the third axis is lightlike
    graze = basis_vector(3) + (basis_vector(5) - basis_vector(4))
    c = channel_partner_chart(graze, 0.3, 0.2, 1.5)
    assert abs(norm2(c)) <= 1e-12
    assert abs(inner(c, graze)) <= 1e-10


def test_chart_validation(frame):
    with pytest.raises(ValueError, match="spacelike"):
        channel_partner_chart(frame.form_vector, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError, match="chart boundary: zero radius"):
        channel_partner_chart(basis_vector(3), 0.0, 0.0, 0.0)


def test_tangential_seeds_rejected(torus):
    # spheres centered at the origin touch the seed circle at radius 1
    # (inner tangency) and -3 (outer, opposite orientation); the other
    # two orientations are transversal and give valid partners
    curve, emap, _ = torus
    l0 = emap.sections[emap.v0_index]
    for r in (1.0, -3.0):
        c_hat = channel_partner_chart(l0, 0.0, 0.0, r)
        with pytest.raises(ValueError, match="tangential choice"):
            ribaucour_evolve(emap, curve, c_hat=c_hat)
    for r in (-1.0, 3.0):
        c_hat = channel_partner_chart(l0, 0.0, 0.0, r)
        ribaucour_evolve(emap, curve, c_hat=c_hat)


def test_seed_selection_validation(torus, frame):
    curve, emap, _ = torus
    l0 = emap.sections[emap.v0_index]
    c_hat = channel_partner_chart(l0, 0.5, 0.7, 4.0)
    with pytest.raises(ValueError, match="exactly one"):
        ribaucour_evolve(emap, curve)
    with pytest.raises(ValueError, match="exactly one"):
        ribaucour_evolve(emap, curve, c_hat=c_hat, partner_curve=curve)
    # spacelike seed: not a sphere of the pencil
    with pytest.raises(ValueError, match="complex membership violated"):
        ribaucour_evolve(emap, curve, c_hat=l0)
    # null seed outside the starting complex
    bad = lift_point(frame, (0.0, 0.0, 1.0))
    with pytest.raises(ValueError, match="complex membership violated"):
        ribaucour_evolve(emap, curve, c_hat=bad)


def test_partner_curve_validation(torus, frame):
    curve, emap, _ = torus
    with pytest.raises(ValueError, match="curves coincide"):
        ribaucour_evolve(emap, curve, partner_curve=curve)
    _, pts, nor = circle_front(curve.n, radius=0.7, center=(0.3, 1.2))
    other = contact_lift_curve(pts, nor, frame, closed=True)
    with pytest.raises(ValueError, match="share no sphere"):
        ribaucour_evolve(emap, curve, partner_curve=other)


def test_channel_pair_structure(torus_pair):
    curve, emap, grid, c_hat, pair = torus_pair
    # the first surface of the pair is the plain evolution of the seed
    assert np.array_equal(pair.f.lifts, grid.lifts)
    assert pair.s0.shape == (curve.n, emap.sections.shape[0], 6)
    # the congruence restricted to the start column is the seed pencil
    assert np.abs(pair.s0[:, emap.v0_index] - pair.seed_curve).max() <= 1e-12
    assert pair.seed_sphere is c_hat
    # every congruence sphere stays in the moving complex, up to the
    # accumulated fourth-order transport error of the evolution
    sec = emap.sections
    drift = np.abs(np.einsum("uvi,vi->uv", pair.s0, np.asarray(
        [np.diag([1, 1, 1, 1, -1, -1]) @ s for s in sec])))
    assert drift.max() <= 1e-7


def test_verify_channel_pair(torus_pair):
    _, _, _, _, pair = torus_pair
    report = verify_ribaucour(pair)
    assert report.incidence <= 1e-12
    assert report.first_angle <= 1e-6
    assert report.margin >= 0.5
    assert set(report.correspondence) == {"f_u", "f_v", "partner_u", "partner_v"}
    assert max(report.correspondence.values()) <= 1e-12
    assert report.proper is True
    assert report.note == ""
    text = report.to_text()
    assert "proper Ribaucour pair" in text
    assert "rank-1 margin" in text


def test_partner_curve_branch_matches_channel_branch(torus_pair):
    curve, emap, _, c_hat, pair = torus_pair
    hat_unit = c_hat / np.linalg.norm(c_hat)
    frames = np.stack(
        [np.broadcast_to(hat_unit, (curve.n, 6)).copy(), pair.seed_curve], axis=1
    )
    partner = LegendreCurve(
        u=curve.u.copy(),
        frames=frames,
        ambient_line=curve.ambient_line.copy(),
        closed=True,
    )
    pair2 = ribaucour_evolve(emap, curve, partner_curve=partner)
    assert pair2.seed_sphere is None
    # same congruence up to the per-line sign freedom
    assert np.abs(np.abs(pair2.s0) - np.abs(pair.s0)).max() <= 1e-12


def test_verify_flags_coincident_elements(torus_pair):
    # degrade the pair by replacing the partner with the surface itself:
    # the contact elements then coincide and the margin collapses
    from dataclasses import replace

    _, _, _, _, pair = torus_pair
    fake = replace(pair, f_hat=pair.f)
    report = verify_ribaucour(fake)
    assert report.proper is False
    assert report.margin <= 1e-6
    assert "rank-2" in report.note
