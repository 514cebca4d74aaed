"""Shared builders: soliton curve, torus pipeline, generic evolved surface."""

from __future__ import annotations

import numpy as np
import pytest

from liesurf import (
    ElasticaParams,
    contact_lift_curve,
    euclidean_frame,
    evolve_surface,
    integrate_evolution,
    integrate_frame,
    legendre_lift,
    make_complex_curve,
    rotating_plane_complex,
    solve_curvature,
)


def soliton_params(length=3.0, step=0.005, shift=0.3):
    """Curvature profile k(s) = 2 sech(s + shift)."""
    return ElasticaParams(
        chi=1.0,
        kappa=0.0,
        mu=-1.0,
        lam=0.0,
        k0=2.0 / np.cosh(shift),
        dk0=-2.0 * np.sinh(shift) / np.cosh(shift) ** 2,
        length=length,
        step=step,
    )


def soliton_curve(length=3.0, step=0.005, shift=0.3):
    params = soliton_params(length=length, step=step, shift=shift)
    sol = solve_curvature(params)
    geo = integrate_frame(params, sol.k)
    return params, sol, geo, legendre_lift(geo)


def bending_complex(n=240, v_end=1.2, form_weight=0.0):
    """Non-symmetric spacelike section family starting at the flat plane.

    A pure rotation of the plane plus low-order harmonics in two extra
    directions; an optional high-frequency space-form component pushes
    the family out of any four-dimensional envelope.
    """
    fr = euclidean_frame()
    v = np.linspace(0.0, v_end, n)
    raw = np.zeros((n, 6))
    raw[:, 1] = -np.sin(v)
    raw[:, 2] = np.cos(v)
    raw[:, 0] = 0.2 * np.sin(2.0 * v)
    raw += 0.3 * np.sin(3.0 * v)[:, None] * fr.origin
    if form_weight:
        raw += form_weight * np.sin(8.0 * v)[:, None] * fr.form_vector
    return make_complex_curve(v, raw)


def circle_front(n, radius=1.0, center=(0.0, 2.0)):
    """Closed planar front: circle of the given radius and center."""
    u = np.arange(n) * 2.0 * np.pi / n
    pts = np.stack(
        [center[0] + radius * np.sin(u), center[1] + radius * np.cos(u)], axis=1
    )
    nor = np.stack([np.sin(u), np.cos(u)], axis=1)
    return u, pts, nor


def torus_pipeline(n_u=60, n_v=60, substeps=4):
    """Unit circle about (0, 2, 0) swept through the rotating planes."""
    fr = euclidean_frame()
    _, pts, nor = circle_front(n_u)
    curve = contact_lift_curve(pts, nor, fr, closed=True)
    v = np.arange(n_v) * 2.0 * np.pi / n_v
    cc = rotating_plane_complex(v, closed=True)
    emap = integrate_evolution(cc, substeps=substeps)
    grid = evolve_surface(emap, curve)
    return curve, emap, grid


def generic_pipeline(n_u_step=0.01, n_v=120, substeps=2, form_weight=0.0):
    """Soliton profile swept through the bending complex family."""
    _, _, _, curve = soliton_curve(step=n_u_step)
    cc = bending_complex(n=n_v, form_weight=form_weight)
    emap = integrate_evolution(cc, substeps=substeps)
    grid = evolve_surface(emap, curve)
    return curve, cc, emap, grid


@pytest.fixture(scope="session")
def frame():
    return euclidean_frame()


@pytest.fixture(scope="session")
def soliton():
    return soliton_curve()


@pytest.fixture(scope="session")
def torus():
    return torus_pipeline()


@pytest.fixture(scope="session")
def generic_surface():
    return generic_pipeline()
