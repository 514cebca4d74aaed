"""Space-form symmetry breaking: point/sphere/plane lifts into the null cone.

A frame is a pair of vectors (point_complex, form_vector): points of the
space form are null lifts y with (y, form_vector) = -1 and
(y, point_complex) = 0, tangent planes have (y, point_complex) = -1 and
(y, form_vector) = 0.  Only the flat Euclidean model carries explicit lift
formulas here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import basis_vector, inner, norm2

_E4 = basis_vector(4)
_E5 = basis_vector(5)
_E6 = basis_vector(6)


@dataclass(frozen=True)
class SpaceFormFrame:
    """Breaking of the O(4,2) symmetry to a chosen space form.

    point_complex : timelike or spacelike vector singling out point spheres,
        chi = -(p, p).
    form_vector   : vector orthogonal to point_complex, kappa = -(q, q) is the
        sectional curvature of the resulting space form.
    origin        : null lift of a base point (Euclidean model only).
    """

    point_complex: np.ndarray
    form_vector: np.ndarray
    origin: np.ndarray | None = None

    @property
    def chi(self) -> float:
        return float(-norm2(self.point_complex))

    @property
    def kappa(self) -> float:
        return float(-norm2(self.form_vector))

    def is_euclidean(self, tol: float = 1e-12) -> bool:
        return (
            abs(self.chi - 1.0) <= tol
            and abs(self.kappa) <= tol
            and self.origin is not None
        )


def euclidean_frame() -> SpaceFormFrame:
    """Default flat frame: ambient R^3 is the span of e1, e2, e3."""
    return SpaceFormFrame(
        point_complex=_E6,
        form_vector=_E5 - _E4,
        origin=(_E4 + _E5) / 2.0,
    )


def _require_euclidean(frame: SpaceFormFrame):
    if not frame.is_euclidean():
        raise ValueError("unsupported frame: only the Euclidean model has lift formulas")


def _embed(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise ValueError("expected 3d ambient coordinates")
    out = np.zeros(x.shape[:-1] + (6,))
    out[..., :3] = x
    return out


def lift_point(frame: SpaceFormFrame, x) -> np.ndarray:
    """Null lift of the point x with (y, form_vector) = -1.

    Satisfies inner(lift(x), lift(y)) = -|x - y|^2 / 2, so incidence with
    sphere lifts reads off tangency.
    """
    _require_euclidean(frame)
    x = np.asarray(x, dtype=float)
    xx = (x * x).sum(axis=-1)[..., None]
    return frame.origin + _embed(x) + 0.5 * xx * frame.form_vector


def lift_sphere(frame: SpaceFormFrame, center, radius) -> np.ndarray:
    """Oriented sphere lift; the sign of radius fixes the orientation.

    radius > 0 gets a positive point_complex component.
    """
    _require_euclidean(frame)
    center = np.asarray(center, dtype=float)
    radius = np.asarray(radius, dtype=float)
    if np.any(radius == 0.0):
        raise ValueError("use lift_point for zero radius")
    cc = (center * center).sum(axis=-1)
    coeff = 0.5 * (cc - radius**2)
    return (
        frame.origin
        + _embed(center)
        + coeff[..., None] * frame.form_vector
        + radius[..., None] * frame.point_complex
    )


def lift_plane(frame: SpaceFormFrame, normal, offset) -> np.ndarray:
    """Lift of the oriented plane {x : normal . x = offset}, |normal| = 1."""
    _require_euclidean(frame)
    normal = np.asarray(normal, dtype=float)
    offset = np.asarray(offset, dtype=float)
    nn = (normal * normal).sum(axis=-1)
    if np.any(np.abs(nn - 1.0) > 1e-9):
        raise ValueError("plane normal must be a unit vector")
    return _embed(normal) + offset[..., None] * frame.form_vector + frame.point_complex


def project_point(frame: SpaceFormFrame, y, tol: float = 1e-8) -> np.ndarray:
    """Recover space-form coordinates from a point-sphere lift.

    Accepts any rescaling of a valid lift; rejects non-null input, lifts with
    a point_complex component, and points at infinity.
    """
    _require_euclidean(frame)
    y = np.asarray(y, dtype=float)
    scale = np.sqrt((y * y).sum(axis=-1))
    if np.any(scale == 0.0):
        raise ValueError("point at infinity")
    if np.any(np.abs(norm2(y)) > tol * scale**2):
        raise ValueError("not a null vector")
    if np.any(np.abs(inner(y, frame.point_complex)) > tol * scale):
        raise ValueError("not a point sphere")
    denom = -inner(y, frame.form_vector)
    if np.any(np.abs(denom) <= tol * scale):
        raise ValueError("point at infinity")
    return (y / denom[..., None])[..., :3]
