"""Evolving a Legendre curve through a one-parameter family of complexes.

A family of unit spacelike vectors l(v) determines a connection
N(v) = l wedge l_v and a transport A(v) solving A' = -A N, A(v0) = id.
Applying the inverse maps to a curve lying in the starting complex sweeps
out a Legendre surface whose v-lines stay inside the moving complex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .core import (
    DIM,
    METRIC,
    SIGNS,
    Bivector,
    Subspace,
    bivector_matrix,
    inner,
    ortho_defect,
    project_to_orthogonal,
    span_subspace,
    subspace_signature,
)
from .curves import LegendreCurve
from .numdiff import central_diff, uniform_step


@dataclass
class ComplexCurve:
    """Sampled family v -> l(v) of unit spacelike complex vectors.

    Closed families are stored endpoint-exclusive; the period is
    n * step and the section must return to itself (not its negative).
    """

    v: np.ndarray
    l: np.ndarray
    closed: bool = False

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.l = np.asarray(self.l, dtype=float)
        if self.v.ndim != 1 or self.l.shape != (self.v.size, DIM):
            raise ValueError("complex sections must be an (n, 6) array over the grid")


def make_complex_curve(v, sections, closed: bool = False) -> ComplexCurve:
    """Normalize raw sections to unit spacelike vectors with continuous sign."""
    v = np.asarray(v, dtype=float)
    sections = np.array(sections, dtype=float)
    nn = inner(sections, sections)
    if np.any(nn <= 0.0):
        raise ValueError("complex sections must be spacelike")
    sections /= np.sqrt(nn)[:, None]
    for i in range(1, sections.shape[0]):
        if sections[i] @ sections[i - 1] < 0.0:
            sections[i] = -sections[i]
    if closed and np.linalg.norm(sections[0] - sections[-1]) > 0.5:
        raise ValueError("complex curve does not close up")
    return ComplexCurve(v=v, l=sections, closed=closed)


def rotating_plane_complex(v, closed: bool = False) -> ComplexCurve:
    """Planes through a fixed axis: l(v) = -sin(v) e2 + cos(v) e3."""
    v = np.asarray(v, dtype=float)
    l = np.zeros((v.size, DIM))
    l[:, 1] = -np.sin(v)
    l[:, 2] = np.cos(v)
    return ComplexCurve(v=v, l=l, closed=closed)


def rotating_sphere_center_complex(
    v,
    ring_radius: float,
    sphere_radius: float,
    closed: bool = False,
) -> ComplexCurve:
    """Complexes of spheres meeting a moving sphere at right angles.

    The moving sphere has fixed radius and center tracing the circle of
    the given radius in the x2-x3 plane.  Its orthogonality complex is
    the spacelike vector o + m(v) + (|m|^2 - R^2)/2 q of square norm R^2.
    """
    from .spaceforms import euclidean_frame

    if sphere_radius <= 0.0:
        raise ValueError("sphere radius must be positive")
    v = np.asarray(v, dtype=float)
    fr = euclidean_frame()
    m = np.zeros((v.size, 3))
    m[:, 1] = ring_radius * np.cos(v)
    m[:, 2] = ring_radius * np.sin(v)
    coef = 0.5 * (np.sum(m * m, axis=1) - sphere_radius**2)
    l = fr.origin + np.pad(m, ((0, 0), (0, 3))) + coef[:, None] * fr.form_vector
    return make_complex_curve(v, l, closed=closed)


def connection_form(cc: ComplexCurve, unit_tol: float = 1e-6) -> list[Bivector]:
    """Per-sample connection l wedge l_v from central differences.

    The wedge encodes the motion of the complex; it is metric-skew by
    construction.  The splitting assumes unit sections, so non-unit
    families are rejected; the finite-difference derivative is projected
    onto the section's orthogonal complement, where it lives exactly.
    """
    if float(np.abs(inner(cc.l, cc.l) - 1.0).max()) > unit_tol:
        raise ValueError("non-unit section")
    h = uniform_step(cc.v)
    dl = central_diff(cc.l, h, closed=cc.closed)
    dl = dl - inner(cc.l, dl)[:, None] * cc.l
    return [Bivector(a=a, b=b) for a, b in zip(cc.l, dl)]


def _section_spline(cc: ComplexCurve):
    if cc.closed:
        h = uniform_step(cc.v)
        vv = np.append(cc.v, cc.v[-1] + h)
        ll = np.vstack([cc.l, cc.l[:1]])
        return CubicSpline(vv, ll, axis=0, bc_type="periodic")
    return CubicSpline(cc.v, cc.l, axis=0)


@dataclass
class EvolutionMap:
    """Transport matrices A(v_j) over the sample grid, A(v0) = id."""

    v: np.ndarray
    mats: np.ndarray
    v0_index: int
    closed: bool
    sections: np.ndarray
    dsections: np.ndarray
    ortho_defect: float
    monodromy_defect: float | None = None

    def inverse_mats(self) -> np.ndarray:
        """Group inverses G A^T G, batched."""
        return METRIC @ self.mats.transpose(0, 2, 1) @ METRIC

    def parallelism_defect(self) -> float:
        """max_v |A(v) l(v) - l(v0)|; vanishes for exact transport."""
        carried = np.einsum("nij,nj->ni", self.mats, self.sections)
        return float(
            np.linalg.norm(carried - self.sections[self.v0_index], axis=1).max()
        )


def integrate_evolution(
    cc: ComplexCurve,
    v0_index: int = 0,
    substeps: int = 1,
    renorm_every: int = 50,
) -> EvolutionMap:
    """March A' = -A (l wedge l_v) across the grid with classical RK4.

    Stage values of the section come from a cubic spline (periodic for
    closed families), renormalized to unit length with the derivative
    projected back onto the section's orthogonal complement.  Every
    `renorm_every` substeps the matrix is pulled back onto the group.
    """
    n = cc.v.size
    if not 0 <= v0_index < n:
        raise ValueError("v0_index outside the sample grid")
    if substeps < 1:
        raise ValueError("substeps must be positive")
    h = uniform_step(cc.v)
    spl = _section_spline(cc)
    dspl = spl.derivative()
    period = n * h

    def omega(t):
        raw = np.asarray(spl(t))
        norm2 = inner(raw, raw)
        if norm2 <= 0.0:
            raise ValueError("complex sections must be spacelike")
        unit = raw / np.sqrt(norm2)
        dunit = np.asarray(dspl(t)) / np.sqrt(norm2)
        dunit = dunit - inner(unit, dunit) * unit
        return bivector_matrix(unit, dunit)

    count = 0

    def advance(a, t0, t1):
        nonlocal count
        dt = (t1 - t0) / substeps
        for i in range(substeps):
            t = t0 + i * dt
            k1 = -(a @ omega(t))
            k2 = -((a + 0.5 * dt * k1) @ omega(t + 0.5 * dt))
            k3 = -((a + 0.5 * dt * k2) @ omega(t + 0.5 * dt))
            k4 = -((a + dt * k3) @ omega(t + dt))
            a = a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            count += 1
            if count % renorm_every == 0:
                a = project_to_orthogonal(a)
        return a

    mats = np.empty((n, DIM, DIM))
    mats[v0_index] = np.eye(DIM)
    monodromy = None
    if cc.closed:
        a = np.eye(DIM)
        t = cc.v[v0_index]
        for j in range(1, n + 1):
            a = advance(a, t, t + h)
            t += h
            if j < n:
                mats[(v0_index + j) % n] = a
            else:
                monodromy = float(np.abs(a - np.eye(DIM)).max())
    else:
        a = np.eye(DIM)
        for j in range(v0_index + 1, n):
            a = advance(a, cc.v[j - 1], cc.v[j])
            mats[j] = a
        a = np.eye(DIM)
        for j in range(v0_index - 1, -1, -1):
            a = advance(a, cc.v[j + 1], cc.v[j])
            mats[j] = a

    # node values of the unit section and its derivative, for downstream use
    raw = np.asarray(spl(cc.v))
    scale = np.sqrt(inner(raw, raw))[:, None]
    sections = raw / scale
    dsec = np.asarray(dspl(cc.v)) / scale
    dsec = dsec - inner(sections, dsec)[:, None] * sections

    # the defect's floating-point floor is eps |A|^2, so judge it relative
    # to that scale: hyperbolic families legitimately reach |A| ~ 1e4
    def relative_defect(m: np.ndarray) -> float:
        return float(ortho_defect(m)) / max(1.0, float(np.abs(m).max()) ** 2)

    defect = max(relative_defect(m) for m in mats)
    if monodromy is not None:
        defect = max(defect, relative_defect(a))
    if defect > 1e-6:
        raise ValueError("integration lost the group")
    return EvolutionMap(
        v=cc.v.copy(),
        mats=mats,
        v0_index=v0_index,
        closed=cc.closed,
        sections=sections,
        dsections=dsec,
        ortho_defect=defect,
        monodromy_defect=monodromy,
    )


@dataclass
class SurfaceGrid:
    """Legendre surface as contact-element lifts over a (u, v) grid.

    lifts[i, j] holds the two frame rows of the contact element at
    (u[i], v[j]).  regularity is the transverse-motion margin of the
    v-direction; points at or below reg_tol are masked invalid.
    """

    u: np.ndarray
    v: np.ndarray
    lifts: np.ndarray
    closed_u: bool
    closed_v: bool
    regularity: np.ndarray
    valid: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.lifts.shape[0], self.lifts.shape[1]


def evolve_surface(
    emap: EvolutionMap,
    curve: LegendreCurve,
    contact_tol: float = 1e-8,
    reg_tol: float = 1e-6,
) -> SurfaceGrid:
    """Sweep f(u, v) = A(v)^{-1} C(u) over the evolution grid.

    The curve must lie in the starting complex: (rho_a(u), l(v0)) = 0.
    """
    l0 = emap.sections[emap.v0_index]
    rows = curve.frames
    scale = np.linalg.norm(rows, axis=-1) * np.linalg.norm(l0)
    defect = np.abs(inner(rows, l0)) / np.where(scale > 0.0, scale, 1.0)
    if defect.max() > contact_tol:
        raise ValueError("curve does not lie in the starting complex")

    inv = emap.inverse_mats()
    lifts = np.einsum("vij,uaj->uvai", inv, rows)

    # transverse speed: d_v f = -(A l_v, rho) l, measured against the
    # Euclidean-orthonormalized contact frame so the margin is scale-free
    alv = np.einsum("vij,vj->vi", emap.mats, emap.dsections)
    q1 = rows[:, 0] / np.linalg.norm(rows[:, 0], axis=-1, keepdims=True)
    r2 = rows[:, 1] - (np.sum(q1 * rows[:, 1], axis=-1, keepdims=True)) * q1
    q2 = r2 / np.linalg.norm(r2, axis=-1, keepdims=True)
    c1 = inner(q1[:, None, :], alv[None, :, :])
    c2 = inner(q2[:, None, :], alv[None, :, :])
    reg = np.hypot(c1, c2)
    if not np.any(reg > reg_tol):
        raise ValueError("degenerate evolution: no surface")
    return SurfaceGrid(
        u=curve.u.copy(),
        v=emap.v.copy(),
        lifts=lifts,
        closed_u=curve.closed,
        closed_v=emap.closed,
        regularity=reg,
        valid=reg > reg_tol,
    )


@dataclass
class EnvelopeFit:
    """Smallest constant subspace containing a family of complex vectors."""

    subspace: Subspace
    signature: tuple[int, int, int]
    residual: float
    singular_values: np.ndarray
    w0: Subspace | None = None

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def no_constant_envelope(self) -> bool:
        return self.dim >= DIM


def fit_constant_envelope(cc, rel_tol: float = 1e-6, v0_index: int = 0) -> EnvelopeFit:
    """Numerical span of sampled complex vectors, with its signature.

    A family staying inside a 4-dimensional subspace belongs to a
    surface carrying a distinguished conserved structure along its
    spherical family; the residual is the relative weight of the first
    discarded singular direction.  When dim <= 4, w0 is the part of the
    envelope orthogonal to the starting section.
    """
    if isinstance(cc, ComplexCurve):
        sections = cc.l
    else:
        sections = np.asarray(cc, dtype=float)
    if sections.ndim != 2 or sections.shape[1] != DIM:
        raise ValueError("complex sections must be an (n, 6) array over the grid")
    _, s, vt = np.linalg.svd(sections, full_matrices=False)
    if s[0] == 0.0:
        raise ValueError("empty subspace")
    dim = int(np.sum(s > rel_tol * s[0]))
    basis = vt[:dim]
    residual = 0.0 if dim >= s.size else float(s[dim] / s[0])
    sub = Subspace(basis=basis, signature=subspace_signature(basis))
    w0 = None
    if dim <= 4:
        # inside the envelope, the directions orthogonal to l(v0)
        row = basis @ (sections[v0_index] * SIGNS)
        _, sr, vr = np.linalg.svd(row[None, :], full_matrices=True)
        null = vr[1:]
        if null.shape[0]:
            w0 = span_subspace(null @ basis)
    return EnvelopeFit(
        subspace=sub,
        signature=sub.signature,
        residual=residual,
        singular_values=s,
        w0=w0,
    )


def section_derivatives(cc: ComplexCurve) -> np.ndarray:
    """Finite-difference l_v at the nodes, tangent to the unit sphere."""
    h = uniform_step(cc.v)
    d = central_diff(cc.l, h, closed=cc.closed)
    return d - inner(cc.l, d)[:, None] * cc.l
