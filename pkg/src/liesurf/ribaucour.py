"""Ribaucour partners of evolved surfaces.

A Ribaucour pair is two Legendre maps on a shared grid that envelop a
common sphere congruence with corresponding curvature lines.  For a
surface swept by a complex-preserving evolution, partners arise by
evolving a second seed curve with the same transport: the two evolved
surfaces intersect cell-by-cell in the transported common spheres.

The channel partners of one evolved surface form a three-parameter
family: the seed is a single fixed sphere taken from the starting
complex, charted here by planar center and signed radius.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import basis_vector, inner, norm2
from .curves import LegendreCurve
from .evolution import EvolutionMap, SurfaceGrid, evolve_surface
from .spaceforms import euclidean_frame, lift_sphere


@dataclass
class RibaucourPair:
    """Two Legendre surface grids enveloping a common sphere congruence.

    s0[i, j] spans the intersection of the two contact elements at grid
    cell (i, j).  For channel partners, seed_sphere is the fixed sphere
    generating the second surface and seed_curve its per-u companion
    inside the first seed curve.
    """

    f: SurfaceGrid
    f_hat: SurfaceGrid
    s0: np.ndarray
    seed_sphere: np.ndarray | None = None
    seed_curve: np.ndarray | None = None


@dataclass
class RibaucourReport:
    """Measured pair properties, report-only.

    incidence: worst distance of the common sphere from either contact
    element (unit vectors).  first_angle / margin: extreme principal
    angles between the two contact elements — a proper pair needs the
    first near zero (shared direction) and the second bounded away from
    zero (elements do not coincide).  correspondence: curvature-sphere
    kernel residuals of both surfaces on the shared grid; small values
    mean the common parametrization is curvature-aligned for both, i.e.
    curvature lines correspond.
    """

    incidence: float
    first_angle: float
    margin: float
    correspondence: dict[str, float]
    proper: bool
    note: str = ""

    def to_text(self) -> str:
        lines = [
            f"common-sphere incidence   {self.incidence:.3e}",
            f"first principal angle     {self.first_angle:.3e}",
            f"rank-1 margin             {self.margin:.3e}",
        ]
        for key, val in self.correspondence.items():
            lines.append(f"correspondence {key:<10} {val:.3e}")
        verdict = "proper Ribaucour pair" if self.proper else "not a proper pair"
        if self.note:
            verdict += f" ({self.note})"
        lines.append(verdict)
        return "\n".join(lines)


def channel_partner_chart(complex_line, a: float, b: float, r: float) -> np.ndarray:
    """Chart of the 3-parameter channel-partner choice space.

    Seeds for channel partners are the null directions orthogonal to the
    starting complex line — a projectivized light cone in five dimensions,
    hence three real parameters.  The chart realizes them as spheres with
    center (a, b, 0) and signed radius r in the reference position where
    the complex line is the third coordinate axis, reflected onto the
    requested line by an isometry.

    Chart boundary (not covered): r = 0 (point spheres) and planes
    (infinite radius); both are limits of the covered spheres.
    """
    l0 = np.asarray(complex_line, dtype=float)
    nn = float(norm2(l0))
    if nn <= 0.0:
        raise ValueError("complex line must be spacelike")
    l0 = l0 / np.sqrt(nn)
    if r == 0.0:
        raise ValueError("chart boundary: zero radius")
    base = lift_sphere(euclidean_frame(), (a, b, 0.0), r)
    e3 = basis_vector(3)
    w = e3 - l0
    if np.linalg.norm(w) < 1e-12:
        return base
    ww = float(norm2(w))
    if abs(ww) < 1e-9:
        # l0 = e3 + (null vector): the difference grazes the light cone
        # and the sum-reflection maps e3 onto the same line instead
        w = e3 + l0
        ww = float(norm2(w))
    return base - (2.0 * float(inner(base, w)) / ww) * w


def _orthonormal_rows(frames: np.ndarray) -> np.ndarray:
    """Euclidean-orthonormal bases of the contact 2-planes, batched."""
    q, _ = np.linalg.qr(np.swapaxes(frames, -1, -2))
    return np.swapaxes(q, -1, -2)


def _companion_in_seed(curve: LegendreCurve, c_hat: np.ndarray) -> np.ndarray:
    """Per-u frame combination of the seed curve orthogonal to c_hat."""
    rows = curve.frames
    g1 = inner(rows[:, 0], c_hat)
    g2 = inner(rows[:, 1], c_hat)
    scale = np.hypot(
        np.linalg.norm(rows[:, 0], axis=-1), np.linalg.norm(rows[:, 1], axis=-1)
    ) * np.linalg.norm(c_hat)
    if np.min(np.hypot(g1, g2) / scale) < 1e-8:
        raise ValueError("tangential choice: transform degenerates")
    c0 = g2[:, None] * rows[:, 0] - g1[:, None] * rows[:, 1]
    return c0 / np.linalg.norm(c0, axis=-1, keepdims=True)


def _common_directions(curve: LegendreCurve, partner: LegendreCurve) -> np.ndarray:
    """Per-u unit spans of the rank-1 intersection of two seed curves."""
    if curve.frames.shape != partner.frames.shape:
        raise ValueError("seed curves must share the parameter grid")
    qa = _orthonormal_rows(curve.frames)
    qb = _orthonormal_rows(partner.frames)
    m = qa @ np.swapaxes(qb, -1, -2)
    u_m, svals, _ = np.linalg.svd(m)
    if np.any(svals[:, 1] > 1.0 - 1e-8):
        raise ValueError("curves coincide")
    if np.any(svals[:, 0] < 1.0 - 1e-6):
        raise ValueError("seed curves share no sphere")
    c0 = np.einsum("ua,uaj->uj", u_m[:, :, 0], qa)
    # SVD leaves the sign free; anchor the first sample and propagate
    lead = c0[0, np.argmax(np.abs(c0[0]))]
    if lead < 0.0:
        c0[0] = -c0[0]
    flips = np.sign(np.einsum("uj,uj->u", c0[1:], c0[:-1]))
    flips = np.where(flips == 0.0, 1.0, flips)
    c0[1:] *= np.cumprod(flips)[:, None]
    return c0


def ribaucour_evolve(
    emap: EvolutionMap,
    curve: LegendreCurve,
    c_hat=None,
    partner_curve: LegendreCurve | None = None,
) -> RibaucourPair:
    """Evolve a seed curve and a partner seed into a Ribaucour pair.

    Exactly one of c_hat / partner_curve selects the partner seed:

    * c_hat — a fixed sphere from the starting complex (null vector with
      (c_hat, l(v0)) = 0, transversal to the seed curve).  The partner
      seed is the pencil spanned by c_hat and its per-u companion inside
      the seed curve; the evolved partner is a channel surface.
    * partner_curve — a full second Legendre curve meeting the seed
      curve in exactly one sphere per parameter value.

    The common spheres are transported by the same evolution, giving the
    enveloped congruence s0.
    """
    if (c_hat is None) == (partner_curve is None):
        raise ValueError("provide exactly one of c_hat and partner_curve")
    l0 = emap.sections[emap.v0_index]

    if c_hat is not None:
        c_hat = np.asarray(c_hat, dtype=float)
        scale2 = float(np.linalg.norm(c_hat) ** 2)
        if scale2 == 0.0 or abs(float(norm2(c_hat))) > 1e-8 * scale2:
            raise ValueError("complex membership violated")
        if abs(float(inner(c_hat, l0))) > 1e-8 * np.sqrt(scale2) * np.linalg.norm(l0):
            raise ValueError("complex membership violated")
        c0 = _companion_in_seed(curve, c_hat)
        hat_rows = np.broadcast_to(
            c_hat / np.linalg.norm(c_hat), (curve.n, 6)
        )
        partner = LegendreCurve(
            u=curve.u.copy(),
            frames=np.stack([np.array(hat_rows), c0], axis=1),
            ambient_line=curve.ambient_line.copy(),
            closed=curve.closed,
        )
        seed_sphere = c_hat
    else:
        c0 = _common_directions(curve, partner_curve)
        partner = partner_curve
        seed_sphere = None

    f = evolve_surface(emap, curve)
    f_hat = evolve_surface(emap, partner)
    s0 = np.einsum("vij,uj->uvi", emap.inverse_mats(), c0)
    return RibaucourPair(
        f=f, f_hat=f_hat, s0=s0, seed_sphere=seed_sphere, seed_curve=c0
    )


def verify_ribaucour(
    pair: RibaucourPair,
    incidence_tol: float = 1e-8,
    margin_tol: float = 1e-3,
) -> RibaucourReport:
    """Measure the defining properties of a Ribaucour pair on its grid.

    Reports the worst incidence of the common sphere congruence with
    both contact-element fields, the extreme principal angles between
    the fields, and the curvature-sphere kernel residuals of both
    surfaces in both directions (curvature-line correspondence).
    """
    from .analysis import curvature_sphere_fields

    qf = _orthonormal_rows(pair.f.lifts)
    qh = _orthonormal_rows(pair.f_hat.lifts)
    s_hat = pair.s0 / np.linalg.norm(pair.s0, axis=-1, keepdims=True)

    def plane_distance(q):
        coef = np.einsum("uvaj,uvj->uva", q, s_hat)
        proj = np.einsum("uva,uvaj->uvj", coef, q)
        return np.linalg.norm(s_hat - proj, axis=-1)

    incidence = float(max(plane_distance(qf).max(), plane_distance(qh).max()))

    m = qf @ np.swapaxes(qh, -1, -2)
    svals = np.linalg.svd(m, compute_uv=False)
    sv = np.clip(svals, 0.0, 1.0)
    first_angle = float(np.arccos(sv[..., 0]).max())
    margin = float(np.arccos(sv[..., 1]).min())

    note = ""
    proper = True
    if margin < margin_tol:
        proper = False
        note = "contact elements coincide somewhere: rank-2 intersection"
    if first_angle > np.sqrt(incidence_tol):
        proper = False
        note = "no common sphere direction"
    if incidence > incidence_tol:
        proper = False
        note = note or "common sphere leaves the contact elements"

    correspondence = {}
    for tag, grid in (("f", pair.f), ("partner", pair.f_hat)):
        try:
            pd = curvature_sphere_fields(grid)
            correspondence[f"{tag}_u"] = float(np.nanmax(pd.residual1))
            correspondence[f"{tag}_v"] = float(np.nanmax(pd.residual2))
        except ValueError:
            correspondence[f"{tag}_u"] = np.inf
            correspondence[f"{tag}_v"] = np.inf
            proper = False
            note = note or "grid not curvature-aligned for both surfaces"

    return RibaucourReport(
        incidence=incidence,
        first_angle=first_angle,
        margin=margin,
        correspondence=correspondence,
        proper=proper,
        note=note,
    )
