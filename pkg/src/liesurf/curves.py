"""Legendre curves: sampled isotropic 2-plane families and their invariants.

A curve sample is an isotropic frame pair spanning a contact element.  The
geometry extractor normalizes the pair against a space-form frame, yielding
the point-sphere lift, the tangent-plane lift, arclength and the curvature
function k defined through d(plane_lift) = -k d(point_lift).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SIGNS, basis_vector, inner
from .numdiff import central_diff, cumtrapz0, uniform_step


@dataclass
class LegendreCurve:
    """Sampled Legendre curve.

    frames has shape (n, 2, 6); each pair must be null, mutually orthogonal
    and orthogonal to ambient_line (the spacelike line whose complement the
    curve lives in).
    """

    u: np.ndarray
    frames: np.ndarray
    ambient_line: np.ndarray
    closed: bool = False

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.frames = np.asarray(self.frames, dtype=float)
        self.ambient_line = np.asarray(self.ambient_line, dtype=float)
        if self.frames.ndim != 3 or self.frames.shape[1:] != (2, 6):
            raise ValueError("frames must have shape (n, 2, 6)")
        if self.frames.shape[0] != self.u.shape[0]:
            raise ValueError("grid and frames disagree")

    @property
    def n(self) -> int:
        return self.u.shape[0]


def curve_residuals(curve: LegendreCurve) -> dict:
    """Isotropy / contact / ambient-orthogonality residuals of the samples."""
    r1 = curve.frames[:, 0]
    r2 = curve.frames[:, 1]
    h = uniform_step(curve.u)
    d1 = central_diff(r1, h, curve.closed)
    d2 = central_diff(r2, h, curve.closed)
    legendre = max(
        float(np.abs(inner(d1, r1)).max()),
        float(np.abs(inner(d1, r2)).max()),
        float(np.abs(inner(d2, r1)).max()),
        float(np.abs(inner(d2, r2)).max()),
    )
    return {
        "isotropy": float(
            max(
                np.abs(inner(r1, r1)).max(),
                np.abs(inner(r2, r2)).max(),
                np.abs(inner(r1, r2)).max(),
            )
        ),
        "ambient": float(
            max(
                np.abs(inner(r1, curve.ambient_line)).max(),
                np.abs(inner(r2, curve.ambient_line)).max(),
            )
        ),
        "legendre": legendre,
    }


def contact_lift_curve(points, normals, frame, u=None, closed: bool = False) -> LegendreCurve:
    """Lift a planar front with unit normals to a Legendre curve.

    points and normals are (n, 2) arrays in the x3 = 0 coordinate plane; the
    ambient line of the result is e3.
    """
    points = np.asarray(points, dtype=float)
    normals = np.asarray(normals, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape != normals.shape:
        raise ValueError("points and normals must be matching (n, 2) arrays")
    if points.shape[0] < 5:
        raise ValueError("degenerate sampling")
    nn = (normals * normals).sum(axis=1)
    if np.any(np.abs(nn - 1.0) > 1e-9):
        raise ValueError("normals must be unit vectors")

    from .spaceforms import lift_plane, lift_point

    x3 = np.concatenate([points, np.zeros((points.shape[0], 1))], axis=1)
    n3 = np.concatenate([normals, np.zeros((points.shape[0], 1))], axis=1)
    offs = (points * normals).sum(axis=1)
    f = lift_point(frame, x3)
    t = lift_plane(frame, n3, offs)
    if u is None:
        if closed:
            u = np.arange(points.shape[0]) * (2.0 * np.pi / points.shape[0])
        else:
            u = np.linspace(0.0, 1.0, points.shape[0])
    frames = np.stack([f, t], axis=1)
    return LegendreCurve(u=np.asarray(u, dtype=float), frames=frames, ambient_line=basis_vector(3), closed=closed)


@dataclass
class CurveGeometry:
    """Normalized frame field of a Legendre curve.

    point_lift, plane_lift and tangent are (n, 6); tangent is the unit
    arclength derivative of point_lift.  dk is set by the elastica solver
    (exact stage values) and left None for ingested curves.
    """

    u: np.ndarray
    point_lift: np.ndarray
    plane_lift: np.ndarray
    tangent: np.ndarray
    k: np.ndarray
    s: np.ndarray
    speed: np.ndarray
    closed: bool = False
    dk: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.u.shape[0]

    def dds(self, y) -> np.ndarray:
        """Arclength derivative of a sampled quantity via central differences."""
        h = uniform_step(self.u)
        d = central_diff(y, h, self.closed)
        sp = self.speed if np.ndim(y) == 1 else self.speed[:, None]
        return d / sp


def curve_geometry(curve: LegendreCurve, frame, tol: float = 1e-9) -> CurveGeometry:
    """Intersect each contact element with the point and plane quadrics.

    The 2x2 solve enforces (f, form_vector) = -1, (f, point_complex) = 0 and
    the transposed pair for the plane lift, which pins all contractions
    exactly.  k comes from a metric least-squares fit of
    d(plane_lift) = -k d(point_lift).
    """
    r1 = curve.frames[:, 0]
    r2 = curve.frames[:, 1]
    q, p = frame.form_vector, frame.point_complex
    a11 = inner(r1, q)
    a12 = inner(r2, q)
    a21 = inner(r1, p)
    a22 = inner(r2, p)
    det = a11 * a22 - a12 * a21
    scale = np.sqrt(np.abs(r1 * r1).sum(-1) * np.abs(r2 * r2).sum(-1))
    if np.any(np.abs(det) <= tol * np.maximum(scale, 1e-30)):
        raise ValueError("curve not transversal to space form slice")
    # f = a r1 + b r2 with (f,q) = -1, (f,p) = 0
    af = -a22 / det
    bf = a21 / det
    # t = c r1 + d r2 with (t,q) = 0, (t,p) = -1
    ct = a12 / det
    dt = -a11 / det
    f = af[:, None] * r1 + bf[:, None] * r2
    t = ct[:, None] * r1 + dt[:, None] * r2

    h = uniform_step(curve.u)
    df = central_diff(f, h, curve.closed)
    dt_ = central_diff(t, h, curve.closed)
    sp2 = inner(df, df)
    if np.any(sp2 <= tol):
        raise ValueError("degenerate sampling")
    speed = np.sqrt(sp2)
    tangent = df / speed[:, None]
    k = -inner(dt_, df) / sp2
    s = cumtrapz0(speed, h)
    return CurveGeometry(
        u=curve.u.copy(),
        point_lift=f,
        plane_lift=t,
        tangent=tangent,
        k=k,
        s=s,
        speed=speed,
        closed=curve.closed,
    )


def geometry_residuals(g: CurveGeometry) -> float:
    """Max violation of the eight frame normalization relations."""
    f, t, v = g.point_lift, g.plane_lift, g.tangent
    vals = [
        np.abs(inner(f, f)),
        np.abs(inner(t, t)),
        np.abs(inner(f, t)),
        np.abs(inner(v, v) - 1.0),
    ]
    return float(max(vvv.max() for vvv in vals))


def _curvature_rate(g: CurveGeometry) -> np.ndarray:
    if g.dk is not None:
        return g.dk
    h = uniform_step(g.u)
    return central_diff(g.k, h, g.closed) / g.speed


def elastic_complex_vector(g: CurveGeometry, mu: float, lam: float, frame) -> np.ndarray:
    """Per-sample conserved-vector template of a constrained elastic curve.

    Constant along the curve exactly when k satisfies the constrained elastica
    equation with multipliers (mu, lam).
    """
    chi, kappa = frame.chi, frame.kappa
    k = g.k[:, None]
    kp = _curvature_rate(g)[:, None]
    return (
        -(g.k * kappa + lam)[:, None] * g.point_lift
        + (0.5 * chi * k * k + mu) * g.plane_lift
        - kp * g.tangent
        + k * frame.form_vector
        - 0.5 * k * k * frame.point_complex
    )


@dataclass
class ElasticFit:
    """Result of the constrained-elastic detection."""

    mu: float
    lam: float
    r_vec: np.ndarray
    residual: float
    complex_residual: float
    circular: bool = False
    family: str | None = None

    @property
    def is_elastic(self) -> bool:
        return self.circular or self.residual <= 1e-4


def detect_constrained_elastic(g: CurveGeometry, frame, k_tol: float = 1e-9) -> ElasticFit:
    """Recover (mu, lam) and test constancy of the conserved vector.

    The constant vector r is fitted from the exact linear contractions
    (point_lift, r) = -k and (plane_lift, r) = k^2/2 averaged over all
    samples; mu and lam are then its contractions with the space-form pair.
    Circular curves leave (mu, lam) underdetermined and are flagged instead.
    """
    k = g.k
    kscale = max(1.0, float(np.abs(k).max()))
    chi, kappa = frame.chi, frame.kappa
    if float(k.std()) <= k_tol * kscale:
        k0 = float(k.mean())
        mu = 0.0
        lam = -0.5 * chi * k0**3 - (mu + kappa) * k0
        r = elastic_complex_vector(g, mu, lam, frame)
        rmean = r.mean(axis=0)
        rn = float(np.linalg.norm(rmean))
        resid = float(np.linalg.norm(r - rmean, axis=1).max()) / max(rn, 1e-30)
        half = g.plane_lift + 0.5 * k[:, None] * g.point_lift
        return ElasticFit(
            mu=mu,
            lam=lam,
            r_vec=rmean,
            residual=resid,
            complex_residual=float(np.abs(inner(half, rmean)).max()),
            circular=True,
            family="circular: (mu, lam) non-unique; lam = -chi*k0^3/2 - (mu+kappa)*k0",
        )

    rows = np.concatenate([g.point_lift, g.plane_lift], axis=0) * SIGNS
    rhs = np.concatenate([-k, 0.5 * k * k])
    r_const, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    mu = float(-inner(r_const, frame.point_complex))
    lam = float(inner(r_const, frame.form_vector))
    r = elastic_complex_vector(g, mu, lam, frame)
    rmean = r.mean(axis=0)
    rn = float(np.linalg.norm(rmean))
    resid = float(np.linalg.norm(r - rmean, axis=1).max()) / max(rn, 1e-30)
    half = g.plane_lift + 0.5 * k[:, None] * g.point_lift
    return ElasticFit(
        mu=mu,
        lam=lam,
        r_vec=rmean,
        residual=resid,
        complex_residual=float(np.abs(inner(half, rmean)).max()),
    )


def verify_linear_conserved(g: CurveGeometry, r_vec) -> dict:
    """Residuals of the degree-one conserved polynomial built on r_vec.

    res0: constancy of r itself; res1: the degree-one component against the
    arclength polarisation; res2: the top coefficient, which dies for
    algebraic reasons.  r_vec may be a single vector or per-sample values.
    """
    r = np.asarray(r_vec, dtype=float)
    if r.ndim == 1:
        r = np.broadcast_to(r, (g.n, 6)).copy()
    f = g.point_lift
    h = uniform_step(g.u)
    sp = g.speed[:, None]
    df = central_diff(f, h, g.closed) / sp
    lead = 2.0 * g.plane_lift + g.k[:, None] * f
    dlead = central_diff(lead, h, g.closed) / sp
    dr = central_diff(r, h, g.closed) / sp

    def pol(x):
        # arclength polarisation -f ^ df applied samplewise
        return -(inner(f, x)[:, None] * df - inner(df, x)[:, None] * f)

    res0 = float(np.linalg.norm(dr, axis=1).max())
    res1 = float(np.linalg.norm(dlead + pol(r), axis=1).max())
    res2 = float(np.linalg.norm(pol(lead), axis=1).max())
    return {"res0": res0, "res1": res1, "res2": res2}
