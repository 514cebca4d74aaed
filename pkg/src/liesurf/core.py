"""Indefinite linear algebra on R^{4,2}.

Vectors are numpy arrays whose last axis has length 6; the bilinear form is
diag(+,+,+,+,-,-) in the fixed basis e1..e6.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DIM = 6
SIGNS = np.array([1.0, 1.0, 1.0, 1.0, -1.0, -1.0])
METRIC = np.diag(SIGNS)

# relative rank cutoff shared by every Gram-based decision
RANK_TOL = 1e-9


def basis_vector(i: int) -> np.ndarray:
    """e1..e6 for i = 1..6."""
    v = np.zeros(DIM)
    v[i - 1] = 1.0
    return v


def inner(a, b) -> np.ndarray | float:
    """Bilinear form of signature (4,2); broadcasts over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (a * b * SIGNS).sum(axis=-1)


def norm2(a):
    return inner(a, a)


def wedge_apply(a, b, c):
    """Action of the bivector a^b on c: (a,c) b - (b,c) a."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ac = np.asarray(inner(a, c))[..., None]
    bc = np.asarray(inner(b, c))[..., None]
    return ac * b - bc * a


def bivector_matrix(a, b) -> np.ndarray:
    """6x6 matrix of c -> (a,c)b - (b,c)a.  Skew-adjoint for the form."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.outer(b, a * SIGNS) - np.outer(a, b * SIGNS)


@dataclass
class Bivector:
    """Decomposable element a^b of so(4,2), kept with its matrix."""

    a: np.ndarray
    b: np.ndarray
    matrix: np.ndarray = field(init=False)

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.matrix = bivector_matrix(self.a, self.b)

    def __call__(self, c):
        return wedge_apply(self.a, self.b, c)


def gram(basis) -> np.ndarray:
    basis = np.asarray(basis, dtype=float)
    return basis @ METRIC @ basis.T


def subspace_signature(basis, tol: float = RANK_TOL) -> tuple[int, int, int]:
    """Signature (pos, neg, null) of the span of the given row vectors.

    Eigenvalues of the Gram matrix are classified against tol times the
    largest magnitude, so the answer is scale invariant.
    """
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    if basis.size == 0:
        raise ValueError("empty subspace")
    ev = np.linalg.eigvalsh(gram(basis))
    scale = np.abs(ev).max()
    if scale == 0.0:
        return (0, 0, len(ev))
    pos = int((ev > tol * scale).sum())
    neg = int((ev < -tol * scale).sum())
    return (pos, neg, len(ev) - pos - neg)


@dataclass
class Subspace:
    """Span of `basis` rows with its cached signature (pos, neg, null)."""

    basis: np.ndarray
    signature: tuple[int, int, int]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, v, tol: float = 1e-9) -> bool:
        v = np.asarray(v, dtype=float)
        q, _ = np.linalg.qr(self.basis.T)
        res = v - q @ (q.T @ v)
        return float(np.linalg.norm(res)) <= tol * max(1.0, float(np.linalg.norm(v)))


def span_subspace(vectors, tol: float = RANK_TOL) -> Subspace:
    """Subspace spanned by the rows of `vectors`, reduced to a full-rank basis."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.size == 0 or not np.any(vectors):
        raise ValueError("empty subspace")
    u, s, vt = np.linalg.svd(vectors, full_matrices=False)
    rank = int((s > tol * s[0]).sum())
    basis = vt[:rank]
    return Subspace(basis=basis, signature=subspace_signature(basis, tol))


def ortho_complement(space, tol: float = RANK_TOL) -> Subspace:
    """Orthogonal complement with respect to the (4,2) form."""
    basis = space.basis if isinstance(space, Subspace) else np.atleast_2d(np.asarray(space, dtype=float))
    if basis.size == 0:
        raise ValueError("empty subspace")
    # y is in the complement iff (basis @ METRIC) y = 0
    m = basis * SIGNS
    u, s, vt = np.linalg.svd(m, full_matrices=True)
    cutoff = tol * (s[0] if s.size else 0.0)
    rank = int((s > cutoff).sum())
    comp = vt[rank:]
    if comp.shape[0] == 0:
        raise ValueError("empty subspace")
    return Subspace(basis=comp, signature=subspace_signature(comp, tol))


def ortho_defect(m) -> float:
    """max |M^T G M - G|, zero exactly on O(4,2)."""
    m = np.asarray(m, dtype=float)
    return float(np.abs(m.T @ METRIC @ m - METRIC).max())


def metric_inverse(m) -> np.ndarray:
    """Inverse of an orthogonal map via G M^T G; cheap and exact on the group."""
    m = np.asarray(m, dtype=float)
    return METRIC @ m.T @ METRIC


def _indefinite_gram_schmidt(m: np.ndarray) -> np.ndarray:
    """Column-wise Gram-Schmidt against the form, in fixed basis order.

    Requires each column to keep the causal type of the corresponding basis
    vector; fails loudly otherwise.
    """
    out = m.astype(float).copy()
    for j in range(DIM):
        c = out[:, j]
        for i in range(j):
            qi = out[:, i]
            c = c - SIGNS[i] * inner(qi, c) * qi
        n2 = inner(c, c)
        if abs(n2) < 1e-14 or np.sign(n2) != SIGNS[j]:
            raise ValueError("integration lost the group")
        out[:, j] = c / np.sqrt(abs(n2))
    return out


def project_to_orthogonal(m, tol: float = 1e-13, max_iter: int = 8) -> np.ndarray:
    """Nearest-in-practice member of O(4,2): Newton steps on the defect.

    Each step is M <- M (I - G E / 2) with E = M^T G M - G, which cancels the
    defect to first order.  Falls back to indefinite Gram-Schmidt if Newton
    stalls (far from the group).
    """
    m = np.asarray(m, dtype=float).copy()
    # the defect's floating-point floor grows with |M|^2; keep tolerances relative
    scale = max(1.0, float(np.abs(m).max()) ** 2)
    prev = ortho_defect(m)
    for _ in range(max_iter):
        if prev <= tol * scale:
            return m
        err = m.T @ METRIC @ m - METRIC
        cand = m @ (np.eye(DIM) - 0.5 * METRIC @ err)
        d = ortho_defect(cand)
        if d >= prev:
            break
        m, prev = cand, d
    if prev <= 1e-9 * scale:
        return m
    return _indefinite_gram_schmidt(m)


@dataclass
class OrthoMap:
    """Matrix acting on R^{4,2} with its orthogonality defect."""

    matrix: np.ndarray
    defect: float = field(init=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        self.defect = ortho_defect(self.matrix)

    def __call__(self, v):
        return np.asarray(v, dtype=float) @ self.matrix.T

    def inverse(self) -> "OrthoMap":
        return OrthoMap(metric_inverse(self.matrix))
