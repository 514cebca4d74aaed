"""Deterministic file formats for curves, surfaces, reports, and meshes.

All structured artifacts are JSON documents with a "format": "lsf-1"
version field, sorted keys, and every float rendered at 17 significant
digits with a lowercase exponent, so identical data produces identical
bytes.  Writes are atomic (temp file + rename).  Mesh export projects
the point-sphere of each contact element to coordinates and emits
grid-quad OBJ or ascii PLY with wrapped directions stitched through
shared vertex indices.
"""

from __future__ import annotations

import math
import os
import tempfile

import numpy as np

from .core import inner
from .curves import LegendreCurve
from .evolution import SurfaceGrid
from .spaceforms import SpaceFormFrame


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError("non-finite float in output document")
    return format(x, ".16e")


def _emit(obj, out: list) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"')
                   .replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t") + '"')
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError("document keys must be strings")
            if i:
                out.append(",")
            _emit(key, out)
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_document(obj) -> str:
    """Render a document deterministically (sorted keys, fixed floats)."""
    out: list = []
    _emit(obj, out)
    out.append("\n")
    return "".join(out)


def _current_umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write_text(path: str, text: str) -> None:
    """Write text via a same-directory temp file and atomic rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".lsf-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.chmod(tmp, 0o666 & ~_current_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sanitize_fields(obj):
    """Replace non-finite numbers by None so reports stay serializable."""
    if isinstance(obj, dict):
        return {k: sanitize_fields(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize_fields(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return sanitize_fields(obj.tolist())
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


# ---------------------------------------------------------------------------
# curve and surface documents

def write_curve(path: str, curve: LegendreCurve, k=None, first_integral=None,
                params: dict | None = None) -> None:
    doc = {
        "format": "lsf-1",
        "kind": "curve",
        "closed": bool(curve.closed),
        "s": curve.u,
        "frames": curve.frames,
        "ambient_line": curve.ambient_line,
    }
    if k is not None:
        doc["k"] = np.asarray(k, dtype=float)
    if first_integral is not None:
        doc["first_integral"] = np.asarray(first_integral, dtype=float)
    if params is not None:
        doc["params"] = sanitize_fields(params)
    atomic_write_text(path, emit_document(doc))


def read_curve(path: str) -> tuple[LegendreCurve, dict]:
    import json

    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "lsf-1" or doc.get("kind") != "curve":
        raise ValueError(f"{path}: not an lsf-1 curve document")
    curve = LegendreCurve(
        u=np.asarray(doc["s"], dtype=float),
        frames=np.asarray(doc["frames"], dtype=float),
        ambient_line=np.asarray(doc["ambient_line"], dtype=float),
        closed=bool(doc["closed"]),
    )
    extras = {key: doc[key] for key in ("k", "first_integral", "params") if key in doc}
    return curve, extras


def write_surface(path: str, grid: SurfaceGrid) -> None:
    doc = {
        "format": "lsf-1",
        "kind": "surface",
        "u": grid.u,
        "v": grid.v,
        "closed_u": bool(grid.closed_u),
        "closed_v": bool(grid.closed_v),
        "lifts": grid.lifts,
        "regularity": grid.regularity,
        "valid": grid.valid.astype(int),
    }
    atomic_write_text(path, emit_document(doc))


def read_surface(path: str) -> SurfaceGrid:
    import json

    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "lsf-1" or doc.get("kind") != "surface":
        raise ValueError(f"{path}: not an lsf-1 surface document")
    return SurfaceGrid(
        u=np.asarray(doc["u"], dtype=float),
        v=np.asarray(doc["v"], dtype=float),
        lifts=np.asarray(doc["lifts"], dtype=float),
        closed_u=bool(doc["closed_u"]),
        closed_v=bool(doc["closed_v"]),
        regularity=np.asarray(doc["regularity"], dtype=float),
        valid=np.asarray(doc["valid"]).astype(bool),
    )


def write_report(path: str, text: str, fields: dict) -> None:
    doc = {
        "format": "lsf-1",
        "kind": "report",
        "text": text,
        "fields": sanitize_fields(fields),
    }
    atomic_write_text(path, emit_document(doc))


def write_pair(path: str, s0: np.ndarray, surface_path: str, partner_path: str,
               verification: dict) -> None:
    doc = {
        "format": "lsf-1",
        "kind": "pair",
        "surface": surface_path,
        "partner": partner_path,
        "s0": np.asarray(s0, dtype=float),
        "verification": sanitize_fields(verification),
    }
    atomic_write_text(path, emit_document(doc))


# ---------------------------------------------------------------------------
# mesh export

def project_grid(grid: SurfaceGrid, frame: SpaceFormFrame,
                 tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of each cell's point sphere, with a projectability mask.

    Each contact element holds a single point-sphere direction (the
    combination of its rows without point_complex component); cells whose
    point sphere sits at infinity are masked out rather than raised.
    """
    rows = grid.lifts
    g1 = inner(rows[..., 0, :], frame.point_complex)
    g2 = inner(rows[..., 1, :], frame.point_complex)
    y = g2[..., None] * rows[..., 0, :] - g1[..., None] * rows[..., 1, :]
    scale = np.linalg.norm(y, axis=-1)
    denom = -inner(y, frame.form_vector)
    ok = (scale > tol * np.linalg.norm(rows, axis=(-2, -1))) & (
        np.abs(denom) > tol * scale
    )
    safe = np.where(ok, denom, 1.0)
    pts = (y / safe[..., None])[..., :3]
    return np.where(ok[..., None], pts, 0.0), ok


def _quad_indices(nu: int, nv: int, closed_u: bool, closed_v: bool) -> np.ndarray:
    iu = np.arange(nu if closed_u else nu - 1)
    jv = np.arange(nv if closed_v else nv - 1)
    ii, jj = np.meshgrid(iu, jv, indexing="ij")
    i1 = (ii + 1) % nu
    j1 = (jj + 1) % nv
    quads = np.stack(
        [ii * nv + jj, i1 * nv + jj, i1 * nv + j1, ii * nv + j1], axis=-1
    )
    return quads.reshape(-1, 4)


def export_mesh(path: str, grid: SurfaceGrid, frame: SpaceFormFrame,
                fmt: str = "obj", tol: float = 1e-8) -> dict:
    """Write the projected grid as a quad mesh; returns export counts.

    Every grid vertex is written once (wrapped directions reuse indices,
    keeping the mesh watertight); unprojectable vertices become flagged
    placeholders and the quads touching them are dropped.
    """
    if fmt not in ("obj", "ply"):
        raise ValueError("mesh format must be 'obj' or 'ply'")
    pts, ok = project_grid(grid, frame, tol=tol)
    if not ok.any():
        raise ValueError("no projectable vertices")
    nu, nv = grid.shape
    quads = _quad_indices(nu, nv, grid.closed_u, grid.closed_v)
    flat_ok = ok.reshape(-1)
    keep = flat_ok[quads].all(axis=1)
    quads = quads[keep]
    flat_pts = pts.reshape(-1, 3)
    dropped = int((~keep).sum())
    bad = int((~flat_ok).sum())

    lines = []
    if fmt == "obj":
        lines.append(f"# lsf-1 mesh {nu}x{nv} wrap_u={int(grid.closed_u)} "
                     f"wrap_v={int(grid.closed_v)}")
        lines.append(f"# unprojectable vertices: {bad}; dropped quads: {dropped}")
        for p, good in zip(flat_pts, flat_ok):
            tagged = "" if good else " # unprojectable"
            lines.append(
                f"v {_fmt_float(p[0])} {_fmt_float(p[1])} {_fmt_float(p[2])}{tagged}"
            )
        for q in quads:
            lines.append(f"f {q[0] + 1} {q[1] + 1} {q[2] + 1} {q[3] + 1}")
    else:
        lines.append("ply")
        lines.append("format ascii 1.0")
        lines.append(f"comment lsf-1 mesh {nu}x{nv} wrap_u={int(grid.closed_u)} "
                     f"wrap_v={int(grid.closed_v)}")
        lines.append(f"comment unprojectable vertices: {bad}; dropped quads: {dropped}")
        lines.append(f"element vertex {flat_pts.shape[0]}")
        lines.append("property double x")
        lines.append("property double y")
        lines.append("property double z")
        lines.append(f"element face {quads.shape[0]}")
        lines.append("property list uchar int vertex_indices")
        lines.append("end_header")
        for p in flat_pts:
            lines.append(f"{_fmt_float(p[0])} {_fmt_float(p[1])} {_fmt_float(p[2])}")
        for q in quads:
            lines.append(f"4 {q[0]} {q[1]} {q[2]} {q[3]}")
    atomic_write_text(path, "\n".join(lines) + "\n")
    return {
        "vertices": int(flat_pts.shape[0]),
        "faces": int(quads.shape[0]),
        "unprojectable": bad,
        "dropped_faces": dropped,
    }
