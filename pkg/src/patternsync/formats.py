"""Document, edit-script, OBJ and SVG serialization.

The document format is versioned JSON ("pt-1") with flat coordinate and
index arrays.  Coordinates are canonicalized to 9 significant digits on
save, which is beyond every solver tolerance, so save/load round trips are
bit-exact and document hashes are stable.
"""

import json

import numpy as np

from .document import GarmentDocument, build_symmetry
from .editops import EditOp
from .errors import (
    MissingGroup,
    NonTriangleFace,
    ParseError,
    UnsupportedVersion,
    ValidationError,
)
from .geometry import BodyModel, Mesh3, Panel, SeamLine

DOCUMENT_VERSION = "pt-1"


def _canon(x):
    """Round a float to 9 significant digits (idempotent)."""
    return float("%.9g" % float(x))


def _flat(arr):
    return [_canon(x) for x in np.asarray(arr, dtype=np.float64).ravel()]


def _ints(arr):
    return [int(x) for x in np.asarray(arr).ravel()]


def save_document(doc):
    """Canonical document bytes; identical documents yield identical bytes."""
    data = {
        "version": DOCUMENT_VERSION,
        "body": {
            "vertices": _flat(doc.body.mesh.vertices),
            "triangles": _ints(doc.body.mesh.triangles),
            "skeleton": _flat(doc.body.skeleton),
            "feature_points": {k: _flat(v)
                               for k, v in sorted(doc.body.feature_points.items())},
        },
        "garment": {
            "vertices": _flat(doc.garment.vertices),
            "triangles": _ints(doc.garment.triangles),
            "panel_ids": _ints(doc.garment.panel_ids),
        },
        "panels": [
            {
                "id": int(pid),
                "vertices2d": _flat(doc.panels[pid].vertices2d),
                "triangles": _ints(doc.panels[pid].triangles),
                "boundary": _ints(doc.panels[pid].boundary),
                "corr": _ints(doc.panels[pid].corr),
            }
            for pid in sorted(doc.panels)
        ],
        "seams": [
            {"chain_a": _ints(s.chain_a), "chain_b": _ints(s.chain_b)}
            for s in doc.seams
        ],
        "symmetry": None if doc.symmetry is None else {
            "plane_point": _flat(doc.symmetry.plane_point),
            "plane_normal": _flat(doc.symmetry.plane_normal),
        },
        "history": doc.history,
    }
    return json.dumps(data, sort_keys=True, separators=(",", ":")).encode()


def _reshape(values, shape, entity, what):
    arr = np.asarray(values, dtype=np.float64)
    try:
        return arr.reshape(shape)
    except ValueError:
        raise ValidationError(f"{what} has {arr.size} values, not a multiple "
                              f"of {shape[-1]}", entity=entity)


def _itriples(values, entity, what):
    arr = np.asarray(values, dtype=np.int64)
    if arr.size % 3:
        raise ValidationError(f"{what} length not a multiple of 3", entity=entity)
    return arr.reshape(-1, 3)


def load_document(data):
    """Parse, build and fully validate a document; never silently repairs."""
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid document: {e.msg}", offset=e.pos)
    if not isinstance(raw, dict):
        raise ParseError("document root must be an object", offset=0)
    version = raw.get("version")
    if version != DOCUMENT_VERSION:
        raise UnsupportedVersion(f"unsupported document version {version!r}")

    def require(mapping, key, entity):
        if key not in mapping:
            raise ValidationError(f"missing key {key!r}", entity=entity)
        return mapping[key]

    b = require(raw, "body", "document")
    body = BodyModel(
        Mesh3(_reshape(require(b, "vertices", "body"), (-1, 3), "body", "vertices"),
              _itriples(require(b, "triangles", "body"), "body", "triangles"),
              np.zeros(len(b.get("triangles", [])) // 3, dtype=np.int64)),
        _reshape(b.get("skeleton", []), (-1, 2, 3), "body", "skeleton"),
        {k: np.asarray(v, dtype=np.float64)
         for k, v in b.get("feature_points", {}).items()},
    )

    g = require(raw, "garment", "document")
    garment = Mesh3(
        _reshape(require(g, "vertices", "garment"), (-1, 3), "garment", "vertices"),
        _itriples(require(g, "triangles", "garment"), "garment", "triangles"),
        np.asarray(require(g, "panel_ids", "garment"), dtype=np.int64),
    )
    if len(garment.panel_ids) != len(garment.triangles):
        raise ValidationError("panel_ids length differs from triangle count",
                              entity="garment")

    panels = {}
    for entry in require(raw, "panels", "document"):
        pid = int(require(entry, "id", "panel"))
        name = f"panel {pid}"
        if pid in panels:
            raise ValidationError("duplicate panel id", entity=name)
        panels[pid] = Panel(
            _reshape(require(entry, "vertices2d", name), (-1, 2), name, "vertices2d"),
            _itriples(require(entry, "triangles", name), name, "triangles"),
            np.asarray(entry.get("boundary", []), dtype=np.int64),
            np.asarray(require(entry, "corr", name), dtype=np.int64),
        )

    seams = [SeamLine(np.asarray(s.get("chain_a", []), dtype=np.int64).reshape(-1, 2),
                      np.asarray(s.get("chain_b", []), dtype=np.int64).reshape(-1, 2))
             for s in raw.get("seams", [])]

    doc = GarmentDocument(body, garment, panels, seams,
                          history=list(raw.get("history", [])))
    doc.validate()
    sym = raw.get("symmetry")
    if sym is not None:
        doc.symmetry = build_symmetry(garment, panels, seams,
                                      require(sym, "plane_point", "symmetry"),
                                      require(sym, "plane_normal", "symmetry"))
    doc.refresh_scale_maps()
    return doc


# ---------------------------------------------------------------------------
# edit scripts


def save_script(records):
    data = {"version": DOCUMENT_VERSION,
            "ops": [{"kind": r["kind"], "params": r["params"],
                     "mirror": bool(r.get("mirror", False))} for r in records]}
    return json.dumps(data, sort_keys=True, separators=(",", ":")).encode()


def load_script(data):
    """Edit script -> list of {kind, params, mirror} records, validated."""
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid edit script: {e.msg}", offset=e.pos)
    if raw.get("version") != DOCUMENT_VERSION:
        raise UnsupportedVersion(
            f"unsupported script version {raw.get('version')!r}")
    records = []
    for n, rec in enumerate(raw.get("ops", [])):
        try:
            op = EditOp(rec["kind"], rec["params"])
        except (KeyError, ValueError, TypeError) as e:
            raise ValidationError(f"bad op record: {e}", entity=f"op {n + 1}")
        records.append({"kind": op.kind, "params": op.params,
                        "mirror": bool(rec.get("mirror", False))})
    return records


# ---------------------------------------------------------------------------
# OBJ import


def import_obj(data, panel_assignment):
    """Triangle mesh from OBJ text; per-triangle panel ids from group names."""
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    vertices = []
    triangles = []
    panel_ids = []
    group = "default"
    for ln, line in enumerate(data.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError(f"line {ln}: vertex needs 3 coordinates")
            vertices.append([float(x) for x in parts[1:4]])
        elif tag == "g":
            group = parts[1] if len(parts) > 1 else "default"
        elif tag == "f":
            if len(parts) != 4:
                raise NonTriangleFace(
                    f"line {ln}: face with {len(parts) - 1} vertices")
            if group not in panel_assignment:
                raise MissingGroup(f"group {group!r} has no panel assignment",
                                   entity=group)
            idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
            triangles.append(idx)
            panel_ids.append(int(panel_assignment[group]))
    return Mesh3(np.asarray(vertices, dtype=np.float64),
                 np.asarray(triangles, dtype=np.int64).reshape(-1, 3),
                 np.asarray(panel_ids, dtype=np.int64))


# ---------------------------------------------------------------------------
# SVG export

SVG_GAP = 2.0  # cm between panels


def _fmt(x):
    return "%.9g" % x


def _path(points, offset):
    cmds = []
    for n, p in enumerate(points):
        tag = "M" if n == 0 else "L"
        cmds.append(f"{tag} {_fmt(p[0] + offset[0])} {_fmt(p[1] + offset[1])}")
    cmds.append("Z")
    return " ".join(cmds)


def export_pattern_svg(panels, originals=None):
    """Deterministic SVG: one closed boundary path per panel, 1 unit = 1 cm.

    Panels lay out left to right with 2 cm gaps; when `originals` supplies
    the pre-edit panels, their boundaries are drawn dashed with the same
    per-panel offset so the change is visible as an overlay.
    """
    paths = []
    cursor = 0.0
    max_h = 0.0
    for pid in sorted(panels):
        panel = panels[pid]
        pts = panel.vertices2d[panel.boundary]
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        offset = (cursor - lo[0], -lo[1])
        paths.append(
            f'<path d="{_path(pts, offset)}" fill="none" stroke="black" '
            f'stroke-width="0.05"/>')
        if originals and pid in originals:
            orig = originals[pid]
            opts = orig.vertices2d[orig.boundary]
            paths.append(
                f'<path d="{_path(opts, offset)}" fill="none" stroke="gray" '
                f'stroke-width="0.05" stroke-dasharray="0.3 0.2"/>')
        cursor += (hi[0] - lo[0]) + SVG_GAP
        max_h = max(max_h, hi[1] - lo[1])
    width = max(cursor - SVG_GAP, 0.0)
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(max_h)}" '
        f'width="{_fmt(width)}cm" height="{_fmt(max_h)}cm">\n'
        + "\n".join(paths) + "\n</svg>\n"
    )
    return svg.encode()
