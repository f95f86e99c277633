"""Garment document: body, 3D garment, panels, seams, and edit orchestration.

The document owns the correspondence between the 3D garment and its 2D
panels plus the cached intrinsic scale map.  apply_edit routes geometric
edits (scale, seam move) through the scale-preserving pattern update and
topology edits (cut, shorten, extend) through direct panel transfer.
"""

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import editops as ops
from .errors import ValidationError
from .flatten import compute_intrinsic_scale_map, update_pattern
from .geometry import SymmetryInfo, mirror_edit


@dataclass
class GarmentDocument:
    body: object  # BodyModel
    garment: object  # Mesh3
    panels: dict  # panel id -> Panel
    seams: list = field(default_factory=list)
    symmetry: object = None  # SymmetryInfo or None
    scale_maps: dict = field(default_factory=dict)  # panel id -> IntrinsicScaleMap
    history: list = field(default_factory=list)  # applied op records

    def panel_garment_tris(self, pid):
        return self.garment.panel_triangle_indices(pid)

    def refresh_scale_maps(self):
        self.scale_maps = {
            pid: compute_intrinsic_scale_map(panel, self.garment,
                                             self.panel_garment_tris(pid))
            for pid, panel in self.panels.items()
        }

    def copy(self):
        return GarmentDocument(
            self.body,
            self.garment.copy(),
            {pid: p.copy() for pid, p in self.panels.items()},
            list(self.seams),
            self.symmetry,
            dict(self.scale_maps),
            list(self.history),
        )

    def content_hash(self):
        from .formats import save_document

        return hashlib.sha256(save_document(self)).hexdigest()

    def validate(self):
        g = self.garment
        if not np.isfinite(g.vertices).all():
            raise ValidationError("garment has non-finite coordinates",
                                  entity="garment")
        if len(g.triangles) and int(g.triangles.max()) >= len(g.vertices):
            raise ValidationError("garment triangle index out of range",
                                  entity="garment")
        seen_pids = set(int(p) for p in g.panel_ids)
        if seen_pids != set(self.panels):
            raise ValidationError(
                f"panel ids {sorted(self.panels)} do not match garment panel "
                f"ids {sorted(seen_pids)}", entity="garment")
        for pid, panel in self.panels.items():
            name = f"panel {pid}"
            if not np.isfinite(panel.vertices2d).all():
                raise ValidationError("non-finite 2D coordinates", entity=name)
            rows = self.panel_garment_tris(pid)
            if len(rows) != len(panel.triangles):
                raise ValidationError(
                    f"{len(panel.triangles)} panel triangles vs "
                    f"{len(rows)} garment triangles", entity=name)
            if len(panel.corr) != len(panel.vertices2d):
                raise ValidationError("corr length mismatch", entity=name)
            if len(panel.triangles) and \
                    int(panel.triangles.max()) >= len(panel.vertices2d):
                raise ValidationError("panel triangle index out of range",
                                      entity=name)
            if len(set(int(v) for v in panel.corr)) != len(panel.corr):
                raise ValidationError("corr is not a bijection", entity=name)
            if not (g.triangles[rows] == panel.corr[panel.triangles]).all():
                raise ValidationError(
                    "panel triangles disagree with garment triangles through "
                    "corr", entity=name)
            if len(panel.boundary) and \
                    int(panel.boundary.max()) >= len(panel.vertices2d):
                raise ValidationError("boundary index out of range", entity=name)
        for s, seam in enumerate(self.seams):
            for chain in (seam.vertices_a(), seam.vertices_b()):
                if len(chain) and int(chain.max()) >= len(g.vertices):
                    raise ValidationError("seam vertex out of range",
                                          entity=f"seam {s}")
        return self


def build_symmetry(garment, panels, seams, plane_point, plane_normal, tol=1e-6):
    """Correspondence maps for a declared left-right symmetry plane.

    Vertices, triangles, panels and seams are paired by reflecting across
    the plane and nearest-point matching within `tol`; anything without a
    counterpart maps to -1 (and fails only if an edit references it).
    """
    plane_point = np.asarray(plane_point, dtype=np.float64)
    plane_normal = np.asarray(plane_normal, dtype=np.float64)
    plane_normal = plane_normal / np.linalg.norm(plane_normal)

    v = garment.vertices
    reflected = v - 2.0 * ((v - plane_point) @ plane_normal)[:, None] * plane_normal
    tree = cKDTree(v)
    dist, idx = tree.query(reflected, distance_upper_bound=tol)
    vertex_map = np.where(np.isfinite(dist), idx, -1).astype(np.int64)

    tri_lookup = {frozenset(int(x) for x in tri): row
                  for row, tri in enumerate(garment.triangles)}
    triangle_map = np.full(len(garment.triangles), -1, dtype=np.int64)
    panel_pairs = {}
    for row, tri in enumerate(garment.triangles):
        mapped = [int(vertex_map[x]) for x in tri]
        if -1 in mapped:
            continue
        other = tri_lookup.get(frozenset(mapped), -1)
        triangle_map[row] = other
        if other >= 0:
            panel_pairs[int(garment.panel_ids[row])] = int(garment.panel_ids[other])

    seam_keys = [frozenset(int(x) for x in np.concatenate([s.vertices_a(),
                                                           s.vertices_b()]))
                 for s in seams]
    seam_map = {}
    for a, key in enumerate(seam_keys):
        mapped = frozenset(int(vertex_map[x]) for x in key)
        if -1 in mapped:
            continue
        for b, other in enumerate(seam_keys):
            if other == mapped:
                seam_map[a] = b
                break
    return SymmetryInfo(plane_point, plane_normal, panel_pairs, vertex_map,
                        triangle_map, seam_map)


def refresh_symmetry(doc):
    """Rebuild symmetry correspondence maps after a topology change."""
    if doc.symmetry is None:
        return
    doc.symmetry = build_symmetry(doc.garment, doc.panels, doc.seams,
                                  doc.symmetry.plane_point,
                                  doc.symmetry.plane_normal)


@dataclass
class EditResult:
    document: GarmentDocument
    affected: set
    traces: dict  # panel id -> solver energy trace


def apply_edit(doc, op, mirror=False, asap_override=None, config=None):
    """Apply one edit (optionally with its mirrored twin) to the document.

    Returns an EditResult with a new document; the input document is never
    modified, so a failed op leaves the caller's state untouched.  Neutral
    parameters short-circuit to the identical document (bitwise stable).
    """
    if op.is_identity():
        return EditResult(doc, set(), {})

    pending = [op]
    if mirror:
        twin = mirror_edit(op, doc.symmetry)
        if twin.params != op.params:
            pending.append(twin)

    out = doc.copy()
    affected = set()
    traces = {}
    if op.kind in ("scale_region", "move_seam"):
        mesh = out.garment
        for one in pending:
            p = one.params
            if one.kind == "scale_region":
                mesh, touched = ops.scale_region(mesh, out.body, p["region"],
                                                 p["mode"], p["factor"])
            else:
                mesh, touched = ops.move_seam(mesh, out.body, out.seams,
                                              p["seam"], p["mode"], p["offset"],
                                              p["fixed_far"])
            affected |= touched
        panels, traces = update_pattern(out, mesh, affected,
                                        asap_override=asap_override,
                                        config=config)
        out.garment = mesh
        out.panels = panels
    else:
        for one in pending:
            p = one.params
            if one.kind == "cut":
                res = ops.cut_by_sketch(out.garment, out.panels, p["sketch"],
                                        p["camera"], p["both_sides"], p["keep"])
            elif one.kind == "shorten":
                res = ops.shorten(out.garment, out.panels, p["boundary"],
                                  p["distance"])
            else:  # extend
                res = ops.extend(out.garment, out.panels, out.body,
                                 p["boundary"], p["distance"])
            out.garment = res.garment
            out.panels = res.panels
        # triangles that did not exist before the edit, robust across the
        # reindexing a second (mirrored) topology change causes
        base_tris = set(frozenset(int(v) for v in tri) for tri in doc.garment.triangles)
        affected = set(row for row, tri in enumerate(out.garment.triangles)
                       if frozenset(int(v) for v in tri) not in base_tris)
        if (not affected
                and len(out.garment.vertices) == len(doc.garment.vertices)
                and np.array_equal(out.garment.triangles, doc.garment.triangles)
                and np.array_equal(out.garment.panel_ids, doc.garment.panel_ids)):
            # e.g. a cut whose level line snapped onto an existing boundary:
            # nothing changed, so keep the document bitwise identical
            return EditResult(doc, set(), {})
        out.seams = _surviving_seams(out.seams, out.garment)
        out.refresh_scale_maps()
        refresh_symmetry(out)

    out.history = out.history + [{"kind": op.kind, "params": op.params,
                                  "mirror": bool(mirror)}]
    return EditResult(out, affected, traces)


def replay(base_doc, records, asap_override=None, config=None):
    """Deterministically re-apply a history of op records to a base document."""
    doc = base_doc
    for rec in records:
        result = apply_edit(doc, ops.EditOp(rec["kind"], rec["params"]),
                            mirror=rec.get("mirror", False),
                            asap_override=asap_override, config=config)
        doc = result.document
    return doc


def _surviving_seams(seams, garment):
    used = set(int(v) for v in np.unique(garment.triangles))
    out = []
    for seam in seams:
        verts = set(int(v) for v in np.concatenate([seam.vertices_a(),
                                                    seam.vertices_b()]))
        if verts <= used:
            out.append(seam)
    return out
