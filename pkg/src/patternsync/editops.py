"""3D editing operations: regional scale, seam move, cut, shorten, extend.

Each operation produces an edited garment plus the set of affected
triangles.  Scale and seam moves change geometry only and delegate the
pattern update to the flattening solver; cut, shorten and extend change
topology and update the 2D panels directly by barycentric transfer, never
re-flattening existing vertices.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DisconnectedRegion,
    EmptyIsoline,
    InvalidFactor,
    NoBoundary,
    NoIntersection,
    NoNearbyBone,
    OffsetOutOfRange,
    SeamNotFound,
    SelfIntersection,
)
from .geometry import (
    Mesh3,
    Panel,
    boundary_edges,
    boundary_loops,
    connected_components,
    geodesic_from_boundary,
)

EDIT_KINDS = ("scale_region", "move_seam", "cut", "shorten", "extend")


@dataclass
class EditOp:
    """One user edit: kind plus JSON-serializable parameters."""

    kind: str
    params: dict

    def __post_init__(self):
        if self.kind not in EDIT_KINDS:
            raise ValueError(f"unknown edit kind {self.kind!r}")
        self.params = normalize_params(self.kind, self.params)

    def to_record(self):
        return {"kind": self.kind, "params": self.params}

    @classmethod
    def from_record(cls, record):
        return cls(record["kind"], record["params"])

    def is_identity(self):
        if self.kind == "scale_region":
            return self.params["factor"] == 1.0
        if self.kind == "move_seam":
            return self.params["offset"] == 0.0
        if self.kind in ("shorten", "extend"):
            return self.params["distance"] == 0.0
        return False


def normalize_params(kind, params):
    params = dict(params)
    if kind == "scale_region":
        region = dict(params["region"])
        region["triangles"] = sorted(int(t) for t in region["triangles"])
        region["anchors"] = sorted(int(v) for v in region.get("anchors", []))
        params["region"] = region
        params["mode"] = str(params.get("mode", "along"))
        params["factor"] = float(params["factor"])
    elif kind == "move_seam":
        params["seam"] = int(params["seam"])
        params["mode"] = str(params.get("mode", "along"))
        params["offset"] = float(params["offset"])
        params["fixed_far"] = bool(params.get("fixed_far", False))
    elif kind in ("shorten", "extend"):
        params["boundary"] = [int(v) for v in params["boundary"]]
        params["distance"] = float(params["distance"])
    elif kind == "cut":
        params["sketch"] = [[float(x), float(y)] for x, y in params["sketch"]]
        cam = dict(params["camera"])
        for key in ("origin", "dir", "up", "right"):
            cam[key] = [float(c) for c in cam[key]]
        params["camera"] = cam
        params["both_sides"] = bool(params.get("both_sides", True))
        params["keep"] = str(params.get("keep", "positive"))
    return params


# ---------------------------------------------------------------------------
# skeleton helpers


def _segment_distances(points, seg):
    a, b = seg
    d = b - a
    t = np.clip(((points - a) @ d) / max(d @ d, 1e-30), 0.0, 1.0)
    closest = a + t[:, None] * d
    return np.linalg.norm(points - closest, axis=1)


def nearest_bone(body, points):
    """Bone index with the smallest mean distance to the given points."""
    if len(body.skeleton) == 0:
        raise NoNearbyBone("body has no skeleton")
    means = [float(_segment_distances(points, seg).mean()) for seg in body.skeleton]
    return int(np.argmin(means))


def _bone_frame(body, bone):
    a, b = body.skeleton[bone]
    axis = b - a
    axis = axis / max(np.linalg.norm(axis), 1e-30)
    return a, axis


# ---------------------------------------------------------------------------
# scale / seam


def scale_region(garment, body, region, mode, factor):
    """Scale a garment region along or perpendicular to its nearest bone.

    Region vertices move with the full factor; the rim ring (region
    vertices that touch the outside) gets the midpoint factor so the
    transition does not crease; anchors never move.
    """
    if not (0.1 < factor < 10.0):
        raise InvalidFactor(f"scale factor {factor} outside (0.1, 10)")
    tris = np.asarray(region["triangles"], dtype=np.int64)
    if len(tris) == 0:
        raise DisconnectedRegion("region is empty")
    if factor == 1.0:
        return garment, set(int(t) for t in tris)
    anchors = set(region.get("anchors", []))
    labels, count = connected_components(garment.triangles[tris])
    if count > 1:
        raise DisconnectedRegion(f"region splits into {count} components")

    region_set = set(int(t) for t in tris)
    region_verts = set(int(v) for t in tris for v in garment.triangles[t])
    outside_verts = set(
        int(v) for t in range(len(garment.triangles)) if t not in region_set
        for v in garment.triangles[t])
    rim = (region_verts & outside_verts) - anchors
    moving = region_verts - anchors

    bone = nearest_bone(body, garment.vertices[sorted(region_verts)])
    origin, axis = _bone_frame(body, bone)

    axial = (garment.vertices - origin) @ axis
    if anchors:
        ref_a = float(np.mean([axial[v] for v in anchors]))
    else:
        ref_a = float(min(axial[v] for v in region_verts))

    out = garment.copy()
    for v in moving:
        f = 0.5 * (1.0 + factor) if v in rim else factor
        p = garment.vertices[v]
        if mode == "along":
            out.vertices[v] = p + (f - 1.0) * (axial[v] - ref_a) * axis
        else:  # perpendicular
            foot = origin + axial[v] * axis
            out.vertices[v] = foot + f * (p - foot)
    affected = set(
        int(t) for t in range(len(garment.triangles))
        if any(int(v) in moving for v in garment.triangles[t]))
    return out, affected


def move_seam(garment, body, seams, seam_index, mode, offset, fixed_far=False):
    """Move a seam line along or radially off the nearest bone.

    The part the seam moves toward is compressed by an affine rescale of
    the moved coordinate; the other part stretches the same way when its
    far boundary is fixed, otherwise it translates rigidly with the seam.
    """
    if seam_index < 0 or seam_index >= len(seams):
        raise SeamNotFound(f"seam {seam_index} does not exist")
    if offset == 0.0:
        seam = seams[seam_index]
        parts = _seam_parts(garment, seam)
        affected = set()
        for pid in parts:
            affected |= set(int(t) for t in garment.panel_triangle_indices(pid))
        return garment, affected
    seam = seams[seam_index]
    seam_verts = np.concatenate([seam.vertices_a(), seam.vertices_b()])
    bone = nearest_bone(body, garment.vertices[seam_verts])
    origin, axis = _bone_frame(body, bone)
    axial = (garment.vertices - origin) @ axis
    seam_a = float(axial[seam_verts].mean())

    parts = _seam_parts(garment, seam)
    part_info = []
    for pid in parts:
        rows = garment.panel_triangle_indices(pid)
        verts = np.unique(garment.triangles[rows])
        lo, hi = float(axial[verts].min()), float(axial[verts].max())
        far = hi if abs(hi - seam_a) > abs(lo - seam_a) else lo
        part_info.append((pid, verts, far))
    toward = [p for p in part_info if np.sign(p[2] - seam_a) == np.sign(offset)]
    away = [p for p in part_info if p not in toward]
    if not toward:
        raise OffsetOutOfRange("no garment part lies in the offset direction")
    for _, _, far in toward:
        if abs(offset) >= abs(seam_a - far):
            raise OffsetOutOfRange(
                f"offset {offset} exceeds the adjacent part's extent {abs(seam_a - far):g}")

    new_seam = seam_a + offset
    out = garment.copy()

    def radial_unit(v):
        foot = origin + axial[v] * axis
        r = garment.vertices[v] - foot
        n = np.linalg.norm(r)
        return r / n if n > 1e-12 else np.zeros(3)

    def apply_part(verts, far, rescale):
        for v in verts:
            if rescale:
                mu = (axial[v] - far) / (seam_a - far) if seam_a != far else 1.0
            else:
                mu = 1.0
            if mode == "along":
                if rescale:
                    new_a = far + (axial[v] - far) * (new_seam - far) / (seam_a - far)
                    out.vertices[v] = garment.vertices[v] + (new_a - axial[v]) * axis
                else:
                    out.vertices[v] = garment.vertices[v] + offset * axis
            else:  # perpendicular
                out.vertices[v] = garment.vertices[v] + mu * offset * radial_unit(v)

    for _, verts, far in toward:
        apply_part(verts, far, rescale=True)
    for _, verts, far in away:
        apply_part(verts, far, rescale=fixed_far)

    affected = set()
    for pid, _, _ in part_info:
        affected |= set(int(t) for t in garment.panel_triangle_indices(pid))
    return out, affected


def _seam_parts(garment, seam):
    """Panel ids of the two parts joined by a seam."""
    pids = []
    for verts in (seam.vertices_a(), seam.vertices_b()):
        vset = set(int(v) for v in verts)
        for t, tri in enumerate(garment.triangles):
            if vset & set(int(v) for v in tri):
                pids.append(int(garment.panel_ids[t]))
                break
        else:
            raise SeamNotFound("seam chain references vertices absent from the garment")
    return sorted(set(pids))


# ---------------------------------------------------------------------------
# cut by scalar field (shared by sketch cut and shorten)


@dataclass
class CutResult:
    garment: Mesh3
    panels: dict  # pid -> Panel
    affected: set  # new-mesh triangle indices produced by splitting
    cut_vertices: list = field(default_factory=list)  # new 3D vertex ids on the cut


def cut_by_scalar_field(garment, panels, phi, keep="positive", eligible=None,
                        snap_tol=1e-4):
    """Cut the garment along the zero level of a per-vertex field.

    Crossed triangles are re-triangulated so the level line becomes mesh
    edges; new vertices transfer to 2D through the edge interpolation
    parameter (the barycentric coordinate along the split edge).  `keep`
    selects the positive side, the negative side, or both (splitting
    panels into separate pieces).  Crossings within `snap_tol` cm of an
    existing vertex snap onto it instead of creating a sliver.
    """
    phi = np.array(phi, dtype=np.float64)
    phi[~np.isfinite(phi)] = 1.0
    tris = garment.triangles
    eligible_set = set(range(len(tris))) if eligible is None else set(int(t) for t in eligible)

    # snap: crossings too close to an endpoint pull that endpoint onto the cut
    for _ in range(4):
        changed = False
        for t in eligible_set:
            for k in range(3):
                i, j = int(tris[t, k]), int(tris[t, (k + 1) % 3])
                if phi[i] * phi[j] < 0:
                    lam = phi[i] / (phi[i] - phi[j])
                    length = np.linalg.norm(garment.vertices[j] - garment.vertices[i])
                    if lam * length < snap_tol:
                        phi[i] = 0.0
                        changed = True
                    elif (1 - lam) * length < snap_tol:
                        phi[j] = 0.0
                        changed = True
        if not changed:
            break

    # one new 3D vertex per crossed undirected edge
    n_old = len(garment.vertices)
    crossings = {}  # (min,max) -> (new 3D vertex id, lam from min endpoint)
    new_verts3 = []
    for t in sorted(eligible_set):
        for k in range(3):
            i, j = int(tris[t, k]), int(tris[t, (k + 1) % 3])
            a, b = min(i, j), max(i, j)
            if (a, b) in crossings or phi[a] * phi[b] >= 0:
                continue
            lam = phi[a] / (phi[a] - phi[b])
            pos = (1 - lam) * garment.vertices[a] + lam * garment.vertices[b]
            crossings[(a, b)] = (n_old + len(new_verts3), lam)
            new_verts3.append(pos)
    garment_vertices = [np.vstack([garment.vertices] + ([new_verts3] if new_verts3 else []))]
    inv_corr = {}
    for pid, panel in panels.items():
        for lv, gv in enumerate(panel.corr):
            inv_corr[int(gv)] = (pid, lv)

    pieces = []  # (source pid, [(side, local tri, from_split)], panel-local additions)
    for pid in sorted(panels):
        panel = panels[pid]
        rows = garment.panel_triangle_indices(pid)
        extra2d = []
        cross_local = {}  # (a,b) garment edge -> local vertex id
        cross_garment = {}  # local vertex id -> garment vertex id

        def local_of(gv):
            return inv_corr[gv][1]

        def cross_vertex(a, b):
            key = (a, b)
            if key in cross_local:
                return cross_local[key]
            gid, lam = crossings[key]
            la, lb = local_of(a), local_of(b)
            pos2 = (1 - lam) * panel.vertices2d[la] + lam * panel.vertices2d[lb]
            lv = len(panel.vertices2d) + len(extra2d)
            extra2d.append(pos2)
            cross_local[key] = lv
            cross_garment[lv] = gid
            return lv

        entries = []  # (side, local tri (3 ids), from_split)
        for i, row in enumerate(rows):
            tri_g = [int(v) for v in tris[row]]
            tri_l = [int(v) for v in panel.triangles[i]]
            vphi = [phi[v] for v in tri_g]
            has_pos = any(p > 0 for p in vphi)
            has_neg = any(p < 0 for p in vphi)
            crossed_edges = [
                (min(tri_g[k], tri_g[(k + 1) % 3]), max(tri_g[k], tri_g[(k + 1) % 3]))
                for k in range(3)
                if (min(tri_g[k], tri_g[(k + 1) % 3]),
                    max(tri_g[k], tri_g[(k + 1) % 3])) in crossings]
            if row not in eligible_set or not (has_pos and has_neg):
                if not crossed_edges:
                    if has_pos and not has_neg:
                        side = 1
                    elif has_neg and not has_pos:
                        side = -1
                    elif not has_pos and not has_neg:
                        side = 1  # fully on the cut line
                    else:
                        side = 0  # crossing but exempt from cutting
                    entries.append((side, tri_l, False))
                    continue
                # exempt triangle sharing a split edge with a cut neighbor:
                # split the edge too (keeping the mesh conforming) but stay
                # whole across the cut
                cycle = []
                for k in range(3):
                    gi, gj = tri_g[k], tri_g[(k + 1) % 3]
                    cycle.append(tri_l[k])
                    key = (min(gi, gj), max(gi, gj))
                    if key in crossings:
                        cycle.append(cross_vertex(*key))
                start = next(ci for ci, v in enumerate(cycle)
                             if v >= len(panel.vertices2d))
                cycle = cycle[start:] + cycle[:start]
                for t2 in range(1, len(cycle) - 1):
                    entries.append((0, [cycle[0], cycle[t2], cycle[t2 + 1]], True))
                continue
            # walk the triangle, inserting the crossing points
            cycle = []  # (local id, phi value)
            for k in range(3):
                gi, gj = tri_g[k], tri_g[(k + 1) % 3]
                cycle.append((tri_l[k], vphi[k]))
                a, b = min(gi, gj), max(gi, gj)
                if phi[a] * phi[b] < 0:
                    cycle.append((cross_vertex(a, b), 0.0))
            zeros = [ci for ci, (_, p) in enumerate(cycle) if p == 0.0]
            assert len(zeros) == 2, "crossed triangle must have exactly two cut points"
            arcs = [
                [cycle[ci % len(cycle)] for ci in range(zeros[0], zeros[1] + 1)],
                [cycle[ci % len(cycle)] for ci in range(zeros[1], zeros[0] + len(cycle) + 1)],
            ]
            for arc in arcs:
                strict = [p for _, p in arc if p != 0.0]
                if len(arc) < 3 or not strict:
                    continue
                side = 1 if strict[0] > 0 else -1
                for t2 in range(1, len(arc) - 1):
                    entries.append((side, [arc[0][0], arc[t2][0], arc[t2 + 1][0]], True))

        if keep == "positive":
            kept = [e for e in entries if e[0] >= 0]
        elif keep == "negative":
            kept = [e for e in entries if e[0] <= 0]
        else:
            kept = entries
        if not kept:
            continue
        pieces.append((pid, panel, kept, panel.vertices2d, extra2d, cross_garment))

    return _reassemble(garment, garment_vertices, pieces, panels, crossings)


def _reassemble(garment, garment_vertices, pieces, panels, crossings):
    """Split kept triangles into components and rebuild garment + panels."""
    vert_stack = [garment_vertices[0]]
    extra3 = []

    next_pid = (max(panels) + 1) if panels else 0
    new_panels = {}
    new_tris = []
    new_pids = []
    affected = set()

    for pid, panel, kept, base2d, extra2d, cross_garment in pieces:
        all2d = np.vstack([base2d] + ([extra2d] if extra2d else []))

        def garment_vertex(lv):
            if lv < len(panel.corr):
                return int(panel.corr[lv])
            return int(cross_garment[lv])

        # components with the cut as a barrier: tris adjacent only when they
        # share an edge and sit on compatible sides
        m = len(kept)
        edge_owner = {}
        adj = [[] for _ in range(m)]
        for f, (side, tri, _) in enumerate(kept):
            for k in range(3):
                key = tuple(sorted((tri[k], tri[(k + 1) % 3])))
                if key in edge_owner:
                    g = edge_owner[key]
                    gs = kept[g][0]
                    if side == gs or side == 0 or gs == 0:
                        adj[f].append(g)
                        adj[g].append(f)
                else:
                    edge_owner[key] = f
        labels = np.full(m, -1)
        count = 0
        for f in range(m):
            if labels[f] >= 0:
                continue
            stack = [f]
            labels[f] = count
            while stack:
                g = stack.pop()
                for h in adj[g]:
                    if labels[h] < 0:
                        labels[h] = count
                        stack.append(h)
            count += 1

        claimed = {}  # local vertex -> component that keeps the original id
        for comp in range(count):
            comp_tris = [kept[f] for f in range(m) if labels[f] == comp]
            used = sorted(set(v for _, tri, _ in comp_tris for v in tri))
            remap2d = {}
            verts2d = []
            corr = []
            for v in used:
                owner = claimed.setdefault(v, comp)
                remap2d[v] = len(verts2d)
                verts2d.append(all2d[v])
                gv = garment_vertex(v)
                if owner != comp:
                    # duplicate a cut vertex shared with an earlier component
                    dup_id = len(vert_stack[0]) + len(extra3)
                    extra3.append(_vertex_position(vert_stack[0], extra3, gv))
                    gv = dup_id
                corr.append(gv)
            tris_local = [[remap2d[v] for v in tri] for _, tri, _ in comp_tris]
            loops = boundary_loops(np.asarray(tris_local))
            boundary = max(loops, key=len) if loops else np.zeros(0, dtype=np.int64)
            out_pid = pid if comp == 0 else next_pid
            if comp > 0:
                next_pid += 1
            new_panels[out_pid] = Panel(np.asarray(verts2d), np.asarray(tris_local),
                                        boundary, np.asarray(corr))
            for (side, tri, from_split), tl in zip(comp_tris, tris_local):
                row = len(new_tris)
                new_tris.append([new_panels[out_pid].corr[v] for v in tl])
                new_pids.append(out_pid)
                if from_split:
                    affected.add(row)

    all_vertices = np.vstack([vert_stack[0]] + ([extra3] if extra3 else []))
    new_garment = Mesh3(all_vertices, np.asarray(new_tris, dtype=np.int64),
                        np.asarray(new_pids, dtype=np.int64))
    cut_ids = sorted(gid for gid, _ in crossings.values())
    return CutResult(new_garment, new_panels, affected, cut_ids)


def _vertex_position(base, extra, gv):
    if gv < len(base):
        return base[gv]
    return extra[gv - len(base)]


# ---------------------------------------------------------------------------
# sketch cut


def _camera_axes(camera):
    origin = np.asarray(camera["origin"], dtype=np.float64)
    direction = np.asarray(camera["dir"], dtype=np.float64)
    up = np.asarray(camera["up"], dtype=np.float64)
    right = np.asarray(camera["right"], dtype=np.float64)
    return origin, direction / np.linalg.norm(direction), up, right


def _signed_side(points2, sketch):
    """Signed distance of screen points to the sketch polyline.

    The first and last segments extend to infinity so the cut always
    spans the garment.  Positive on the left of the sketch direction.
    """
    sketch = np.asarray(sketch, dtype=np.float64)
    segs = list(zip(sketch[:-1], sketch[1:]))
    last = len(segs) - 1
    out = np.empty(len(points2))
    for n, p in enumerate(points2):
        best = None
        for si, (a, b) in enumerate(segs):
            d = b - a
            t = ((p - a) @ d) / max(d @ d, 1e-30)
            lo = -np.inf if si == 0 else 0.0
            hi = np.inf if si == last else 1.0
            closest = a + np.clip(t, lo, hi) * d
            dist = np.linalg.norm(p - closest)
            cross = d[0] * (p[1] - a[1]) - d[1] * (p[0] - a[0])
            side = np.sign(cross) if cross != 0 else 1.0
            if best is None or dist < best[0]:
                best = (dist, side)
        out[n] = best[0] * best[1]
    return out


def _ray_hits_mesh(origin, direction, garment):
    v = garment.vertices
    for tri in garment.triangles:
        if _ray_triangle(origin, direction, v[tri[0]], v[tri[1]], v[tri[2]]) is not None:
            return True
    return False


def _ray_triangle(o, d, p0, p1, p2, eps=1e-12):
    e1, e2 = p1 - p0, p2 - p0
    h = np.cross(d, e2)
    a = e1 @ h
    if abs(a) < eps:
        return None
    f = 1.0 / a
    s = o - p0
    u = f * (s @ h)
    if u < -1e-9 or u > 1 + 1e-9:
        return None
    q = np.cross(s, e1)
    v = f * (d @ q)
    if v < -1e-9 or u + v > 1 + 1e-9:
        return None
    t = f * (e2 @ q)
    return t if t > eps else None


def cut_by_sketch(garment, panels, sketch, camera, both_sides=True, keep="positive"):
    """Cut along the user's screen-space sketch swept through the garment.

    Every mesh vertex gets a signed screen distance to the sketch; the zero
    level of that field is the cutting loop (front and back when
    both_sides).  With both_sides off, only camera-facing triangles are
    re-triangulated.
    """
    sketch = np.asarray(sketch, dtype=np.float64)
    if len(sketch) < 2:
        raise NoIntersection("sketch needs at least two points")
    origin, direction, up, right = _camera_axes(camera)

    hit = False
    for a, b in zip(sketch[:-1], sketch[1:]):
        for t in np.linspace(0.0, 1.0, 33):
            sx, sy = (1 - t) * a + t * b
            if _ray_hits_mesh(origin + sx * right + sy * up, direction, garment):
                hit = True
                break
        if hit:
            break
    if not hit:
        raise NoIntersection("sketch does not project onto the garment")

    rel = garment.vertices - origin
    points2 = np.stack([rel @ right, rel @ up], axis=1)
    phi = _signed_side(points2, sketch)

    eligible = None
    if not both_sides:
        normals = garment.triangle_normals()
        eligible = [t for t in range(len(garment.triangles))
                    if normals[t] @ direction < 0]
    return cut_by_scalar_field(garment, panels, phi, keep=keep, eligible=eligible)


# ---------------------------------------------------------------------------
# shorten / extend


def shorten(garment, panels, boundary_chain, distance):
    """Remove the strip within `distance` of a boundary chain.

    Geodesic (graph) distances from the chain define a scalar field whose
    iso-line at `distance` becomes the new boundary via the cut machinery.
    """
    chain = [int(v) for v in boundary_chain]
    if not chain:
        raise NoBoundary("empty boundary chain")
    dist = geodesic_from_boundary(garment, chain)
    finite = dist[np.isfinite(dist)]
    if distance >= float(finite.max()):
        raise EmptyIsoline(
            f"distance {distance:g} exceeds the garment extent {float(finite.max()):g}")
    phi = dist - distance
    return cut_by_scalar_field(garment, panels, phi, keep="positive")


def extend(garment, panels, body, boundary_chain, distance):
    """Append a boundary strip continuing the surface's tangent plane.

    New vertices go outward, in the average adjacent tangent plane and
    perpendicular to the boundary; strip triangles copy their neighbor's
    orientation.  The 2D panel gains the matching strip by rigidly
    attaching each new triangle to the 2D image of the shared edge.  Body
    collisions are resolved afterwards (3D only).
    """
    chain = [int(v) for v in boundary_chain]
    if len(chain) < 2:
        raise NoBoundary("boundary chain needs at least two vertices")
    bedges = set(boundary_edges(garment.triangles))
    closed = len(chain) > 2 and (chain[-1], chain[0]) in bedges
    pairs = list(zip(chain, chain[1:])) + ([(chain[-1], chain[0])] if closed else [])
    for a, b in pairs:
        if (a, b) not in bedges:
            raise NoBoundary(f"({a},{b}) is not a boundary edge in chain order")

    tri_of_edge = {}
    for row, tri in enumerate(garment.triangles):
        for k in range(3):
            tri_of_edge[(int(tri[k]), int(tri[(k + 1) % 3]))] = row
    pid = int(garment.panel_ids[tri_of_edge[pairs[0]]])
    panel = panels[pid]

    normals = garment.triangle_normals()
    vert_tris = {}
    for row, tri in enumerate(garment.triangles):
        if garment.panel_ids[row] != pid:
            continue
        for v in tri:
            vert_tris.setdefault(int(v), []).append(row)

    # outward in-plane direction per chain vertex
    dirs = {}
    for idx, v in enumerate(chain):
        prev_v = chain[idx - 1] if (idx > 0 or closed) else None
        next_v = chain[idx + 1] if idx + 1 < len(chain) else (chain[0] if closed else None)
        if prev_v is not None and next_v is not None:
            tangent = garment.vertices[next_v] - garment.vertices[prev_v]
        elif next_v is not None:
            tangent = garment.vertices[next_v] - garment.vertices[v]
        else:
            tangent = garment.vertices[v] - garment.vertices[prev_v]
        n = np.mean([normals[t] for t in vert_tris[v]], axis=0)
        d = np.cross(tangent, n)
        nd = np.linalg.norm(d)
        if nd < 1e-12:
            raise NoBoundary(f"degenerate boundary direction at vertex {v}")
        dirs[v] = d / nd

    out = garment.copy()
    n_old = len(out.vertices)
    ring = {}  # chain vertex -> new garment vertex id
    ring_pos = []
    for v in chain:
        ring[v] = n_old + len(ring_pos)
        ring_pos.append(garment.vertices[v] + distance * dirs[v])
    out.vertices = np.vstack([out.vertices, ring_pos])

    for a, b in pairs:
        seg_new = out.vertices[ring[b]] - out.vertices[ring[a]]
        seg_old = garment.vertices[b] - garment.vertices[a]
        if float(seg_new @ seg_old) <= 0:
            raise SelfIntersection(
                "extension strip folds over itself; reduce the distance")

    new_panel = panel.copy()
    inv_corr = {int(gv): lv for lv, gv in enumerate(panel.corr)}
    verts2d = list(new_panel.vertices2d)
    corr = list(new_panel.corr)
    ring2d = {}  # garment ring vertex -> panel-local id

    def place_third(shared_a, shared_b, target, a2, b2):
        """2D position of `target` rigidly attached to edge (a2, b2)."""
        pa, pb, pt = out.vertices[shared_a], out.vertices[shared_b], out.vertices[target]
        e = pb - pa
        ee = max(e @ e, 1e-30)
        alpha = ((pt - pa) @ e) / ee
        perp3 = (pt - pa) - alpha * e
        beta = np.linalg.norm(perp3) / np.sqrt(ee)
        e2 = b2 - a2
        perp2 = np.array([-e2[1], e2[0]])
        return a2 + alpha * e2 + beta * perp2

    def local2d(gv):
        if gv in ring2d:
            return ring2d[gv]
        return inv_corr[gv]

    tris3 = []
    tris2 = []
    for a, b in pairs:
        a_new, b_new = ring[a], ring[b]
        for tri in ([b, a, a_new], [b, a_new, b_new]):
            sa, sb, tgt = tri
            la, lb = local2d(sa), local2d(sb)
            if tgt not in ring2d:
                p2 = place_third(sa, sb, tgt, np.asarray(verts2d[la]), np.asarray(verts2d[lb]))
                ring2d[tgt] = len(verts2d)
                verts2d.append(p2)
                corr.append(tgt)
            tris3.append(tri)
            tris2.append([la, lb, ring2d[tgt]])

    tris2_arr = np.asarray(tris2)
    p = np.asarray(verts2d)[tris2_arr]
    u = p[:, 1] - p[:, 0]
    w = p[:, 2] - p[:, 0]
    if np.any(u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0] <= 0):
        raise SelfIntersection("extension strip folds over itself; reduce the distance")

    first_new_row = len(out.triangles)
    out.triangles = np.vstack([out.triangles, np.asarray(tris3, dtype=np.int64)])
    out.panel_ids = np.concatenate([out.panel_ids, np.full(len(tris3), pid, dtype=np.int64)])

    new_panel.vertices2d = np.asarray(verts2d)
    new_panel.triangles = np.vstack([new_panel.triangles, tris2_arr])
    new_panel.corr = np.asarray(corr, dtype=np.int64)
    loops = boundary_loops(new_panel.triangles)
    new_panel.boundary = max(loops, key=len)

    out = resolve_body_collisions(out, body, list(ring.values()))

    new_panels = dict(panels)
    new_panels[pid] = new_panel
    affected = set(range(first_new_row, len(out.triangles)))
    return CutResult(out, new_panels, affected, sorted(ring.values()))


# ---------------------------------------------------------------------------
# collisions

COLLISION_CLEARANCE = 0.2  # cm


def closest_point_on_triangle(p, a, b, c):
    """Closest point on triangle abc to p (Ericson's region test)."""
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = ab @ ap, ac @ ap
    if d1 <= 0 and d2 <= 0:
        return a
    bp = p - b
    d3, d4 = ab @ bp, ac @ bp
    if d3 >= 0 and d4 <= d3:
        return b
    vc = d1 * d4 - d3 * d2
    if vc <= 0 and d1 >= 0 and d3 <= 0:
        return a + ab * (d1 / (d1 - d3))
    cp = p - c
    d5, d6 = ab @ cp, ac @ cp
    if d6 >= 0 and d5 <= d6:
        return c
    vb = d5 * d2 - d1 * d6
    if vb <= 0 and d2 >= 0 and d6 <= 0:
        return a + ac * (d2 / (d2 - d6))
    va = d3 * d6 - d5 * d4
    if va <= 0 and (d4 - d3) >= 0 and (d5 - d6) >= 0:
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)))
    denom = 1.0 / (va + vb + vc)
    return a + ab * (vb * denom) + ac * (vc * denom)


def resolve_body_collisions(garment, body, candidates):
    """Push vertices inside the body back out along the nearest triangle normal.

    A vertex with negative signed distance (sign from the nearest body
    triangle's outward normal; ties break to the lowest triangle index)
    moves along that normal until its clearance is COLLISION_CLEARANCE.
    """
    candidates = sorted(set(int(v) for v in candidates))
    if not candidates:
        return garment
    bv = body.mesh.vertices
    btris = body.mesh.triangles
    bnormals = body.mesh.triangle_normals()
    out = None
    for v in candidates:
        p = garment.vertices[v]
        best = None
        for t, tri in enumerate(btris):
            q = closest_point_on_triangle(p, bv[tri[0]], bv[tri[1]], bv[tri[2]])
            d = float(np.linalg.norm(p - q))
            if best is None or d < best[0] - 1e-12:
                best = (d, t, q)
        d, t, q = best
        signed = float(np.dot(p - q, bnormals[t]))
        if d > 1e-12:
            signed = np.sign(signed) * d if signed != 0 else d
        if signed < 0:
            if out is None:
                out = garment.copy()
            out.vertices[v] = p + (COLLISION_CLEARANCE - signed) * bnormals[t]
    return out if out is not None else garment
