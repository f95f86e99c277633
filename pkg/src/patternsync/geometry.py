"""Mesh types and the low-level geometric operations everything else builds on.

Conventions: lengths in centimeters, angles in radians.  Triangles are
counterclockwise (viewed from outside in 3D, positive signed area in 2D).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .errors import (
    DegenerateTriangle,
    EmptyIsoline,
    EmptySource,
    NoSymmetryDeclared,
    UnpairedPanel,
)

AREA_EPS = 1e-10  # cm^2; below this a triangle counts as collapsed


# ---------------------------------------------------------------------------
# data types


@dataclass
class Mesh3:
    """Triangle mesh in 3D with a per-triangle panel id."""

    vertices: np.ndarray  # (n, 3) float64
    triangles: np.ndarray  # (m, 3) int
    panel_ids: np.ndarray  # (m,) int

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        self.panel_ids = np.asarray(self.panel_ids, dtype=np.int64).reshape(-1)

    def copy(self):
        return Mesh3(self.vertices.copy(), self.triangles.copy(), self.panel_ids.copy())

    def panel_triangle_indices(self, panel_id):
        """Garment triangle indices belonging to one panel, in mesh order."""
        return np.nonzero(self.panel_ids == panel_id)[0]

    def triangle_points(self, t):
        return self.vertices[self.triangles[t]]

    def triangle_normals(self):
        p = self.vertices[self.triangles]
        n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        lens = np.linalg.norm(n, axis=1)
        lens[lens == 0] = 1.0
        return n / lens[:, None]

    def triangle_areas(self):
        p = self.vertices[self.triangles]
        return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)


@dataclass
class Panel:
    """One 2D sewing piece, triangle-aligned with a sub-mesh of the garment."""

    vertices2d: np.ndarray  # (k, 2) float64
    triangles: np.ndarray  # (m, 3) int, indices into vertices2d
    boundary: np.ndarray  # ordered vertex-index loop
    corr: np.ndarray  # (k,) panel vertex -> garment vertex

    def __post_init__(self):
        self.vertices2d = np.asarray(self.vertices2d, dtype=np.float64).reshape(-1, 2)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        self.boundary = np.asarray(self.boundary, dtype=np.int64).reshape(-1)
        self.corr = np.asarray(self.corr, dtype=np.int64).reshape(-1)

    def copy(self):
        return Panel(self.vertices2d.copy(), self.triangles.copy(),
                     self.boundary.copy(), self.corr.copy())

    def signed_areas(self):
        p = self.vertices2d[self.triangles]
        u = p[:, 1] - p[:, 0]
        v = p[:, 2] - p[:, 0]
        return 0.5 * (u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])

    def area(self):
        return float(np.abs(self.signed_areas()).sum())

    def area_centroid(self):
        p = self.vertices2d[self.triangles]
        a = np.abs(self.signed_areas())
        c = p.mean(axis=1)
        return (c * a[:, None]).sum(axis=0) / a.sum()


@dataclass
class BodyModel:
    mesh: Mesh3
    skeleton: np.ndarray  # (b, 2, 3) bone segments
    feature_points: dict = field(default_factory=dict)  # name -> (3,) point

    def __post_init__(self):
        self.skeleton = np.asarray(self.skeleton, dtype=np.float64).reshape(-1, 2, 3)


@dataclass
class SeamLine:
    """Two stitched edge chains, one per joined panel side.

    Each chain is a list of (i, j) garment-vertex pairs; positions pair up.
    """

    chain_a: np.ndarray  # (c, 2) int
    chain_b: np.ndarray

    def __post_init__(self):
        self.chain_a = np.asarray(self.chain_a, dtype=np.int64).reshape(-1, 2)
        self.chain_b = np.asarray(self.chain_b, dtype=np.int64).reshape(-1, 2)

    def vertices_a(self):
        return chain_vertices(self.chain_a)

    def vertices_b(self):
        return chain_vertices(self.chain_b)


def chain_vertices(chain):
    """Ordered vertex list of an edge chain [(a,b),(b,c),...] -> [a,b,c,...]."""
    chain = np.asarray(chain).reshape(-1, 2)
    if len(chain) == 0:
        return np.zeros(0, dtype=np.int64)
    out = [chain[0, 0]]
    for a, b in chain:
        out.append(b)
    return np.asarray(out, dtype=np.int64)


@dataclass
class LocalFrame:
    """Rigid-motion-invariant 2x2 triangle frame, designated edge on the x-axis.

    Columns are the frame-aligned edge vectors u and v emanating from the
    designated edge's origin vertex.
    """

    matrix: np.ndarray  # (2, 2)
    designated_edge: int

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64).reshape(2, 2)


# ---------------------------------------------------------------------------
# frames and barycentrics


def local_frame(tri, designated_edge=0):
    """Frame matrix [[|u|, |v|cos t], [0, |v|sin t]] for one triangle.

    `tri` holds three points in 2D or 3D.  u and v are the edges leaving
    the origin vertex of the designated edge (edge e runs vertex e -> e+1).
    For 2D input the signed cross is kept, so a clockwise triangle yields a
    negative determinant; 3D input always yields det > 0.
    """
    tri = np.asarray(tri, dtype=np.float64)
    e = int(designated_edge)
    p0, p1, p2 = tri[e % 3], tri[(e + 1) % 3], tri[(e + 2) % 3]
    u = p1 - p0
    v = p2 - p0
    lu = np.linalg.norm(u)
    if tri.shape[1] == 2:
        cross = u[0] * v[1] - u[1] * v[0]
    else:
        cross = np.linalg.norm(np.cross(u, v))
    if abs(cross) * 0.5 <= AREA_EPS or lu == 0.0:
        raise DegenerateTriangle(f"triangle area {abs(cross) * 0.5:g} below {AREA_EPS:g}")
    m = np.array([[lu, float(np.dot(u, v)) / lu], [0.0, cross / lu]])
    return LocalFrame(m, e)


def frame_local_coords(frame):
    """Vertex positions (3, 2) of the frame's triangle in frame coordinates.

    Vertex `e` sits at the origin, `e+1` at column u, `e+2` at column v.
    """
    e = frame.designated_edge
    q = np.zeros((3, 2))
    q[(e + 1) % 3] = frame.matrix[:, 0]
    q[(e + 2) % 3] = frame.matrix[:, 1]
    return q


def barycentric(point, tri):
    """Barycentric coordinates (a, b, c) of a point w.r.t. a triangle.

    3D points are first projected into the triangle's plane; a + b + c = 1
    exactly (c computed as 1 - a - b).
    """
    tri = np.asarray(tri, dtype=np.float64)
    p = np.asarray(point, dtype=np.float64)
    u = tri[0] - tri[2]
    v = tri[1] - tri[2]
    w = p - tri[2]
    uu, vv, uv = np.dot(u, u), np.dot(v, v), np.dot(u, v)
    det = uu * vv - uv * uv
    if det <= (2.0 * AREA_EPS) ** 2:
        raise DegenerateTriangle("cannot take barycentric coordinates of a collapsed triangle")
    wu, wv = np.dot(w, u), np.dot(w, v)
    a = (vv * wu - uv * wv) / det
    b = (uu * wv - uv * wu) / det
    c = 1.0 - a - b
    return a, b, c


# ---------------------------------------------------------------------------
# topology helpers


def edge_lengths(mesh):
    """Unique undirected edges (e, 2) and their lengths."""
    t = mesh.triangles
    e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    e = np.sort(e, axis=1)
    e = np.unique(e, axis=0)
    lens = np.linalg.norm(mesh.vertices[e[:, 0]] - mesh.vertices[e[:, 1]], axis=1)
    return e, lens


def boundary_edges(triangles):
    """Directed boundary edges (appear in one triangle, no opposite)."""
    t = np.asarray(triangles)
    d = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    have = set(map(tuple, d))
    return [tuple(e) for e in d if (e[1], e[0]) not in have]


def boundary_loops(triangles):
    """All boundary loops as ordered vertex lists, sorted by smallest vertex."""
    edges = boundary_edges(triangles)
    nxt = {}
    for a, b in edges:
        nxt[a] = b
    loops = []
    seen = set()
    for a, _ in edges:
        if a in seen:
            continue
        loop = [a]
        seen.add(a)
        cur = nxt[a]
        while cur != a:
            loop.append(cur)
            seen.add(cur)
            cur = nxt[cur]
        loops.append(np.asarray(loop, dtype=np.int64))
    loops.sort(key=lambda l: int(l.min()))
    return loops


def connected_components(triangles):
    """Label triangles by edge-connected component; returns (labels, count)."""
    t = np.asarray(triangles)
    m = len(t)
    edge_owner = {}
    adj = [[] for _ in range(m)]
    for f in range(m):
        for k in range(3):
            key = tuple(sorted((t[f, k], t[f, (k + 1) % 3])))
            if key in edge_owner:
                g = edge_owner[key]
                adj[f].append(g)
                adj[g].append(f)
            else:
                edge_owner[key] = f
    labels = np.full(m, -1, dtype=np.int64)
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
    return labels, count


# ---------------------------------------------------------------------------
# geodesics and iso-lines


def geodesic_from_boundary(mesh, source):
    """Shortest-path distance (Dijkstra over mesh edges) to a source vertex set."""
    source = np.asarray(sorted(set(int(s) for s in np.asarray(source).reshape(-1))))
    if len(source) == 0:
        raise EmptySource("source vertex set is empty")
    n = len(mesh.vertices)
    if source.min() < 0 or source.max() >= n:
        raise EmptySource(f"source vertex {source.max()} out of range (n={n})")
    edges, lens = edge_lengths(mesh)
    graph = sp.coo_matrix(
        (np.concatenate([lens, lens]),
         (np.concatenate([edges[:, 0], edges[:, 1]]),
          np.concatenate([edges[:, 1], edges[:, 0]]))),
        shape=(n, n),
    ).tocsr()
    dist = _csgraph_dijkstra(graph, directed=False, indices=source, min_only=True)
    return dist


@dataclass
class IsolinePoint:
    """A point on a mesh edge: endpoints (i, j) and fraction t from i to j."""

    i: int
    j: int
    t: float
    position: np.ndarray


def extract_isoline(mesh, dist, d):
    """Polylines where the interpolated vertex field equals d.

    Each polyline is a list of IsolinePoint on edges whose endpoint values
    bracket d; maximal chains across triangles.
    """
    if not d > 0:
        raise EmptyIsoline("iso value must be positive")
    dist = np.asarray(dist, dtype=np.float64)
    tris = mesh.triangles
    crossings = {}  # sorted edge -> IsolinePoint

    def crossing(i, j):
        key = (min(i, j), max(i, j))
        if key in crossings:
            return key
        di, dj = dist[key[0]], dist[key[1]]
        if not (min(di, dj) < d < max(di, dj)):
            return None
        t = (d - di) / (dj - di)
        pos = mesh.vertices[key[0]] * (1 - t) + mesh.vertices[key[1]] * t
        crossings[key] = IsolinePoint(key[0], key[1], float(t), pos)
        return key

    segments = []  # pairs of edge keys, one per crossed triangle
    for tri in tris:
        keys = []
        for k in range(3):
            key = crossing(int(tri[k]), int(tri[(k + 1) % 3]))
            if key is not None:
                keys.append(key)
        keys = list(dict.fromkeys(keys))
        if len(keys) == 2:
            segments.append(tuple(keys))
    if not segments:
        raise EmptyIsoline(f"no mesh edge brackets distance {d:g}")

    # chain segments that share an edge-crossing into maximal polylines
    adj = {}
    for a, b in segments:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    visited = set()
    polylines = []
    for start in adj:
        if start in visited or len(adj[start]) > 1:
            continue
        chain = _walk_chain(start, adj, visited)
        polylines.append([crossings[k] for k in chain])
    for start in adj:  # remaining are closed loops
        if start in visited:
            continue
        chain = _walk_chain(start, adj, visited)
        polylines.append([crossings[k] for k in chain])
    return polylines


def _walk_chain(start, adj, visited):
    chain = [start]
    visited.add(start)
    cur = start
    while True:
        nxt = [k for k in adj[cur] if k not in visited]
        if not nxt:
            break
        cur = nxt[0]
        chain.append(cur)
        visited.add(cur)
    return chain


# ---------------------------------------------------------------------------
# symmetry


@dataclass
class SymmetryInfo:
    """Left-right symmetry declaration plus precomputed correspondence maps."""

    plane_point: np.ndarray  # (3,)
    plane_normal: np.ndarray  # (3,) unit
    panel_pairs: dict  # panel id -> mirrored panel id (both directions)
    vertex_map: np.ndarray  # garment vertex -> mirrored garment vertex (-1 unmapped)
    triangle_map: np.ndarray  # garment triangle -> mirrored triangle (-1 unmapped)
    seam_map: dict = field(default_factory=dict)  # seam index -> mirrored seam index

    def reflect_point(self, p):
        p = np.asarray(p, dtype=np.float64)
        return p - 2.0 * np.dot(p - self.plane_point, self.plane_normal) * self.plane_normal

    def reflect_vector(self, v):
        v = np.asarray(v, dtype=np.float64)
        return v - 2.0 * np.dot(v, self.plane_normal) * self.plane_normal


def mirror_edit(edit, symmetry):
    """Mirror one edit across the declared symmetry plane.

    Reflects every 3D geometric parameter and remaps panel/region/seam
    references through the pairing tables; an involution.
    """
    if symmetry is None:
        raise NoSymmetryDeclared("document declares no left-right symmetry")
    from .editops import EditOp  # local import; editops depends on this module

    params = dict(edit.params)
    kind = edit.kind

    def map_indices(arr, table, what):
        arr = np.asarray(arr, dtype=np.int64).reshape(-1)
        out = table[arr]
        if (out < 0).any():
            bad = int(arr[np.argmax(out < 0)])
            raise UnpairedPanel(f"{what} {bad} has no mirror counterpart")
        return out.tolist()

    if kind == "scale_region":
        region = dict(params["region"])
        region["triangles"] = sorted(map_indices(region["triangles"], symmetry.triangle_map, "triangle"))
        region["anchors"] = sorted(map_indices(region.get("anchors", []), symmetry.vertex_map, "vertex"))
        params["region"] = region
    elif kind == "move_seam":
        seam = int(params["seam"])
        if seam not in symmetry.seam_map:
            raise UnpairedPanel(f"seam {seam} has no mirror counterpart")
        params["seam"] = symmetry.seam_map[seam]
    elif kind in ("shorten", "extend"):
        # reflection flips boundary orientation, so the chain reverses
        params["boundary"] = map_indices(params["boundary"], symmetry.vertex_map, "vertex")[::-1]
    elif kind == "cut":
        cam = dict(params["camera"])
        cam["origin"] = symmetry.reflect_point(cam["origin"]).tolist()
        for key in ("dir", "up", "right"):
            cam[key] = symmetry.reflect_vector(cam[key]).tolist()
        params["camera"] = cam
    else:
        raise ValueError(f"unknown edit kind {kind!r}")
    return EditOp(kind, params)
