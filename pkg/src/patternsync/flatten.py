"""Scale-preserving pattern flattening.

Per-triangle intrinsic scale matrices memorize the 2D<->3D local scaling of
the initial design.  After a 3D edit, per-triangle 2D targets are produced
from the edited 3D frames through the stored matrices, then stitched into a
connected panel by local-global (ARAP) iterations.  An optional
as-similar-as-possible (ASAP) constraint keeps boundary chord directions.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import (
    DegenerateChord,
    DegenerateTriangle,
    MismatchedTopology,
    NonFiniteInput,
    SingularFrame,
    SolverFailure,
)
from .geometry import LocalFrame, frame_local_coords, local_frame


@dataclass
class IntrinsicScaleMap:
    """Per-triangle 2x2 matrices mapping 2D pattern frames to 3D drape frames."""

    matrices: np.ndarray  # (m, 2, 2)
    designated_edges: np.ndarray  # (m,)

    def __post_init__(self):
        self.matrices = np.asarray(self.matrices, dtype=np.float64).reshape(-1, 2, 2)
        self.designated_edges = np.asarray(self.designated_edges, dtype=np.int64).reshape(-1)


@dataclass
class SolverConfig:
    w1: float = 1000.0  # fixed-vertex weight
    w2: float = 1000.0  # boundary-tangent weight
    max_iterations: int = 50
    rel_tolerance: float = 1e-6


@dataclass
class StitchProblem:
    """Assembled least-squares structure for one panel."""

    n_vertices: int
    triangles: np.ndarray  # (m, 3)
    fixed_idx: np.ndarray  # (k,)
    fixed_pos: np.ndarray  # (k, 2)
    tangents: list = field(default_factory=list)  # (i_prev, i_next, dx, dy)
    w1: float = 1000.0
    w2: float = 1000.0


@dataclass
class StitchResult:
    coords: np.ndarray  # (n, 2)
    energies: list  # per-iteration energy trace
    edge_targets: np.ndarray  # (3m, 2) rotated targets of the last local step
    edges: np.ndarray  # (3m, 2) directed edge index pairs


def _frames(vertices, triangles, designated_edges=None, side="", ):
    frames = []
    for f, tri in enumerate(triangles):
        e = 0 if designated_edges is None else int(designated_edges[f])
        try:
            frames.append(local_frame(vertices[tri], e))
        except DegenerateTriangle as exc:
            raise DegenerateTriangle(f"{side} triangle {f}: {exc}", entity=f"triangle {f}") from exc
    return frames


def compute_intrinsic_scale_map(panel, garment, garment_tris=None):
    """M_i = frame(3D tri) @ inv(frame(2D tri)) for every panel triangle.

    `garment_tris` are the garment triangle indices aligned with the panel's
    triangle list (defaults to positional alignment after panel filtering).
    """
    if garment_tris is None:
        garment_tris = np.arange(len(panel.triangles))
    if len(garment_tris) != len(panel.triangles):
        raise MismatchedTopology(
            f"panel has {len(panel.triangles)} triangles, garment sub-mesh {len(garment_tris)}")
    mats = np.empty((len(panel.triangles), 2, 2))
    edges = np.zeros(len(panel.triangles), dtype=np.int64)
    for i, tri2 in enumerate(panel.triangles):
        t3 = local_frame(garment.vertices[garment.triangles[garment_tris[i]]], 0)
        t2 = local_frame(panel.vertices2d[tri2], 0)
        det = np.linalg.det(t2.matrix)
        if abs(det) <= 1e-12:
            raise SingularFrame(f"2D frame of triangle {i} is singular", entity=f"triangle {i}")
        mats[i] = t3.matrix @ np.linalg.inv(t2.matrix)
    return IntrinsicScaleMap(mats, edges)


def per_triangle_targets(scale_map, panel, edited_garment, garment_tris=None):
    """Target 2D frames after an edit: inv(M_i) @ frame(edited 3D triangle)."""
    if garment_tris is None:
        garment_tris = np.arange(len(panel.triangles))
    if len(scale_map.matrices) != len(panel.triangles) or len(garment_tris) != len(panel.triangles):
        raise MismatchedTopology("scale map, panel and garment sub-mesh triangle counts differ")
    targets = []
    for i in range(len(panel.triangles)):
        e = int(scale_map.designated_edges[i])
        t_edit = local_frame(edited_garment.vertices[edited_garment.triangles[garment_tris[i]]], e)
        m = scale_map.matrices[i]
        det = np.linalg.det(m)
        if abs(det) <= 1e-12:
            raise SingularFrame(f"intrinsic scale matrix of triangle {i} is singular",
                                entity=f"triangle {i}")
        targets.append(LocalFrame(np.linalg.solve(m, t_edit.matrix), e))
    return targets


def build_tangent_constraints(panel):
    """One parallelism residual per boundary vertex.

    For boundary vertex i the original chord v[i+1] - v[i-1], unit
    normalized to (dx, dy), gives the linear residual
    (x'[i+1] - x'[i-1]) * dy - (y'[i+1] - y'[i-1]) * dx, zero iff the new
    chord keeps the original discrete tangent direction.  Chords shorter
    than 1e-9 are skipped.
    """
    loop = panel.boundary
    out = []
    n = len(loop)
    for k in range(n):
        i_prev = int(loop[(k - 1) % n])
        i_next = int(loop[(k + 1) % n])
        chord = panel.vertices2d[i_next] - panel.vertices2d[i_prev]
        length = np.linalg.norm(chord)
        if length < 1e-9:
            continue  # DegenerateChord: constraint skipped
        dx, dy = chord / length
        out.append((i_prev, i_next, float(dx), float(dy)))
    return out


def _assemble_system(problem):
    """Sparse residual matrix A over unknowns [x0, y0, x1, y1, ...].

    Rows: two per directed triangle edge (x then y), two per fixed vertex,
    one per tangent constraint.  Only the right-hand side changes across
    local-global iterations.
    """
    tris = problem.triangles
    m = len(tris)
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    rows, cols, vals = [], [], []
    r = 0
    for i, j in edges:
        rows += [r, r, r + 1, r + 1]
        cols += [2 * j, 2 * i, 2 * j + 1, 2 * i + 1]
        vals += [1.0, -1.0, 1.0, -1.0]
        r += 2
    sw1 = np.sqrt(problem.w1)
    for i in problem.fixed_idx:
        rows += [r, r + 1]
        cols += [2 * int(i), 2 * int(i) + 1]
        vals += [sw1, sw1]
        r += 2
    sw2 = np.sqrt(problem.w2)
    for i_prev, i_next, dx, dy in problem.tangents:
        rows += [r, r, r, r]
        cols += [2 * i_next, 2 * i_prev, 2 * i_next + 1, 2 * i_prev + 1]
        vals += [sw2 * dy, -sw2 * dy, -sw2 * dx, sw2 * dx]
        r += 1
    a = sp.coo_matrix((vals, (rows, cols)), shape=(r, 2 * problem.n_vertices)).tocsr()
    return a, edges


def _fit_rotations(coords, triangles, local_coords):
    """Best det=+1 rotation per triangle via closed-form 2x2 polar decomposition."""
    p = coords[triangles]  # (m, 3, 2)
    ecur = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]], axis=2)  # (m,2,3)^T
    etgt = np.stack([local_coords[:, 1] - local_coords[:, 0],
                     local_coords[:, 2] - local_coords[:, 1],
                     local_coords[:, 0] - local_coords[:, 2]], axis=2)
    ecur = np.transpose(ecur, (0, 2, 1))  # (m, 3, 2) rows are edge vectors
    etgt = np.transpose(etgt, (0, 2, 1))
    cov = np.einsum("fki,fkj->fij", ecur, etgt)  # sum of outer products
    a = cov[:, 0, 0] + cov[:, 1, 1]
    b = cov[:, 0, 1] - cov[:, 1, 0]
    r = np.hypot(a, b)
    c = np.where(r > 1e-300, a / np.where(r > 0, r, 1.0), 1.0)
    s = np.where(r > 1e-300, b / np.where(r > 0, r, 1.0), 0.0)
    rot = np.empty((len(triangles), 2, 2))
    rot[:, 0, 0] = c
    rot[:, 0, 1] = s
    rot[:, 1, 0] = -s
    rot[:, 1, 1] = c
    return rot


def stitch(problem, targets, initial_guess, config=None):
    """Local-global solve of the stitching least squares.

    Local step: fit a rotation per triangle aligning its target frame to the
    current solution; rotated target edges become the per-edge right-hand
    side.  Global step: solve the normal equations of the sparse system
    (factorized once).  Iterates until the relative energy change drops
    below the tolerance.
    """
    config = config or SolverConfig()
    coords = np.array(initial_guess, dtype=np.float64).reshape(-1, 2)
    if not np.isfinite(coords).all():
        raise NonFiniteInput("initial guess contains non-finite coordinates")
    if len(coords) != problem.n_vertices:
        raise MismatchedTopology("initial guess size does not match problem")
    local_coords = np.stack([frame_local_coords(f) for f in targets])  # (m, 3, 2)
    if not np.isfinite(local_coords).all():
        raise NonFiniteInput("target frames contain non-finite values")

    a, edges = _assemble_system(problem)
    ata = (a.T @ a).tocsc()
    try:
        solver = splu(ata)
    except RuntimeError as exc:  # pragma: no cover - needs a rank-deficient setup
        raise SolverFailure(f"normal-equation factorization failed: {exc}") from exc

    m = len(problem.triangles)
    b = np.zeros(a.shape[0])
    k = 6 * m
    sw1 = np.sqrt(problem.w1)
    for ci, i in enumerate(problem.fixed_idx):
        b[k + 2 * ci:k + 2 * ci + 2] = sw1 * problem.fixed_pos[ci]
    # tangent rows keep rhs 0

    energies = []
    edge_targets = None
    for _ in range(config.max_iterations):
        rot = _fit_rotations(coords, problem.triangles, local_coords)
        tgt_local = np.stack([local_coords[:, 1] - local_coords[:, 0],
                              local_coords[:, 2] - local_coords[:, 1],
                              local_coords[:, 0] - local_coords[:, 2]], axis=1)  # (m, 3, 2)
        rotated = np.einsum("fij,fkj->fki", rot, tgt_local)  # (m, 3, 2)
        edge_targets = rotated.transpose(1, 0, 2).reshape(3 * m, 2)  # matches edge order
        b[:6 * m:2] = edge_targets[:, 0]
        b[1:6 * m:2] = edge_targets[:, 1]
        x = solver.solve(a.T @ b)
        if not np.isfinite(x).all():
            raise SolverFailure("solver produced non-finite coordinates")
        coords = x.reshape(-1, 2)
        res = a @ x - b
        energy = float(res @ res)
        energies.append(energy)
        if energy < 1e-18:
            break
        if len(energies) >= 2:
            prev = energies[-2]
            if abs(prev - energy) <= config.rel_tolerance * max(prev, 1e-30):
                break
    return StitchResult(coords, energies, edge_targets, edges)


def choose_fixed_edge(vertices2d, triangles):
    """Endpoints of the edge whose midpoint is nearest the area centroid.

    Edges enumerated unique-undirected in sorted order; ties break toward
    the lowest edge index.
    """
    t = np.asarray(triangles)
    e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    p = np.asarray(vertices2d)
    tri_p = p[t]
    tu = tri_p[:, 1] - tri_p[:, 0]
    tv = tri_p[:, 2] - tri_p[:, 0]
    areas = np.abs(0.5 * (tu[:, 0] * tv[:, 1] - tu[:, 1] * tv[:, 0]))
    centroid = (tri_p.mean(axis=1) * areas[:, None]).sum(axis=0) / areas.sum()
    mids = 0.5 * (p[e[:, 0]] + p[e[:, 1]])
    best = int(np.argmin(np.linalg.norm(mids - centroid, axis=1)))
    return int(e[best, 0]), int(e[best, 1])


def assemble_stitch_problem(panel, use_asap, config=None):
    """StitchProblem for one panel, anchored on its central edge.

    Only the first endpoint of the chosen edge is position-pinned: the
    global step then has a unique solution while the orientation follows
    the local rotation fit, so the pin never fights the scale the edge
    targets ask for.
    """
    config = config or SolverConfig()
    i, _ = choose_fixed_edge(panel.vertices2d, panel.triangles)
    tangents = build_tangent_constraints(panel) if use_asap else []
    return StitchProblem(
        n_vertices=len(panel.vertices2d),
        triangles=panel.triangles,
        fixed_idx=np.array([i]),
        fixed_pos=panel.vertices2d[[i]].copy(),
        tangents=tangents,
        w1=config.w1,
        w2=config.w2,
    )


def flatten_uniform(sub_mesh, initial_guess=None, config=None):
    """ARAP flattening from scratch: targets are the 3D triangles' own frames.

    The comparison baseline; equivalent to forcing every intrinsic scale
    matrix to the identity.  Returns (coords, StitchResult).
    """
    config = config or SolverConfig()
    targets = _frames(sub_mesh.vertices, sub_mesh.triangles, side="3D")
    if initial_guess is None:
        initial_guess = _pca_plane_guess(sub_mesh.vertices)
    guess = np.asarray(initial_guess, dtype=np.float64).reshape(-1, 2)
    i, _ = choose_fixed_edge(guess, sub_mesh.triangles)
    problem = StitchProblem(
        n_vertices=len(guess),
        triangles=sub_mesh.triangles,
        fixed_idx=np.array([i]),
        fixed_pos=guess[[i]].copy(),
        tangents=[],
        w1=config.w1,
        w2=config.w2,
    )
    result = stitch(problem, targets, guess, config)
    return result.coords, result


def _pca_plane_guess(vertices):
    c = vertices.mean(axis=0)
    centered = vertices - c
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    return centered @ vt[:2].T


def update_pattern(doc, edited_garment, affected_triangles, asap_override=None, config=None):
    """Recompute panels after a 3D edit.

    Per affected panel: per-triangle targets -> stitch problem -> stitch,
    warm-started from the current 2D coordinates.  ASAP tangent constraints
    switch on automatically when the edit touches every triangle of a panel
    (asap_override forces either mode).  Unaffected panels come back
    unchanged.  Returns (panels dict, energy trace dict).
    """
    config = config or SolverConfig()
    affected = set(int(t) for t in affected_triangles)
    new_panels = {}
    traces = {}
    for pid, panel in doc.panels.items():
        gtris = doc.panel_garment_tris(pid)
        touched = [i for i, g in enumerate(gtris) if int(g) in affected]
        if not touched:
            new_panels[pid] = panel
            continue
        use_asap = len(touched) == len(gtris)
        if asap_override in ("on", True):
            use_asap = True
        elif asap_override in ("off", False):
            use_asap = False
        elif asap_override not in (None, "auto"):
            raise ValueError(f"asap_override must be auto|on|off, got {asap_override!r}")
        targets = per_triangle_targets(doc.scale_maps[pid], panel, edited_garment, gtris)
        problem = assemble_stitch_problem(panel, use_asap, config)
        result = stitch(problem, targets, panel.vertices2d, config)
        updated = panel.copy()
        updated.vertices2d = result.coords
        new_panels[pid] = updated
        traces[pid] = result.energies
    return new_panels, traces
