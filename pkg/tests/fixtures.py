"""Synthetic meshes and documents shared across the test suite."""

import numpy as np

from patternsync.geometry import Mesh3, Panel, BodyModel, boundary_loops


def grid_mesh(nx=4, ny=4, spacing=1.0, panel_id=0, z=0.0):
    """Planar (nx x ny cells) grid in the z-plane, CCW seen from +z."""
    xs = np.arange(nx + 1) * spacing
    ys = np.arange(ny + 1) * spacing
    verts = np.array([[x, y, z] for y in ys for x in xs])
    tris = []
    for j in range(ny):
        for i in range(nx):
            a = j * (nx + 1) + i
            b = a + 1
            c = b + (nx + 1)
            d = a + (nx + 1)
            tris.append([a, b, c])
            tris.append([a, c, d])
    tris = np.array(tris)
    mesh = Mesh3(verts, tris, np.full(len(tris), panel_id))
    return mesh


def grid_panel(mesh, scale2d=1.0):
    """Panel congruent (up to uniform scale) with a planar grid mesh."""
    verts2 = mesh.vertices[:, :2] * scale2d
    boundary = boundary_loops(mesh.triangles)[0]
    return Panel(verts2, mesh.triangles.copy(), boundary, np.arange(len(verts2)))


def open_tube(n_around=8, n_height=2, radius=1.0, height=2.0, panel_id=0,
              scale2d=1.0, base=np.zeros(3)):
    """Axis-aligned (z) tube with a vertical slit so it has disk topology.

    Column 0 and column n_around sit at the same angle (duplicated seam
    vertices).  The matching panel is the chord-exact unrolling scaled by
    `scale2d`, so every intrinsic scale matrix is (1/scale2d) * identity.
    Returns (Mesh3, Panel).
    """
    dtheta = 2 * np.pi / n_around
    chord = 2 * radius * np.sin(dtheta / 2)
    verts = []
    verts2 = []
    for j in range(n_height + 1):
        zc = height * j / n_height
        for i in range(n_around + 1):
            th = dtheta * i
            verts.append([radius * np.cos(th) + base[0],
                          radius * np.sin(th) + base[1], zc + base[2]])
            verts2.append([chord * i * scale2d, zc * scale2d])
    cols = n_around + 1
    tris = []
    for j in range(n_height):
        for i in range(n_around):
            a = j * cols + i
            b = a + 1
            c = b + cols
            d = a + cols
            tris.append([a, b, c])
            tris.append([a, c, d])
    tris = np.array(tris)
    mesh = Mesh3(np.array(verts), tris, np.full(len(tris), panel_id))
    boundary = boundary_loops(tris)[0]
    panel = Panel(np.array(verts2), tris.copy(), boundary, np.arange(len(verts)))
    return mesh, panel


def wall_body(width=20.0, height=20.0, x=0.0):
    """Flat wall in the plane x=const, outward normal +x, used for collisions."""
    verts = np.array([
        [x, -width / 2, -height / 2],
        [x, width / 2, -height / 2],
        [x, width / 2, height / 2],
        [x, -width / 2, height / 2],
    ])
    tris = np.array([[0, 1, 2], [0, 2, 3]])
    mesh = Mesh3(verts, tris, np.zeros(2))
    skeleton = np.array([[[x, 0, -height / 2], [x, 0, height / 2]]])
    return BodyModel(mesh, skeleton, {"center": verts.mean(axis=0)})


def axis_body(height=10.0):
    """Tiny body with a single vertical bone on the z-axis."""
    verts = np.array([[0, 0, 0], [0.1, 0, 0], [0, 0.1, height]])
    tris = np.array([[0, 1, 2]])
    mesh = Mesh3(verts, tris, np.zeros(1))
    skeleton = np.array([[[0, 0, 0], [0, 0, height]]])
    return BodyModel(mesh, skeleton, {"origin": np.zeros(3)})


def mirrored_grids(nx=2, ny=2, gap=0.5):
    """Two grid panels mirrored across the x=0 plane (left-right symmetry).

    Returns (Mesh3, panels dict {0: right, 1: left}).
    """
    right = grid_mesh(nx, ny, 1.0)
    right.vertices[:, 0] += gap
    verts_l = right.vertices * np.array([-1.0, 1.0, 1.0])
    tris_l = right.triangles[:, [0, 2, 1]]  # rewind so normals stay +z
    nv = len(right.vertices)
    mesh = Mesh3(np.vstack([right.vertices, verts_l]),
                 np.vstack([right.triangles, tris_l + nv]),
                 np.concatenate([np.zeros(len(right.triangles), dtype=np.int64),
                                 np.ones(len(tris_l), dtype=np.int64)]))
    panel_r = Panel(right.vertices[:, :2].copy(), right.triangles.copy(),
                    boundary_loops(right.triangles)[0], np.arange(nv))
    panel_l = Panel(verts_l[:, :2].copy(), tris_l.copy(),
                    boundary_loops(tris_l)[0], np.arange(nv) + nv)
    return mesh, {0: panel_r, 1: panel_l}


def random_panel_mesh(rng, n=6, noise=0.15):
    """Small random planar-ish disk mesh with its congruent-at-rest panel."""
    mesh = grid_mesh(n // 2, n // 2, 1.0)
    bumps = rng.normal(scale=noise, size=(len(mesh.vertices),))
    mesh.vertices[:, 2] += bumps * 0  # keep planar; callers may perturb
    panel = grid_panel(mesh)
    return mesh, panel
