import heapq

import numpy as np
import pytest

from patternsync import geometry as geo
from patternsync.errors import DegenerateTriangle, EmptyIsoline, EmptySource

from fixtures import grid_mesh


def random_rotation(rng):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


class TestLocalFrame:
    def test_right_angle(self):
        f = geo.local_frame(np.array([[0, 0, 0], [2, 0, 0], [0, 1, 0.0]]), 0)
        np.testing.assert_allclose(f.matrix, [[2, 0], [0, 1]], atol=1e-12)

    def test_equilateral(self):
        tri = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
        f = geo.local_frame(tri, 0)
        np.testing.assert_allclose(f.matrix, [[1, 0.5], [0, 0.8660254]], atol=1e-7)

    def test_collinear_raises(self):
        with pytest.raises(DegenerateTriangle):
            geo.local_frame(np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0.0]]), 0)

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            tri = rng.normal(size=(3, 3))
            try:
                f = geo.local_frame(tri)
            except DegenerateTriangle:
                continue
            moved = tri @ random_rotation(rng).T + rng.normal(size=3)
            f2 = geo.local_frame(moved)
            np.testing.assert_allclose(f2.matrix, f.matrix, atol=1e-9)

    def test_det_is_twice_area(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            tri = rng.normal(size=(3, 3))
            area = 0.5 * np.linalg.norm(np.cross(tri[1] - tri[0], tri[2] - tri[0]))
            if area < 1e-6:
                continue
            f = geo.local_frame(tri)
            assert np.linalg.det(f.matrix) == pytest.approx(2 * area, abs=1e-9)


class TestBarycentric:
    def test_centroid(self):
        tri = np.array([[0, 0], [3, 1], [1, 4.0]])
        abc = geo.barycentric(tri.mean(axis=0), tri)
        np.testing.assert_allclose(abc, [1 / 3] * 3, atol=1e-12)

    def test_vertex(self):
        tri = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0.0]])
        abc = geo.barycentric(tri[0], tri)
        np.testing.assert_allclose(abc, [1, 0, 0], atol=1e-12)

    def test_outside_point(self):
        abc = geo.barycentric([2, 0], np.array([[0, 0], [1, 0], [0, 1.0]]))
        np.testing.assert_allclose(abc, [-1, 2, 0], atol=1e-12)

    def test_roundtrip_random(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            tri = rng.normal(size=(3, 2)) * 5
            u, v = tri[1] - tri[0], tri[2] - tri[0]
            if abs(u[0] * v[1] - u[1] * v[0]) < 1e-3:
                continue
            for _ in range(50):
                p = rng.normal(size=2) * 5
                a, b, c = geo.barycentric(p, tri)
                assert a + b + c == pytest.approx(1.0, abs=1e-14)
                rec = a * tri[0] + b * tri[1] + c * tri[2]
                np.testing.assert_allclose(rec, p, atol=1e-9)

    def test_roundtrip_3d_projects(self):
        rng = np.random.default_rng(12)
        tri = rng.normal(size=(3, 3)) * 3
        n = np.cross(tri[1] - tri[0], tri[2] - tri[0])
        n /= np.linalg.norm(n)
        p = rng.normal(size=3)
        a, b, c = geo.barycentric(p, tri)
        rec = a * tri[0] + b * tri[1] + c * tri[2]
        proj = p - np.dot(p - tri[0], n) * n
        np.testing.assert_allclose(rec, proj, atol=1e-9)


def brute_dijkstra(n, edges, lens, sources):
    dist = {i: np.inf for i in range(n)}
    adj = {i: [] for i in range(n)}
    for (a, b), l in zip(edges, lens):
        adj[a].append((b, l))
        adj[b].append((a, l))
    heap = [(0.0, s) for s in sources]
    for s in sources:
        dist[s] = 0.0
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for w, l in adj[v]:
            if d + l < dist[w]:
                dist[w] = d + l
                heapq.heappush(heap, (d + l, w))
    return np.array([dist[i] for i in range(n)])


class TestGeodesic:
    def test_chain(self):
        mesh = geo.Mesh3(np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [1, 1, 0.0]]),
                         np.array([[0, 1, 3], [1, 2, 3]]), np.zeros(2))
        d = geo.geodesic_from_boundary(mesh, [0])
        assert d[0] == 0
        assert d[1] == pytest.approx(1)
        assert d[2] == pytest.approx(2)

    def test_grid_bottom_row(self):
        mesh = grid_mesh(4, 4, 1.0)
        bottom = [i for i in range(5)]
        d = geo.geodesic_from_boundary(mesh, bottom)
        for j in range(5):
            for i in range(5):
                assert d[j * 5 + i] == pytest.approx(j)

    def test_matches_brute_force_oracle(self):
        mesh = grid_mesh(4, 4, 1.0)
        edges, lens = geo.edge_lengths(mesh)
        expected = brute_dijkstra(len(mesh.vertices), edges.tolist(), lens, [0, 7])
        got = geo.geodesic_from_boundary(mesh, [0, 7])
        np.testing.assert_allclose(got, expected, atol=1e-12)

    def test_out_of_range_source(self):
        mesh = grid_mesh(2, 2)
        with pytest.raises(EmptySource):
            geo.geodesic_from_boundary(mesh, [99])
        with pytest.raises(EmptySource):
            geo.geodesic_from_boundary(mesh, [])

    def test_triangle_inequality_over_edges(self):
        mesh = grid_mesh(5, 3, 0.7)
        d = geo.geodesic_from_boundary(mesh, [0])
        edges, lens = geo.edge_lengths(mesh)
        for (a, b), l in zip(edges, lens):
            assert d[b] <= d[a] + l + 1e-12
            assert d[a] <= d[b] + l + 1e-12


class TestIsoline:
    def test_single_triangle(self):
        mesh = geo.Mesh3(np.array([[0, 0, 0], [1, 0, 0], [0.5, 1, 0.0]]),
                         np.array([[0, 1, 2]]), np.zeros(1))
        polys = geo.extract_isoline(mesh, np.array([0.0, 0.0, 2.0]), 1.0)
        assert len(polys) == 1
        pts = polys[0]
        assert len(pts) == 2
        for p in pts:
            assert p.t == pytest.approx(0.5)

    def test_grid_row_field(self):
        mesh = grid_mesh(4, 4, 1.0)
        dist = mesh.vertices[:, 1].copy()
        polys = geo.extract_isoline(mesh, dist, 1.5)
        assert len(polys) == 1
        pts = polys[0]
        xs = sorted(p.position[0] for p in pts)
        assert xs[0] == pytest.approx(0.0)
        assert xs[-1] == pytest.approx(4.0)
        for p in pts:
            di, dj = dist[p.i], dist[p.j]
            assert di * (1 - p.t) + dj * p.t == pytest.approx(1.5)
            assert p.position[1] == pytest.approx(1.5)

    def test_out_of_range(self):
        mesh = grid_mesh(4, 4, 1.0)
        dist = mesh.vertices[:, 1].copy()
        with pytest.raises(EmptyIsoline):
            geo.extract_isoline(mesh, dist, 10.0)

    def test_polyline_crosses_triangle_once(self):
        mesh = grid_mesh(5, 5, 1.0)
        rng = np.random.default_rng(5)
        dist = mesh.vertices[:, 1] + 0.2 * rng.random(len(mesh.vertices))
        polys = geo.extract_isoline(mesh, dist, 2.0)
        seen = set()
        for poly in polys:
            for a, b in zip(poly, poly[1:]):
                seg = frozenset([(a.i, a.j), (b.i, b.j)])
                assert seg not in seen
                seen.add(seg)


class TestBoundaryLoops:
    def test_grid_boundary(self):
        mesh = grid_mesh(2, 2, 1.0)
        loops = geo.boundary_loops(mesh.triangles)
        assert len(loops) == 1
        assert len(loops[0]) == 8

    def test_connected_components(self):
        mesh = grid_mesh(2, 1, 1.0)
        labels, count = geo.connected_components(mesh.triangles)
        assert count == 1
        # two islands
        tris = np.array([[0, 1, 2], [3, 4, 5]])
        labels, count = geo.connected_components(tris)
        assert count == 2
