import pytest
from fastapi.testclient import TestClient

from patternsync import formats
from patternsync.service import create_app

from test_document import mirrored_doc, tube_doc


@pytest.fixture()
def client():
    return TestClient(create_app())


def make_session(client, doc=None):
    data = formats.save_document(doc if doc is not None else tube_doc())
    r = client.post("/sessions", content=data)
    assert r.status_code == 201
    return r.json()


def scale_op(factor, n_tris=64):
    return {"kind": "scale_region",
            "params": {"region": {"triangles": list(range(n_tris)), "anchors": []},
                       "mode": "along", "factor": factor}}


class TestSessions:
    def test_healthz(self, client):
        assert client.get("/healthz").json() == {"status": "ok"}

    def test_create(self, client):
        out = make_session(client)
        assert out["revision"] == 0
        assert out["summary"]["panels"] == [0]
        assert out["summary"]["symmetry"] is False

    def test_create_malformed(self, client):
        r = client.post("/sessions", content=b'{"version": "pt-1"')
        assert r.status_code == 400
        assert r.json()["code"] == "ParseError"

    def test_sessions_are_independent(self, client):
        a = make_session(client)
        b = make_session(client)
        assert a["id"] != b["id"]
        client.post(f"/sessions/{a['id']}/ops", json={"op": scale_op(1.2)})
        assert client.get(f"/sessions/{b['id']}/state").json()["revision"] == 0

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/state").status_code == 404
        assert client.post("/sessions/nope/undo").status_code == 404
        assert client.post("/sessions/nope/ops", json={"op": scale_op(1.1)})\
            .status_code == 404


class TestState:
    def test_pattern_matches_document(self, client):
        doc = tube_doc()
        out = make_session(client, doc)
        state = client.get(f"/sessions/{out['id']}/state",
                           params={"what": "pattern"}).json()
        panel = state["pattern"][0]
        assert panel["id"] == 0
        assert len(panel["vertices2d"]) == 2 * len(doc.panels[0].vertices2d)
        assert "garment" not in state

    def test_stale_revision_409(self, client):
        out = make_session(client)
        r = client.get(f"/sessions/{out['id']}/state", params={"revision": 5})
        assert r.status_code == 409

    def test_what_all(self, client):
        out = make_session(client)
        state = client.get(f"/sessions/{out['id']}/state",
                           params={"what": "all"}).json()
        assert "garment" in state and "pattern" in state


class TestOps:
    def test_apply_increments_revision(self, client):
        out = make_session(client)
        r = client.post(f"/sessions/{out['id']}/ops",
                        json={"op": scale_op(1.2), "revision": 0})
        assert r.status_code == 200
        body = r.json()
        assert body["revision"] == 1
        assert body["panels"]
        assert "garment" in body
        assert body["traces"]["0"]

    def test_identity_op_elides_changes(self, client):
        out = make_session(client)
        body = client.post(f"/sessions/{out['id']}/ops",
                           json={"op": scale_op(1.0)}).json()
        assert body["revision"] == 1
        assert body["panels"] == []
        assert "garment" not in body

    def test_revision_conflict(self, client):
        out = make_session(client)
        r = client.post(f"/sessions/{out['id']}/ops",
                        json={"op": scale_op(1.2), "revision": 3})
        assert r.status_code == 409

    def test_mirror_without_symmetry_422(self, client):
        out = make_session(client)
        r = client.post(f"/sessions/{out['id']}/ops",
                        json={"op": scale_op(1.2), "mirror": True})
        assert r.status_code == 422
        assert r.json()["code"] == "NoSymmetryDeclared"

    def test_excessive_shorten_422(self, client):
        out = make_session(client)
        op = {"kind": "shorten",
              "params": {"boundary": list(range(9)), "distance": 50.0}}
        r = client.post(f"/sessions/{out['id']}/ops", json={"op": op})
        assert r.status_code == 422
        assert r.json()["code"] == "EmptyIsoline"
        # failed op leaves revision unchanged
        assert client.get(f"/sessions/{out['id']}/state").json()["revision"] == 0

    def test_mirrored_op_with_symmetry(self, client):
        out = make_session(client, mirrored_doc())
        op = {"kind": "scale_region",
              "params": {"region": {"triangles": [0, 1, 2, 3, 4, 5, 6, 7],
                                    "anchors": []},
                         "mode": "along", "factor": 1.3}}
        r = client.post(f"/sessions/{out['id']}/ops",
                        json={"op": op, "mirror": True})
        assert r.status_code == 200
        assert len(r.json()["panels"]) == 2


class TestUndo:
    def test_apply_then_undo_restores_base(self, client):
        out = make_session(client)
        sid = out["id"]
        base = client.get(f"/sessions/{sid}/state").json()
        client.post(f"/sessions/{sid}/ops", json={"op": scale_op(1.2)})
        r = client.post(f"/sessions/{sid}/undo")
        assert r.status_code == 200
        assert r.json()["revision"] == 2
        after = client.get(f"/sessions/{sid}/state").json()
        assert after["garment"] == base["garment"]
        assert after["pattern"] == base["pattern"]

    def test_two_applies_one_undo(self, client):
        out = make_session(client)
        sid = out["id"]
        client.post(f"/sessions/{sid}/ops", json={"op": scale_op(1.2)})
        once = client.get(f"/sessions/{sid}/state").json()
        client.post(f"/sessions/{sid}/ops", json={"op": scale_op(1.4)})
        client.post(f"/sessions/{sid}/undo")
        after = client.get(f"/sessions/{sid}/state").json()
        assert after["garment"] == once["garment"]
        assert after["pattern"] == once["pattern"]

    def test_undo_fresh_session_409(self, client):
        out = make_session(client)
        assert client.post(f"/sessions/{out['id']}/undo").status_code == 409


class TestLayout:
    def test_set_and_get(self, client):
        out = make_session(client)
        sid = out["id"]
        r = client.post(f"/sessions/{sid}/layout",
                        json={"panel": 0, "offset": [3.0, 0.0]})
        assert r.status_code == 200
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["layout"] == {"0": [3.0, 0.0]}

    def test_unknown_panel(self, client):
        out = make_session(client)
        r = client.post(f"/sessions/{out['id']}/layout",
                        json={"panel": 9, "offset": [1.0, 0.0]})
        assert r.status_code == 422
