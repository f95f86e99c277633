"""HTTP session service for the interactive editor.

Sessions wrap one document each; mutations are serialized per session by a
lock, revisions are gapless, and undo replays the remaining op log from the
base document so the served state is always reproducible.
"""

import threading
import uuid

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import formats
from .document import apply_edit, replay
from .editops import EditOp
from .errors import PatternSyncError


class Session:
    def __init__(self, base_doc):
        self.id = uuid.uuid4().hex
        self.base = base_doc
        self.doc = base_doc
        self.revision = 0
        self.layout = {}  # panel id -> [dx, dy] in cm
        self.lock = threading.Lock()


def _error_body(exc):
    if isinstance(exc, PatternSyncError):
        return exc.payload()
    return {"code": type(exc).__name__, "entity": None, "message": str(exc)}


def _garment_payload(doc):
    return {
        "vertices": formats._flat(doc.garment.vertices),
        "triangles": formats._ints(doc.garment.triangles),
        "panel_ids": formats._ints(doc.garment.panel_ids),
    }


def _panel_payload(pid, panel):
    return {
        "id": int(pid),
        "vertices2d": formats._flat(panel.vertices2d),
        "triangles": formats._ints(panel.triangles),
        "boundary": formats._ints(panel.boundary),
        "corr": formats._ints(panel.corr),
    }


def _pattern_payload(doc):
    return [_panel_payload(pid, doc.panels[pid]) for pid in sorted(doc.panels)]


def _summary(doc):
    return {
        "panels": sorted(int(p) for p in doc.panels),
        "seams": len(doc.seams),
        "boundaries": {str(pid): formats._ints(panel.boundary)
                       for pid, panel in sorted(doc.panels.items())},
        "symmetry": doc.symmetry is not None,
        "feature_points": {k: formats._flat(v)
                           for k, v in sorted(doc.body.feature_points.items())},
    }


def create_app(default_document=None):
    app = FastAPI(title="patternsync service")
    sessions = {}

    def get_session(session_id):
        return sessions.get(session_id)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.body()
        if not body:
            body = default_document
        if not body:
            return JSONResponse(status_code=400, content={
                "code": "ParseError", "entity": None,
                "message": "no document supplied and no default configured"})
        try:
            doc = formats.load_document(body)
        except PatternSyncError as e:
            return JSONResponse(status_code=400, content=_error_body(e))
        session = Session(doc)
        sessions[session.id] = session
        return {"id": session.id, "revision": 0, "summary": _summary(doc)}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str, what: str = "all", revision: int = None):
        session = get_session(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={
                "code": "UnknownSession", "entity": session_id,
                "message": "no such session"})
        with session.lock:
            if revision is not None and revision != session.revision:
                return JSONResponse(status_code=409, content={
                    "code": "StaleRevision", "entity": session_id,
                    "message": f"server is at revision {session.revision}"})
            out = {"revision": session.revision, "layout": {
                str(pid): off for pid, off in sorted(session.layout.items())}}
            if what in ("garment", "all"):
                out["garment"] = _garment_payload(session.doc)
            if what in ("pattern", "all"):
                out["pattern"] = _pattern_payload(session.doc)
        return out

    @app.post("/sessions/{session_id}/ops")
    async def apply_op(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={
                "code": "UnknownSession", "entity": session_id,
                "message": "no such session"})
        body = await request.json()
        with session.lock:
            expected = body.get("revision")
            if expected is not None and expected != session.revision:
                return JSONResponse(status_code=409, content={
                    "code": "StaleRevision", "entity": session_id,
                    "message": f"server is at revision {session.revision}"})
            try:
                rec = body["op"]
                op = EditOp(rec["kind"], rec["params"])
                result = apply_edit(session.doc, op,
                                    mirror=bool(body.get("mirror", False)))
            except (PatternSyncError, KeyError, ValueError, TypeError) as e:
                return JSONResponse(status_code=422, content=_error_body(e))
            previous = session.doc
            session.doc = result.document
            session.revision += 1
            changed_panels = [
                _panel_payload(pid, panel)
                for pid, panel in sorted(result.document.panels.items())
                if previous.panels.get(pid) is not panel
            ]
            out = {
                "revision": session.revision,
                "affected": sorted(int(t) for t in result.affected),
                "traces": {str(pid): tr for pid, tr in sorted(result.traces.items())},
                "panels": changed_panels,
            }
            if result.document is not previous:
                out["garment"] = _garment_payload(result.document)
        return out

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = get_session(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={
                "code": "UnknownSession", "entity": session_id,
                "message": "no such session"})
        with session.lock:
            if not session.doc.history:
                return JSONResponse(status_code=409, content={
                    "code": "EmptyHistory", "entity": session_id,
                    "message": "nothing to undo"})
            session.doc = replay(session.base, session.doc.history[:-1])
            session.revision += 1
            return {
                "revision": session.revision,
                "garment": _garment_payload(session.doc),
                "panels": _pattern_payload(session.doc),
            }

    @app.post("/sessions/{session_id}/layout")
    async def set_layout(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={
                "code": "UnknownSession", "entity": session_id,
                "message": "no such session"})
        body = await request.json()
        with session.lock:
            pid = int(body["panel"])
            if pid not in session.doc.panels:
                return JSONResponse(status_code=422, content={
                    "code": "ValidationError", "entity": f"panel {pid}",
                    "message": "unknown panel"})
            session.layout[pid] = [float(body["offset"][0]),
                                   float(body["offset"][1])]
            return {"revision": session.revision,
                    "layout": {str(p): o
                               for p, o in sorted(session.layout.items())}}

    return app
