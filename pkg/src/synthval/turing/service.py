"""HTTP API for blinded Turing-test grading sessions.

Endpoints:
  POST /sessions                       create a session
  GET  /sessions/{id}/next             blinded current item (token + index)
  GET  /images/{token}                 PNG bytes for an item token
  POST /sessions/{id}/judgments        submit the judgment at the cursor
  GET  /sessions/{id}/report           2x2 table + chi-square (complete only)
  GET  /report/aggregate?ids=a,b,c     cell-wise sum over completed sessions
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel

from ..errors import SynthvalError, ValidationError
from ..statlab import ContingencyTable2x2, TestResult
from .store import (ConflictError, NotFoundError, SequenceError,
                    SessionStateError, TuringStore)


class CreateSessionRequest(BaseModel):
    real_manifest: str
    synth_manifest: str
    n_real: int = 100
    n_synth: int = 100
    seed: int = 0
    id: str | None = None
    grader: str = ""


class JudgmentRequest(BaseModel):
    index: int
    label: str


def _report_payload(table: ContingencyTable2x2, result: TestResult | None) -> dict:
    return {
        "table": {
            "row_labels": list(table.row_labels),
            "col_labels": list(table.col_labels),
            "counts": [list(table.counts[0]), list(table.counts[1])],
            "total": table.total(),
        },
        "chi_square": result.to_dict() if result is not None else None,
    }


def create_app(store: TuringStore) -> FastAPI:
    app = FastAPI(title="synthval turing service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(SynthvalError)
    async def handle_error(request: Request, exc: SynthvalError):
        status = 400
        if isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, (ConflictError, SequenceError, SessionStateError)):
            status = 409
        elif isinstance(exc, ValidationError):
            status = 422
        return JSONResponse(status_code=status,
                            content={"error": type(exc).__name__, "detail": str(exc)})

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        sess = store.create_session(
            real_manifest=req.real_manifest, synth_manifest=req.synth_manifest,
            n_real=req.n_real, n_synth=req.n_synth, seed=req.seed,
            session_id=req.id, grader=req.grader)
        return {"session_id": sess.id, "total": sess.total,
                "cursor": sess.cursor, "status": sess.status}

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str):
        return store.next_item(session_id)

    @app.get("/images/{token}")
    def image(token: str):
        return FileResponse(store.image_path(token), media_type="image/png")

    @app.post("/sessions/{session_id}/judgments")
    def judge(session_id: str, req: JudgmentRequest):
        return store.submit_judgment(session_id, req.index, req.label)

    @app.get("/sessions/{session_id}/report")
    def report(session_id: str):
        table, result = store.session_report(session_id)
        return _report_payload(table, result)

    @app.get("/report/aggregate")
    def aggregate(ids: str):
        session_ids = [s for s in ids.split(",") if s]
        if not session_ids:
            raise ValidationError("ids query parameter is empty")
        table, result = store.aggregate_report(session_ids)
        return _report_payload(table, result) | {"sessions": session_ids}

    return app
