"""HTTP surface over the orchestrator."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, UploadFile
from fastapi.responses import JSONResponse

from clinic_scribe.audio_ingest import RawAudioFile
from clinic_scribe.errors import (
    MalformedContainer,
    NotFound,
    QualityRejected,
    StorageFailure,
    UnsupportedEncoding,
    WrongState,
)
from clinic_scribe.form_mapper import fill_plan_to_dict
from clinic_scribe.orchestrator import Orchestrator, SessionState


def create_app(orchestrator: Orchestrator) -> FastAPI:
    app = FastAPI(title="clinic-scribe", version="0.1.0")

    @app.exception_handler(NotFound)
    async def _not_found(request, exc):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(WrongState)
    async def _wrong_state(request, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(QualityRejected)
    async def _quality(request, exc):
        return JSONResponse(
            status_code=422, content={"detail": str(exc), "reasons": exc.reasons}
        )

    @app.exception_handler(MalformedContainer)
    async def _malformed(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(UnsupportedEncoding)
    async def _unsupported(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(StorageFailure)
    async def _storage(request, exc):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/sessions", status_code=201)
    def create_session():
        record = orchestrator.create_session()
        return {"session_id": record.session_id}

    @app.post("/v1/sessions/{session_id}/audio")
    def attach_audio(session_id: str, file: UploadFile):
        data = file.file.read()
        name = file.filename or "upload"
        container = "wav" if name.lower().endswith(".wav") else "unknown"
        raw = RawAudioFile(data, declared_container=container, source_name=name)
        return orchestrator.attach_audio(session_id, raw).to_dict()

    @app.post("/v1/sessions/{session_id}/run")
    def run_pipeline(session_id: str):
        return orchestrator.run_pipeline(session_id).to_dict()

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return orchestrator.get_session(session_id).to_dict()

    @app.get("/v1/sessions/{session_id}/fill-plan")
    def get_fill_plan(session_id: str):
        record = orchestrator.get_session(session_id)
        if record.fill_plan is None:
            raise HTTPException(status_code=409, detail="fill plan is not ready")
        return fill_plan_to_dict(record.fill_plan)

    @app.get("/v1/sessions")
    def list_sessions(state: str | None = None):
        try:
            parsed = SessionState(state) if state else None
        except ValueError:
            raise HTTPException(status_code=400, detail=f"unknown state filter: {state}")
        return [r.to_dict() for r in orchestrator.list_sessions(parsed)]

    return app
