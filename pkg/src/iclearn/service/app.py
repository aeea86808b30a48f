"""HTTP surface for interactive annotation sessions.

    POST /sessions                       create a session, start pretraining
    GET  /sessions                       list known session ids
    GET  /sessions/{id}/status           phase, counts, last error
    GET  /sessions/{id}/queries          the batch awaiting labels
    POST /sessions/{id}/labels           submit that batch in full
    GET  /sessions/{id}/embedding        2-D latent map with per-point scores
    GET  /sessions/{id}/history          one record per completed round
    GET  /sessions/{id}/samples/{sid}    keypoint frames for playback

Errors are JSON objects {"code", "message", "detail"}: 404 for unknown ids,
409 for a request the current phase cannot serve, 422 for invalid payloads.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .manager import SessionManager, WrongPhase


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


class CreateSessionRequest(BaseModel):
    dataset: str
    train_split: str = "train"
    test_split: str | None = None
    class_names: list[str] | None = None
    model: dict = Field(default_factory=dict)
    loop: dict = Field(default_factory=dict)


class SubmitLabelsRequest(BaseModel):
    labels: dict[str, int | str]


def create_app(store_dir: str, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="annotation service")
    manager = SessionManager(store_dir)
    app.state.manager = manager

    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "validation_error",
                "message": "request body failed validation",
                "detail": exc.errors(),
            },
        )

    def _session(session_id: str):
        try:
            return manager.get(session_id)
        except KeyError:
            raise ServiceError(404, "session_not_found", f"no session {session_id!r}")

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest):
        try:
            session = manager.create(request.model_dump())
        except (ValueError, TypeError) as exc:
            raise ServiceError(422, "invalid_session_request", str(exc))
        return session.status()

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": manager.list_ids()}

    @app.get("/sessions/{session_id}/status")
    def status(session_id: str):
        return _session(session_id).status()

    @app.get("/sessions/{session_id}/queries")
    def queries(session_id: str):
        try:
            return _session(session_id).queries()
        except WrongPhase as exc:
            raise ServiceError(409, "wrong_phase", str(exc))

    @app.post("/sessions/{session_id}/labels")
    def submit_labels(session_id: str, request: SubmitLabelsRequest):
        session = _session(session_id)
        try:
            return session.submit_labels(request.labels)
        except WrongPhase as exc:
            raise ServiceError(409, "wrong_phase", str(exc))
        except ValueError as exc:
            raise ServiceError(422, "invalid_labels", str(exc))

    @app.get("/sessions/{session_id}/embedding")
    def embedding(session_id: str):
        try:
            return _session(session_id).embedding()
        except WrongPhase as exc:
            raise ServiceError(409, "wrong_phase", str(exc))

    @app.get("/sessions/{session_id}/history")
    def history(session_id: str):
        return _session(session_id).history()

    @app.get("/sessions/{session_id}/samples/{sample_id}")
    def sample(session_id: str, sample_id: str):
        try:
            return _session(session_id).sample_payload(sample_id)
        except KeyError:
            raise ServiceError(404, "sample_not_found", f"no sample {sample_id!r}")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
