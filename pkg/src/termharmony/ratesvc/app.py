"""HTTP+JSON surface of the rating service."""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .instructions import instructions_payload
from .service import RatingService, ServiceError


class RegisterRequest(BaseModel):
    code: str


class ConfirmRequest(BaseModel):
    rater_id: str


class RatingRequest(BaseModel):
    rater_id: str
    pair_id: str
    category: int


class PostponeRequest(BaseModel):
    rater_id: str
    pair_id: str


def create_app(service: RatingService) -> FastAPI:
    app = FastAPI(title="termharmony rating service")
    app.state.service = service
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ServiceError)
    async def service_error_handler(_: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": exc.message},
        )

    @app.post("/register")
    def register(body: RegisterRequest):
        rater_id = service.register(body.code)
        return {"rater_id": rater_id, "total_items": service.config.total_items}

    @app.get("/instructions")
    def instructions(language: str = "en"):
        try:
            return instructions_payload(language, service.config.example_sets)
        except KeyError:
            raise ServiceError("unknown_language", f"unsupported language {language!r}", 400)

    @app.post("/confirm")
    def confirm(body: ConfirmRequest):
        service.confirm_instructions(body.rater_id)
        return {"confirmed": True}

    @app.get("/next")
    def next_item(rater_id: str):
        item = service.next_item(rater_id)
        if item is None:
            return {"done": True}
        return {"done": False, "item": item}

    @app.post("/rating")
    def rating(body: RatingRequest):
        progress = service.submit_rating(body.rater_id, body.pair_id, body.category)
        return {"accepted": True, "progress": progress}

    @app.post("/postpone")
    def postpone(body: PostponeRequest):
        progress = service.postpone(body.rater_id, body.pair_id)
        return {"postponed": True, "progress": progress}

    @app.get("/progress")
    def progress(rater_id: str):
        return service.progress(rater_id)

    @app.get("/export")
    def export():
        dataset_tsv, controls_tsv = service.export_dataset()
        return {"dataset": dataset_tsv, "controls": controls_tsv}

    return app
