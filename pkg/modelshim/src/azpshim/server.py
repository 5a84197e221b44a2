"""FastAPI app exposing the provider wire protocol over loaded backends.

Paths: POST /v1/mask, /v1/translate, /v1/tag; GET /health. Request-shape
violations (including an out-of-range mask index) are 4xx; backend
failures are 5xx with a machine-readable reason.
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from typing import List

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, field_validator

from .backends import BackendError


class MaskBody(BaseModel):
    tokens: List[str] = Field(min_length=1)
    mask_index: int = Field(ge=0)
    top_k: int = Field(ge=1)

    @field_validator("tokens")
    @classmethod
    def tokens_non_empty(cls, value):
        if any(not t for t in value):
            raise ValueError("tokens must be non-empty strings")
        return value


class TranslateBody(BaseModel):
    text: str
    source_lang: str = Field(min_length=2, max_length=2, pattern="^[a-z]{2}$")
    target_lang: str = Field(min_length=2, max_length=2, pattern="^[a-z]{2}$")


class TagBody(BaseModel):
    tokens: List[str] = Field(default=None)
    text: str = Field(default=None)


def create_app(mask_backend=None, translate_backend=None, tag_backend=None) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.status = "ready"
        yield
        app.state.status = "loading"

    app = FastAPI(title="azp-modelshim", lifespan=lifespan)
    app.state.status = "loading"

    @app.exception_handler(BackendError)
    async def backend_error(_request: Request, exc: BackendError):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    @app.get("/health")
    def health():
        return {"status": app.state.status}

    @app.post("/v1/mask")
    def mask(body: MaskBody):
        if mask_backend is None:
            return JSONResponse(status_code=404, content={"error": "no mask backend configured"})
        if body.mask_index >= len(body.tokens):
            return JSONResponse(
                status_code=422,
                content={"error": f"mask_index {body.mask_index} out of range for {len(body.tokens)} tokens"},
            )
        try:
            candidates = mask_backend.predict(body.tokens, body.mask_index, body.top_k)
        except BackendError:
            raise
        except Exception as exc:  # surfaced as a per-request model error
            raise BackendError(f"mask prediction failed: {exc}") from exc
        return {"candidates": [{"token": c.token, "score": c.score} for c in candidates]}

    @app.post("/v1/translate")
    def translate(body: TranslateBody):
        if translate_backend is None:
            return JSONResponse(status_code=404, content={"error": "no translate backend configured"})
        try:
            text = translate_backend.translate(body.text, body.source_lang, body.target_lang)
        except Exception as exc:
            raise BackendError(f"translation failed: {exc}") from exc
        return {"text": text}

    @app.post("/v1/tag")
    def tag(body: TagBody):
        if tag_backend is None:
            return JSONResponse(status_code=404, content={"error": "no tag backend configured"})
        tokens = body.tokens if body.tokens is not None else (body.text or "").split()
        if not tokens:
            return JSONResponse(status_code=422, content={"error": "no tokens to tag"})
        try:
            tags = tag_backend.tag(tokens)
        except Exception as exc:
            raise BackendError(f"tagging failed: {exc}") from exc
        return {"tags": list(tags)}

    return app
