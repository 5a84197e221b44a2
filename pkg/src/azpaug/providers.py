"""Clients for the three external capabilities: masked-LM prediction,
translation, and POS tagging.

Each capability has one wire shape (JSON over POST at /v1/mask,
/v1/translate, /v1/tag), an HTTP client with client-side rate limiting and
capped-exponential retry on transient failures, and a deterministic
file-backed stub for offline runs and tests. Every response is validated
against its invariants before reaching callers; a violating response is a
permanent protocol error, never retried.

Endpoint specs are either an ``http(s)://`` URL or ``stub:PATH``.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Callable, Optional

import requests

from .errors import (
    ProtocolError,
    RetryExhaustedError,
    TransientProviderError,
    ValidationError,
)
from .normalize import normalize_text

MASK_MARK = "[MASK]"

MASK_PATH = "/v1/mask"
TRANSLATE_PATH = "/v1/translate"
TAG_PATH = "/v1/tag"

ENV_LM_URL = "AZP_LM_URL"
ENV_MT_URL = "AZP_MT_URL"
ENV_TAG_URL = "AZP_TAG_URL"


# ---------------------------------------------------------------------------
# Wire types and validators


@dataclass(frozen=True)
class MaskRequest:
    tokens: tuple
    mask_index: int
    top_k: int


@dataclass(frozen=True)
class MaskCandidate:
    token: str
    score: float


@dataclass(frozen=True)
class MaskResponse:
    candidates: tuple


@dataclass(frozen=True)
class TranslateRequest:
    text: str
    source_lang: str
    target_lang: str


@dataclass(frozen=True)
class TranslateResponse:
    text: str


@dataclass(frozen=True)
class TagRequest:
    tokens: tuple


@dataclass(frozen=True)
class TagResponse:
    tags: tuple


def validate_mask_request(req: MaskRequest) -> None:
    if not req.tokens:
        raise ValidationError("mask request has no tokens")
    if not 0 <= req.mask_index < len(req.tokens):
        raise ValidationError(f"mask_index {req.mask_index} out of range for {len(req.tokens)} tokens")
    if req.top_k < 1:
        raise ValidationError(f"top_k must be >= 1, got {req.top_k}")


def validate_mask_response(resp: MaskResponse, top_k: int) -> None:
    if len(resp.candidates) > top_k:
        raise ProtocolError(f"{len(resp.candidates)} candidates exceed top_k={top_k}")
    previous = None
    for cand in resp.candidates:
        if not isinstance(cand.token, str) or not cand.token:
            raise ProtocolError(f"bad candidate token {cand.token!r}")
        if not 0.0 < cand.score <= 1.0:
            raise ProtocolError(f"candidate score {cand.score} outside (0, 1]")
        if previous is not None and cand.score > previous:
            raise ProtocolError("candidate scores are not descending")
        previous = cand.score


def validate_translate_request(req: TranslateRequest) -> None:
    for code in (req.source_lang, req.target_lang):
        if len(code) != 2 or not code.isalpha():
            raise ValidationError(f"language code {code!r} is not a 2-letter code")


def validate_translate_response(resp: TranslateResponse) -> None:
    if not isinstance(resp.text, str):
        raise ProtocolError("translation text is not a string")


def validate_tag_request(req: TagRequest) -> None:
    if not req.tokens:
        raise ValidationError("tag request has no tokens")


def validate_tag_response(resp: TagResponse, token_count: int) -> None:
    if len(resp.tags) != token_count:
        raise ProtocolError(f"{len(resp.tags)} tags for {token_count} tokens")
    for tag in resp.tags:
        if not isinstance(tag, str) or not tag:
            raise ProtocolError(f"bad tag {tag!r}")


# ---------------------------------------------------------------------------
# Retry and rate limiting


@dataclass
class RetryPolicy:
    """Capped exponential backoff over transient failures."""

    max_attempts: int = 3
    base_delay: float = 0.5
    max_delay: float = 5.0
    sleep_fn: Callable[[float], None] = time.sleep

    def execute(self, fn: Callable):
        delay = self.base_delay
        last: Optional[Exception] = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                return fn()
            except TransientProviderError as exc:
                last = exc
                if attempt == self.max_attempts:
                    break
                self.sleep_fn(delay)
                delay = min(delay * 2.0, self.max_delay)
        raise RetryExhaustedError(self.max_attempts, last)


class TokenBucket:
    """Client-side rate limiter; acquire() blocks until a token is free."""

    def __init__(self, rate: float = 10.0, capacity: float = 10.0,
                 clock: Callable[[], float] = time.monotonic,
                 sleep_fn: Callable[[float], None] = time.sleep):
        if rate <= 0:
            raise ValidationError(f"rate must be positive, got {rate}")
        self.rate = rate
        self.capacity = capacity
        self._clock = clock
        self._sleep = sleep_fn
        self._tokens = capacity
        self._updated = clock()

    def acquire(self) -> None:
        while True:
            now = self._clock()
            self._tokens = min(self.capacity, self._tokens + (now - self._updated) * self.rate)
            self._updated = now
            if self._tokens >= 1.0:
                self._tokens -= 1.0
                return
            self._sleep((1.0 - self._tokens) / self.rate)


# ---------------------------------------------------------------------------
# HTTP transport


class HttpEndpoint:
    def __init__(self, base_url: str, timeout: float = 10.0,
                 retry: Optional[RetryPolicy] = None,
                 bucket: Optional[TokenBucket] = None,
                 session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retry = retry or RetryPolicy()
        self.bucket = bucket or TokenBucket()
        self._session = session or requests

    def post(self, path: str, payload: dict) -> dict:
        def attempt() -> dict:
            self.bucket.acquire()
            try:
                response = self._session.post(
                    self.base_url + path, json=payload, timeout=self.timeout
                )
            except requests.Timeout as exc:
                raise TransientProviderError(f"timeout calling {path}: {exc}") from exc
            except requests.ConnectionError as exc:
                raise TransientProviderError(f"connection failure calling {path}: {exc}") from exc
            if response.status_code >= 500:
                raise TransientProviderError(f"{path} returned {response.status_code}")
            if response.status_code >= 400:
                raise ProtocolError(f"{path} returned {response.status_code}: {response.text[:200]}")
            try:
                body = response.json()
            except ValueError as exc:
                raise ProtocolError(f"{path} returned non-JSON body") from exc
            if not isinstance(body, dict):
                raise ProtocolError(f"{path} returned a non-object body")
            return body

        return self.retry.execute(attempt)


class _Counting:
    def __init__(self):
        self.calls = 0


class HttpMaskProvider(_Counting):
    def __init__(self, endpoint: HttpEndpoint):
        super().__init__()
        self.endpoint = endpoint

    def mask_topk(self, req: MaskRequest) -> MaskResponse:
        self.calls += 1
        body = self.endpoint.post(MASK_PATH, {
            "tokens": list(req.tokens),
            "mask_index": req.mask_index,
            "top_k": req.top_k,
        })
        try:
            candidates = tuple(
                MaskCandidate(token=c["token"], score=float(c["score"]))
                for c in body["candidates"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed mask response: {exc}") from exc
        return MaskResponse(candidates=candidates)


class HttpTranslateProvider(_Counting):
    def __init__(self, endpoint: HttpEndpoint):
        super().__init__()
        self.endpoint = endpoint

    def translate(self, req: TranslateRequest) -> TranslateResponse:
        self.calls += 1
        body = self.endpoint.post(TRANSLATE_PATH, {
            "text": req.text,
            "source_lang": req.source_lang,
            "target_lang": req.target_lang,
        })
        if "text" not in body or not isinstance(body["text"], str):
            raise ProtocolError("malformed translate response: missing text")
        return TranslateResponse(text=body["text"])


class HttpTagProvider(_Counting):
    def __init__(self, endpoint: HttpEndpoint):
        super().__init__()
        self.endpoint = endpoint

    def tag(self, req: TagRequest) -> TagResponse:
        self.calls += 1
        body = self.endpoint.post(TAG_PATH, {"tokens": list(req.tokens)})
        if "tags" not in body or not isinstance(body["tags"], list):
            raise ProtocolError("malformed tag response: missing tags")
        return TagResponse(tags=tuple(body["tags"]))


# ---------------------------------------------------------------------------
# File-backed stubs


def mask_context_key(tokens, mask_index: int) -> str:
    """Whitespace-insensitive, normalization-stable key for a mask context."""
    parts = [MASK_MARK if i == mask_index else tok for i, tok in enumerate(tokens)]
    return normalize_text(" ".join(" ".join(parts).split()))


class StubMaskProvider(_Counting):
    """Deterministic mask predictions from a fixture table.

    File schema: ``{"entries": [{"context": "... [MASK] ...",
    "candidates": [[token, score], ...]}], "default": [[token, score], ...]}``.
    Candidate lists must already be score-descending with scores in (0, 1];
    violating fixtures are rejected at load time.
    """

    def __init__(self, path):
        super().__init__()
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        self._table = {}
        for entry in data.get("entries", []):
            key = normalize_text(" ".join(entry["context"].split()))
            self._table[key] = self._load_candidates(entry["candidates"], path)
        self._default = tuple(self._load_candidates(data.get("default", []), path))

    @staticmethod
    def _load_candidates(rows, path) -> tuple:
        candidates = tuple(MaskCandidate(token=tok, score=float(score)) for tok, score in rows)
        try:
            validate_mask_response(MaskResponse(candidates=candidates), top_k=len(candidates) or 1)
        except ProtocolError as exc:
            raise ValidationError(f"bad mask stub {path}: {exc}") from exc
        return candidates

    def mask_topk(self, req: MaskRequest) -> MaskResponse:
        self.calls += 1
        found = self._table.get(mask_context_key(req.tokens, req.mask_index), self._default)
        return MaskResponse(candidates=found[:req.top_k])


class StubTranslateProvider(_Counting):
    """Sentence-table translator; unmatched text passes through unchanged,
    so an empty table is the identity translator.

    File schema: ``{"entries": [{"src": "ar", "tgt": "en",
    "text": "...", "out": "..."}]}``.
    """

    def __init__(self, path=None):
        super().__init__()
        self._table = {}
        if path is not None:
            with open(path, encoding="utf-8") as handle:
                data = json.load(handle)
            for entry in data.get("entries", []):
                key = (entry["src"], entry["tgt"], " ".join(entry["text"].split()))
                self._table[key] = entry["out"]

    def translate(self, req: TranslateRequest) -> TranslateResponse:
        self.calls += 1
        key = (req.source_lang, req.target_lang, " ".join(req.text.split()))
        return TranslateResponse(text=self._table.get(key, req.text))


class StubTagProvider(_Counting):
    """Surface-to-tag table with a default tag for unknown surfaces.

    File schema: ``{"tags": {"surface": "TAG", ...}, "default": "NN"}``.
    Lookup is on normalized surfaces.
    """

    def __init__(self, path):
        super().__init__()
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        self._table = {normalize_text(s): t for s, t in data.get("tags", {}).items()}
        self._default = data.get("default", "NN")

    def tag(self, req: TagRequest) -> TagResponse:
        self.calls += 1
        return TagResponse(
            tags=tuple(self._table.get(normalize_text(tok), self._default) for tok in req.tokens)
        )


# ---------------------------------------------------------------------------
# Endpoint-spec factories and the operation surface


def _split_spec(spec: str):
    if spec.startswith("stub:"):
        return ("stub", spec[len("stub:"):])
    if spec.startswith("http://") or spec.startswith("https://"):
        return ("http", spec)
    raise ValidationError(f"endpoint spec {spec!r} is neither a URL nor stub:PATH")


def open_mask_provider(spec: str, **http_kwargs):
    kind, value = _split_spec(spec)
    if kind == "stub":
        return StubMaskProvider(value)
    return HttpMaskProvider(HttpEndpoint(value, **http_kwargs))


def open_translate_provider(spec: str, **http_kwargs):
    kind, value = _split_spec(spec)
    if kind == "stub":
        return StubTranslateProvider(value)
    return HttpTranslateProvider(HttpEndpoint(value, **http_kwargs))


def open_tag_provider(spec: str, **http_kwargs):
    kind, value = _split_spec(spec)
    if kind == "stub":
        return StubTagProvider(value)
    return HttpTagProvider(HttpEndpoint(value, **http_kwargs))


def mask_topk(req: MaskRequest, provider) -> MaskResponse:
    """Validated top-k mask prediction through any mask provider."""
    validate_mask_request(req)
    resp = provider.mask_topk(req)
    validate_mask_response(resp, req.top_k)
    return resp


def translate(req: TranslateRequest, provider) -> TranslateResponse:
    """Validated translation through any translate provider."""
    validate_translate_request(req)
    resp = provider.translate(req)
    validate_translate_response(resp)
    return resp


def tag(req: TagRequest, provider) -> TagResponse:
    """Validated POS tagging through any tag provider."""
    validate_tag_request(req)
    resp = provider.tag(req)
    validate_tag_response(resp, len(req.tokens))
    return resp
