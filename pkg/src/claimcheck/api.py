"""HTTP service: headline detection, classification, similar claims, votes.

All error responses share one shape, {"error": {"code", "message"}}, with a
closed set of machine-readable codes so clients can branch without parsing
prose. Handlers that do blocking work (page fetches, fsync on the vote log)
run off the event loop so one slow request cannot stall the rest.
"""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from . import checkworthy, headline, similarity, votestore
from .classifier import ModelArtifact, load_model
from .config import Settings, load_settings
from .corpus import Corpus, load_corpus

# code -> HTTP status; every error the service emits is listed here.
ERROR_STATUS = {
    "missing_url": 400,
    "malformed_url": 400,
    "no_headline": 404,
    "fetch_failed": 502,
    "missing_headline": 400,
    "model_unavailable": 503,
    "invalid_paging": 400,
    "malformed_body": 400,
    "invalid_value": 400,
    "invalid_installation": 400,
    "missing_parameter": 400,
    "already_voted": 409,
    "not_voted": 404,
    "vote_required": 403,
}


def _error(code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=ERROR_STATUS[code],
        content={"error": {"code": code, "message": message}},
    )


def create_app(
    settings: Settings | None = None,
    corpus: Corpus | None = None,
    model: ModelArtifact | None = None,
    store: "votestore.VoteStore | None" = None,
) -> FastAPI:
    """Build the service; pass corpus/model/store directly to skip disk IO."""
    settings = settings or load_settings()
    if corpus is None and settings.corpus_path:
        corpus = load_corpus(settings.corpus_path)
    if corpus is None:
        corpus = Corpus(claims=[])
    if model is None and settings.model_path:
        model = load_model(settings.model_path)
    owns_store = store is None
    if store is None:
        store = votestore.VoteStore(settings.data_dir)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        if owns_store:
            store.close()

    app = FastAPI(lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.settings = settings
    app.state.corpus = corpus
    app.state.model = model
    app.state.store = store

    @app.get("/headline_detection")
    def headline_detection(url: str | None = None):
        if not url:
            return _error("missing_url", "url query parameter is required")
        try:
            page = headline.fetch_page(url, settings.fetch_limits)
            extracted = headline.extract_headline(page.body)
        except headline.MalformedUrl as exc:
            return _error("malformed_url", str(exc))
        except headline.NoHeadline as exc:
            return _error("no_headline", str(exc))
        except headline.FetchError as exc:
            return _error("fetch_failed", str(exc))
        body: dict = {"headline": extracted.text}
        if extracted.author is not None:
            body["author"] = extracted.author
        return JSONResponse(content=body)

    @app.get("/ml_classification")
    def ml_classification(headline: str | None = None):
        text = headline
        if text is None or not text.strip():
            return _error("missing_headline", "headline query parameter is required")
        score = checkworthy.heuristic_score(text)
        if score < settings.headline_checkworthy_threshold:
            return JSONResponse(
                content={"checkworthy": False, "verdict": None, "probability": None}
            )
        if model is None:
            return _error("model_unavailable", "no model artifact is loaded")
        verdict, probability = model.predict(text)
        return JSONResponse(
            content={
                "checkworthy": True,
                "verdict": int(verdict),
                "probability": probability,
            }
        )

    @app.get("/get_similar_claims")
    def get_similar_claims(
        headline: str | None = None,
        page: str | None = None,
        page_size: str | None = None,
    ):
        if headline is None or not headline.strip():
            return _error("missing_headline", "headline query parameter is required")
        try:
            page_index = int(page) if page is not None else 0
            size = int(page_size) if page_size is not None else similarity.DEFAULT_PAGE_SIZE
        except ValueError:
            return _error("invalid_paging", "page and page_size must be integers")
        if page_index < 0 or size < 1:
            return _error("invalid_paging", "page must be >= 0 and page_size >= 1")
        result = similarity.get_similar_claims(
            headline,
            corpus,
            threshold=settings.similarity_threshold,
            page_index=page_index,
            page_size=size,
        )
        return JSONResponse(
            content={
                "matches": [
                    {
                        "claim_text": match.claim.text,
                        "original_label": match.claim.original_label.value,
                        "verdict": int(match.claim.verdict),
                        "score": match.score,
                    }
                    for match in result.items
                ],
                "page": result.page_index,
                "page_size": result.page_size,
                "total_matches": result.total_matches,
            }
        )

    async def _vote_body(request: Request, required: tuple[str, ...]) -> dict | JSONResponse:
        try:
            payload = await request.json()
        except Exception:
            return _error("malformed_body", "request body must be a JSON object")
        if not isinstance(payload, dict):
            return _error("malformed_body", "request body must be a JSON object")
        missing = [key for key in required if not isinstance(payload.get(key), str)]
        if missing:
            return _error(
                "malformed_body", f"missing or non-string fields: {', '.join(missing)}"
            )
        return payload

    @app.post("/votes")
    async def cast_vote(request: Request):
        payload = await _vote_body(request, ("installation_id", "url", "value"))
        if isinstance(payload, JSONResponse):
            return payload
        try:
            url = headline.canonicalize_url(payload["url"])
        except headline.MalformedUrl as exc:
            return _error("malformed_url", str(exc))
        try:
            await run_in_threadpool(
                store.cast_vote, payload["installation_id"], url, payload["value"]
            )
        except votestore.InvalidInstallation as exc:
            return _error("invalid_installation", str(exc))
        except votestore.InvalidVoteValue as exc:
            return _error("invalid_value", str(exc))
        except votestore.AlreadyVoted as exc:
            return _error("already_voted", str(exc))
        return JSONResponse(status_code=201, content={"status": "ok"})

    @app.delete("/votes")
    async def revoke_vote(request: Request):
        payload = await _vote_body(request, ("installation_id", "url"))
        if isinstance(payload, JSONResponse):
            return payload
        try:
            url = headline.canonicalize_url(payload["url"])
        except headline.MalformedUrl as exc:
            return _error("malformed_url", str(exc))
        try:
            await run_in_threadpool(store.revoke_vote, payload["installation_id"], url)
        except votestore.InvalidInstallation as exc:
            return _error("invalid_installation", str(exc))
        except votestore.NotVoted as exc:
            return _error("not_voted", str(exc))
        return JSONResponse(content={"status": "ok"})

    @app.get("/votes")
    def get_tally(installation_id: str | None = None, url: str | None = None):
        if not installation_id or not url:
            return _error(
                "missing_parameter", "installation_id and url parameters are required"
            )
        try:
            canonical = headline.canonicalize_url(url)
        except headline.MalformedUrl as exc:
            return _error("malformed_url", str(exc))
        try:
            tally = store.get_tally(installation_id, canonical)
        except votestore.InvalidInstallation as exc:
            return _error("invalid_installation", str(exc))
        except votestore.NotVotedYet as exc:
            return _error("vote_required", str(exc))
        return JSONResponse(content=tally.to_dict())

    @app.get("/healthz")
    def healthz():
        return JSONResponse(
            content={
                "status": "ok",
                "model_loaded": model is not None,
                "corpus_size": len(corpus),
            }
        )

    return app
