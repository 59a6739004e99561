"""HTTP prediction service backing the dashboard.

The service is stateless and read-only over a single immutable model loaded
at startup; concurrent requests never mutate shared state and responses are
deterministic per request. Payloads are JSON with an explicit schema_version
field. Request bodies beyond the configured byte limit get 413; any malformed
request gets 400 with a machine-readable error code.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import InputError, NoModelledTokensError
from .model import EmotionModel, model_profiles, topic_top_words
from .predict import predict_text, result_to_dict
from .topics import distance_matrix, sentiment_topic_density, topic_positivity

SCHEMA_VERSION = 1
DEFAULT_MAX_BYTES = 64 * 1024
DEFAULT_TOP_K_CAP = 50


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"schema_version": SCHEMA_VERSION, "error": {"code": code, "message": message}},
    )


def _jsonable(x: float) -> float | str:
    """Floats for JSON; infinities and NaN become strings."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def create_app(
    model: EmotionModel,
    max_bytes: int = DEFAULT_MAX_BYTES,
    top_k_cap: int = DEFAULT_TOP_K_CAP,
    static_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service app; static_dir optionally hosts the dashboard at /."""
    app = FastAPI(title="emorec", docs_url=None, redoc_url=None)

    @app.get("/health")
    def health():
        return {"schema_version": SCHEMA_VERSION, "status": "ok"}

    @app.get("/model")
    def model_info():
        return {
            "schema_version": SCHEMA_VERSION,
            "variant": model.variant,
            "n_topics": model.partition.n_t if model.variant == "topic" else None,
            "n_emotions": len(model.emotions),
            "epsilon": model.epsilon,
            "format_version": model.format_version,
        }

    @app.get("/topics")
    def topics(top_words: int = 10):
        if model.variant != "topic":
            return _error(400, "topic_variant_required", "model has no topic partition")
        profiles = model_profiles(model)
        priors = {e: model.prior_of(e) for e in model.emotions}
        try:
            pos = sentiment_topic_density(profiles, priors, "positive", model.polarity)
            neg = sentiment_topic_density(profiles, priors, "negative", model.polarity)
        except InputError as exc:
            return _error(400, "positivity_undefined", str(exc))
        payload = []
        for k in range(model.partition.n_t):
            payload.append(
                {
                    "topic": k,
                    "top_words": topic_top_words(model, k, top_words),
                    "positive_likelihood": float(pos[k]),
                    "negative_likelihood": float(neg[k]),
                    "positivity": _jsonable(topic_positivity(k, pos, neg)),
                }
            )
        return {"schema_version": SCHEMA_VERSION, "topics": payload}

    @app.get("/emotions/distances")
    def distances():
        labels, matrix = distance_matrix(model_profiles(model))
        return {
            "schema_version": SCHEMA_VERSION,
            "labels": labels,
            "matrix": [[float(v) for v in row] for row in matrix],
        }

    @app.post("/predict")
    async def predict(request: Request):
        body = await request.body()
        if len(body) > max_bytes:
            return _error(413, "payload_too_large", f"request exceeds {max_bytes} bytes")
        try:
            payload = json.loads(body)
        except json.JSONDecodeError as exc:
            return _error(400, "malformed_request", f"invalid JSON: {exc.msg}")
        if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
            return _error(400, "malformed_request", "expected {'text': str, 'top_k': int?}")
        top_k = payload.get("top_k", 3)
        if not isinstance(top_k, int) or isinstance(top_k, bool) or top_k < 1:
            return _error(400, "invalid_top_k", "top_k must be a positive integer")
        try:
            result = predict_text(model, payload["text"], top_k=min(top_k, top_k_cap))
        except NoModelledTokensError as exc:
            return _error(400, "no_modelled_tokens", str(exc))
        return result_to_dict(result, schema_version=SCHEMA_VERSION)

    if static_dir is not None:
        static_dir = Path(static_dir)
        if not static_dir.is_dir():
            raise InputError(f"static directory not found: {static_dir}")
        # mounted after the API routes, so those keep precedence
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="dashboard")

    return app
