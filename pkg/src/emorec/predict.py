"""Single prediction path shared by the CLI and the HTTP service.

Both front ends call predict_text so they produce identical numbers for
identical input.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import PreprocessConfig, RawDocument, preprocess
from .errors import InputError, NoModelledTokensError
from .model import (
    EmotionModel,
    RankedPrediction,
    posterior,
    topic_top_words,
    _feature_counts,
)
from .topics import doc_topic_density


@dataclass(frozen=True)
class EmotionEntry:
    label: str
    prior: float
    posterior: float


@dataclass(frozen=True)
class TopicAttribution:
    topic: int
    top_words: list[str]
    density: float


@dataclass(frozen=True)
class PredictResult:
    positive_posterior: float
    emotions: list[EmotionEntry]
    topic_attribution: list[TopicAttribution]
    warnings: list[str]
    prediction: RankedPrediction


def text_to_bow(model: EmotionModel, text: str) -> dict[str, int]:
    """Tokenize raw text with the model's preprocessing settings."""
    cfg = PreprocessConfig(min_count=1, lowercase=model.lowercase)
    tokens = preprocess(RawDocument(id="query", text=text, emotions=frozenset()), cfg)
    return dict(Counter(tokens))


def predict_text(
    model: EmotionModel, text: str, top_k: int = 3, attribution_words: int = 10
) -> PredictResult:
    """Rank emotions for raw text and assemble the response payload.

    Out-of-domain tokens are dropped (and surfaced as a warning); the topic
    attribution lists the query's topic densities with each topic's most
    frequent training words.
    """
    if top_k < 1:
        raise InputError(f"top_k must be >= 1, got {top_k}")
    bow = text_to_bow(model, text)
    if not bow:
        raise NoModelledTokensError("no modelled tokens: text produced no tokens")
    pred = posterior(model, bow)

    _, _, dropped = _feature_counts(model, bow)
    warnings = []
    if dropped:
        shown = ", ".join(dropped[:10]) + ("..." if len(dropped) > 10 else "")
        warnings.append(f"dropped {len(dropped)} out-of-vocabulary tokens: {shown}")

    k = min(top_k, len(pred.ranking))
    entries = [
        EmotionEntry(label=e, prior=model.prior_of(e), posterior=pred.posterior[e])
        for e in pred.ranking[:k]
    ]

    attribution: list[TopicAttribution] = []
    if model.variant == "topic":
        in_domain = {w: c for w, c in bow.items() if model.feature_of(w) is not None}
        density = doc_topic_density(in_domain, model.partition)
        used = [k_ for k_ in range(model.partition.n_t) if density[k_] > 0]
        used.sort(key=lambda k_: (-density[k_], k_))
        attribution = [
            TopicAttribution(
                topic=k_,
                top_words=topic_top_words(model, k_, attribution_words),
                density=float(density[k_]),
            )
            for k_ in used
        ]

    return PredictResult(
        positive_posterior=pred.positive_posterior,
        emotions=entries,
        topic_attribution=attribution,
        warnings=warnings,
        prediction=pred,
    )


def result_to_dict(result: PredictResult, schema_version: int = 1) -> dict:
    """JSON-ready payload; the same shape the HTTP endpoint returns."""
    return {
        "schema_version": schema_version,
        "positive_posterior": result.positive_posterior,
        "emotions": [
            {"label": e.label, "prior": e.prior, "posterior": e.posterior}
            for e in result.emotions
        ],
        "topic_attribution": [
            {"topic": a.topic, "top_words": a.top_words, "density": a.density}
            for a in result.topic_attribution
        ],
        "warnings": result.warnings,
    }
