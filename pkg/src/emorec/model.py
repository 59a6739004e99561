"""Training and application of the probabilistic emotion recommender.

A trained model holds empirical-Bayes emotion priors (tag-frequency MLE) and
one conditional density per emotion: over topics when a word-topic partition
is supplied (the word-given-topic factor cancels between numerator and
denominator, so only topic densities are needed), or over the full vocabulary
otherwise. Posteriors are computed in the log domain and normalized with the
log-sum-exp trick so long documents cannot underflow. Zero density entries
are raised to a small epsilon and the profile renormalized, keeping every
posterior well-defined.

Models are immutable and safe to share across threads; training is
single-threaded and deterministic.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Mapping, Sequence

import numpy as np

from .corpus import Document, PolarityMap, POSITIVE, NEGATIVE
from .errors import FormatVersionError, InputError, NoModelledTokensError
from .topics import EmotionTopicProfile, TopicPartition, emotion_topic_profile

FORMAT_VERSION = 1
DEFAULT_EPSILON = 1e-10

Variant = Literal["topic", "full_vocab"]


@dataclass(frozen=True)
class EmotionModel:
    """Trained recommender: priors plus per-emotion conditional densities.

    `profiles[i]` is the density row for `emotions[i]`: over topic ids for the
    topic variant, over `feature_names` words for the full-vocabulary variant.
    `word_counts` keeps the training-corpus word totals for reporting.
    """

    variant: Variant
    emotions: tuple[str, ...]
    priors: np.ndarray
    profiles: np.ndarray
    polarity: PolarityMap
    epsilon: float
    partition: TopicPartition | None = None
    feature_names: tuple[str, ...] | None = None
    word_counts: Mapping[str, int] = field(default_factory=dict)
    supports: Mapping[str, int] = field(default_factory=dict)  # docs per emotion
    lowercase: bool = True
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.variant == "topic":
            if self.partition is None:
                raise InputError("topic variant requires a partition")
        elif self.variant == "full_vocab":
            if self.partition is not None:
                raise InputError("full_vocab variant must not carry a partition")
            if self.feature_names is None:
                raise InputError("full_vocab variant requires feature_names")
        else:
            raise InputError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "_feature_index", self._build_feature_index())

    def _build_feature_index(self) -> Mapping[str, int]:
        if self.variant == "topic":
            return self.partition.assignment
        return {w: i for i, w in enumerate(self.feature_names)}

    @property
    def n_features(self) -> int:
        return self.profiles.shape[1]

    def feature_of(self, word: str) -> int | None:
        """Column index a word maps to, or None when out of domain."""
        return self._feature_index.get(word)

    def prior_of(self, emotion: str) -> float:
        return float(self.priors[self.emotions.index(emotion)])


@dataclass(frozen=True)
class RankedPrediction:
    """Posterior over the emotion universe plus the positive-sentiment marginal."""

    posterior: Mapping[str, float]
    ranking: tuple[str, ...]
    positive_posterior: float


def _smooth(profile: np.ndarray, epsilon: float) -> np.ndarray:
    """Raise zero entries to epsilon, then renormalize onto the simplex."""
    out = np.where(profile == 0.0, epsilon, profile)
    return out / out.sum()


def train(
    docs: Sequence[Document],
    part: TopicPartition | None,
    pol: PolarityMap,
    epsilon: float = DEFAULT_EPSILON,
    variant: Variant = "topic",
) -> EmotionModel:
    """Fit priors and per-emotion conditional densities from labelled documents.

    Priors are tag-frequency maximum-likelihood estimates. Topic profiles are
    mean document-topic densities per emotion; full-vocabulary profiles are
    word frequencies within each emotion's documents. A document tagged with
    several emotions contributes fully to each of them.
    """
    if not docs:
        raise InputError("cannot train on an empty document list")
    if epsilon < 0:
        raise InputError("epsilon must be non-negative")
    if variant == "topic" and part is None:
        raise InputError("topic variant requires a partition")

    emotions = tuple(sorted({e for d in docs for e in d.emotions}))
    pol.require_covers(emotions)

    tag_counts = Counter(e for d in docs for e in d.emotions)
    total_tags = sum(tag_counts.values())
    priors = np.array([tag_counts[e] / total_tags for e in emotions])

    word_counts: Counter[str] = Counter()
    for d in docs:
        word_counts.update(d.bow)
    supports = {e: sum(1 for d in docs if e in d.emotions) for e in emotions}

    if variant == "topic":
        profiles = np.vstack(
            [_smooth(emotion_topic_profile(docs, part, e).density, epsilon) for e in emotions]
        )
        return EmotionModel(
            variant="topic",
            emotions=emotions,
            priors=priors,
            profiles=profiles,
            polarity=pol,
            epsilon=epsilon,
            partition=part,
            word_counts=dict(word_counts),
            supports=supports,
        )

    vocab = tuple(sorted(word_counts))
    index = {w: i for i, w in enumerate(vocab)}
    rows = []
    for e in emotions:
        counts = np.zeros(len(vocab))
        total = 0
        for d in docs:
            if e in d.emotions:
                for w, c in d.bow.items():
                    counts[index[w]] += c
                    total += c
        rows.append(_smooth(counts / total, epsilon))
    return EmotionModel(
        variant="full_vocab",
        emotions=emotions,
        priors=priors,
        profiles=np.vstack(rows),
        polarity=pol,
        epsilon=epsilon,
        feature_names=vocab,
        word_counts=dict(word_counts),
        supports=supports,
    )


def log_sum_exp(values: Sequence[float]) -> float:
    """log(sum(exp(values))), stabilized by factoring out the maximum."""
    if len(values) == 0:
        raise InputError("log_sum_exp of an empty list")
    arr = np.asarray(values, dtype=float)
    top = float(np.max(arr))
    if top == -math.inf:
        return -math.inf
    return top + float(np.log(np.sum(np.exp(arr - top))))


def _feature_counts(model: EmotionModel, bow: Mapping[str, int]) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Aggregate a bag-of-words onto model features, dropping out-of-domain words.

    Counts are accumulated per feature so that two same-topic words are
    indistinguishable by construction (the topic-variant cancellation).
    """
    agg: dict[int, int] = {}
    dropped: list[str] = []
    for word in sorted(bow):
        count = bow[word]
        if count <= 0:
            raise InputError(f"bag-of-words count for {word!r} must be positive")
        j = model.feature_of(word)
        if j is None:
            dropped.append(word)
            continue
        agg[j] = agg.get(j, 0) + count
    idx = np.array(sorted(agg), dtype=int)
    counts = np.array([agg[j] for j in sorted(agg)], dtype=float)
    return idx, counts, dropped


def log_joint(model: EmotionModel, bow: Mapping[str, int]) -> dict[str, float]:
    """Unnormalized log posterior per emotion: sum_i w_i*log p(f_i|e) + log p(e)."""
    idx, counts, _ = _feature_counts(model, bow)
    if idx.size == 0:
        raise NoModelledTokensError("no modelled tokens")
    with np.errstate(divide="ignore"):
        log_prof = np.log(model.profiles[:, idx])
        log_priors = np.log(model.priors)
    scores = log_prof @ counts + log_priors
    return {e: float(s) for e, s in zip(model.emotions, scores)}


def posterior(model: EmotionModel, bow: Mapping[str, int]) -> RankedPrediction:
    """Normalized emotion posterior for one bag-of-words query.

    Out-of-domain words are dropped first; if nothing remains the query has
    no modelled tokens and an error is raised (callers wanting the prior
    fall back explicitly). Ranking ties break lexicographically.
    """
    scores = log_joint(model, bow)
    values = np.array([scores[e] for e in model.emotions])
    norm = log_sum_exp(values)
    if norm == -math.inf:
        raise InputError(
            "posterior undefined: every emotion has zero likelihood (epsilon=0 "
            "with unsupported topics); train with a positive epsilon"
        )
    probs = np.exp(values - norm)
    post = {e: float(p) for e, p in zip(model.emotions, probs)}
    ranking = tuple(sorted(post, key=lambda e: (-post[e], e)))
    return RankedPrediction(
        posterior=post,
        ranking=ranking,
        positive_posterior=sum(p for e, p in post.items() if model.polarity.is_positive(e)),
    )


def sentiment_posterior(pred: RankedPrediction, pol: PolarityMap) -> float:
    """Posterior mass on the positive emotions."""
    return sum(p for e, p in pred.posterior.items() if pol.is_positive(e))


def classify_sentiment(pred: RankedPrediction, pol: PolarityMap) -> str:
    """Hard sentiment call; ties go to positive (the more prevalent class)."""
    return POSITIVE if sentiment_posterior(pred, pol) >= 0.5 else NEGATIVE


def empirical_sentiment(doc: Document, pol: PolarityMap) -> str:
    """Hard sentiment of a labelled document from its tags; ties to positive."""
    if not doc.emotions:
        raise InputError(f"document {doc.id!r} has no emotion tags")
    n_pos = sum(1 for e in doc.emotions if pol.is_positive(e))
    return POSITIVE if n_pos >= len(doc.emotions) - n_pos else NEGATIVE


def top_k(pred: RankedPrediction, k: int) -> list[tuple[str, float]]:
    """First k ranked emotions with their posteriors."""
    if not 1 <= k <= len(pred.ranking):
        raise InputError(f"k={k} out of range 1..{len(pred.ranking)}")
    return [(e, pred.posterior[e]) for e in pred.ranking[:k]]


def topic_top_words(model: EmotionModel, k: int, n: int) -> list[str]:
    """A topic's n most frequent training-corpus words (topic variant only)."""
    if model.variant != "topic":
        raise InputError("top words require a topic-variant model")
    members = [w for w, t in model.partition.assignment.items() if t == k]
    members.sort(key=lambda w: (-model.word_counts.get(w, 0), w))
    return members[:n]


def model_profiles(model: EmotionModel) -> dict[str, EmotionTopicProfile]:
    """The trained per-emotion densities as profile objects."""
    return {
        e: EmotionTopicProfile(
            emotion=e, density=model.profiles[i], support=model.supports.get(e, 1)
        )
        for i, e in enumerate(model.emotions)
    }


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------
#
# A model file is one JSON document. Every float is written with Python's
# shortest round-tripping decimal repr (at most 17 significant digits), so
# load(save(m)) reproduces all probabilities bit-exactly.


def save_model(model: EmotionModel, path: str | Path) -> None:
    doc: dict = {
        "format_version": model.format_version,
        "variant": model.variant,
        "epsilon": model.epsilon,
        "emotions": list(model.emotions),
        "priors": {e: float(p) for e, p in zip(model.emotions, model.priors)},
        "profiles": {
            e: [float(x) for x in row] for e, row in zip(model.emotions, model.profiles)
        },
        "polarity": dict(sorted(model.polarity.polarity.items())),
        "word_counts": dict(sorted(model.word_counts.items())),
        "supports": dict(sorted(model.supports.items())),
        "lowercase": model.lowercase,
    }
    if model.variant == "topic":
        doc["partition"] = {
            "n_t": model.partition.n_t,
            "assignment": dict(sorted(model.partition.assignment.items())),
        }
    else:
        doc["feature_names"] = list(model.feature_names)
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> EmotionModel:
    path = Path(path)
    if not path.exists():
        raise InputError(f"model file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"model file parse error at byte offset {exc.pos}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError("model file must contain a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatVersionError(found=version, supported=FORMAT_VERSION)
    try:
        emotions = tuple(doc["emotions"])
        priors = np.array([doc["priors"][e] for e in emotions], dtype=float)
        profiles = np.array([doc["profiles"][e] for e in emotions], dtype=float)
        polarity = PolarityMap(doc["polarity"])
        variant = doc["variant"]
        partition = None
        feature_names = None
        if variant == "topic":
            p = doc["partition"]
            partition = TopicPartition(
                assignment={w: int(t) for w, t in p["assignment"].items()}, n_t=int(p["n_t"])
            )
        else:
            feature_names = tuple(doc["feature_names"])
        return EmotionModel(
            variant=variant,
            emotions=emotions,
            priors=priors,
            profiles=profiles,
            polarity=polarity,
            epsilon=float(doc["epsilon"]),
            partition=partition,
            feature_names=feature_names,
            word_counts={w: int(c) for w, c in doc.get("word_counts", {}).items()},
            supports={e: int(c) for e, c in doc.get("supports", {}).items()},
            lowercase=bool(doc.get("lowercase", True)),
            format_version=version,
        )
    except KeyError as exc:
        raise InputError(f"model file missing field {exc.args[0]!r}") from None
