"""Cross-validated evaluation: graded ranking metrics and binary sentiment.

The protocol is k-fold cross-validation (default ten folds): per fold, every
configured recommender variant is trained on the other folds and queried on
the held-out documents. Ranked predictions are scored with graded-relevance
metrics (Q-measure, nDCG, plus exact-match interpolated precision and
recall@k), and their hard sentiment calls with standard binary metrics,
against sentiment-lexicon and prior/uniform baselines.

Relevance of a predicted emotion to a true one is graded by the Euclidean
distance between their topic profiles, rescaled to [0, 1] per true emotion
and truncated to zero across sentiment classes. Note the Q-measure here
averages the blended ratio over all k retrieved ranks (dividing by k), not
over the number of relevant items as in the classical formulation.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import Document, PolarityMap, POSITIVE, NEGATIVE
from .errors import InputError, NoModelledTokensError
from .model import (
    DEFAULT_EPSILON,
    RankedPrediction,
    classify_sentiment,
    empirical_sentiment,
    posterior,
    train,
)
from .topics import EmotionTopicProfile, TopicPartition, all_profiles, emotion_distance

RECALL_GRID = np.linspace(0.0, 1.0, 101)


# ---------------------------------------------------------------------------
# Folds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FoldAssignment:
    fold_of: Mapping[str, int]
    k: int
    seed: int


def kfold_split(doc_ids: Sequence[str], k: int, seed: int) -> FoldAssignment:
    """Seeded uniform shuffle followed by round-robin fold assignment."""
    if k < 2:
        raise InputError(f"fold count must be >= 2, got {k}")
    if k > len(doc_ids):
        raise InputError(f"fold count {k} exceeds document count {len(doc_ids)}")
    order = np.random.default_rng(seed).permutation(len(doc_ids))
    fold_of = {doc_ids[int(i)]: pos % k for pos, i in enumerate(order)}
    return FoldAssignment(fold_of=fold_of, k=k, seed=seed)


# ---------------------------------------------------------------------------
# Graded relevance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelevanceContext:
    """Fixed emotion profiles (training fold) with per-emotion max distances."""

    profiles: Mapping[str, EmotionTopicProfile]
    polarity: PolarityMap
    max_dist: Mapping[str, float]

    @classmethod
    def build(
        cls, profiles: Mapping[str, EmotionTopicProfile], pol: PolarityMap
    ) -> "RelevanceContext":
        labels = sorted(profiles)
        pol.require_covers(labels)
        max_dist = {
            e: max(emotion_distance(profiles[o], profiles[e]) for o in labels)
            for e in labels
        }
        return cls(profiles=profiles, polarity=pol, max_dist=max_dist)

    @property
    def universe(self) -> list[str]:
        return sorted(self.profiles)


def relevance(e_p: str, e: str, ctx: RelevanceContext) -> float:
    """Graded credit in [0, 1] for predicting e_p when the truth is e.

    Distance to the true emotion is rescaled by the farthest emotion from it;
    cross-polarity predictions score zero. A degenerate context where every
    profile coincides grades only the exact match.
    """
    for label in (e_p, e):
        if label not in ctx.profiles:
            raise InputError(f"emotion {label!r} not in relevance context")
    if ctx.polarity.is_positive(e_p) != ctx.polarity.is_positive(e):
        return 0.0
    worst = ctx.max_dist[e]
    if worst == 0.0:
        return 1.0 if e_p == e else 0.0
    return (worst - emotion_distance(ctx.profiles[e_p], ctx.profiles[e])) / worst


def gain(ranking: Sequence[str], r: int, labels: set[str] | frozenset[str], ctx: RelevanceContext) -> float:
    """Best relevance of the emotion at 1-based rank r against any true label."""
    if not labels:
        raise InputError("gain requires a non-empty label set")
    if not 1 <= r <= len(ranking):
        raise InputError(f"rank {r} out of range 1..{len(ranking)}")
    return max(relevance(ranking[r - 1], lab, ctx) for lab in sorted(labels))


def ranking_gains(
    ranking: Sequence[str], labels: set[str] | frozenset[str], ctx: RelevanceContext, depth: int | None = None
) -> np.ndarray:
    depth = len(ranking) if depth is None else depth
    return np.array([gain(ranking, r, labels, ctx) for r in range(1, depth + 1)])


def ideal_gains(labels: set[str] | frozenset[str], ctx: RelevanceContext) -> np.ndarray:
    """Candidate-pool gains sorted non-increasingly (pool = context universe)."""
    if not labels:
        raise InputError("ideal_gains requires a non-empty label set")
    pool = ctx.universe
    values = [max(relevance(c, lab, ctx) for lab in sorted(labels)) for c in pool]
    return np.array(sorted(values, reverse=True))


def q_from_gains(gains: np.ndarray, ideal: np.ndarray, k: int) -> float:
    """Blended-ratio Q over the first k ranks of a gain sequence."""
    if not 1 <= k <= len(gains):
        raise InputError(f"k={k} out of range 1..{len(gains)}")
    cg = cg_ideal = 0.0
    relevant_seen = 0
    total = 0.0
    for r in range(1, k + 1):
        g = float(gains[r - 1])
        cg += g
        cg_ideal += float(ideal[r - 1]) if r - 1 < len(ideal) else 0.0
        if g > 0.0:
            relevant_seen += 1
            total += (cg + relevant_seen) / (cg_ideal + r)
    return total / k


def dcg_from_gains(gains: np.ndarray, r: int) -> float:
    return float(sum((2.0 ** float(g) - 1.0) / math.log2(i + 2) for i, g in enumerate(gains[:r])))


def ndcg_from_gains(gains: np.ndarray, ideal: np.ndarray, r: int) -> float:
    """DCG normalized by the ideal ranking's DCG; zero when the ideal is zero."""
    if not 1 <= r <= len(gains):
        raise InputError(f"rank {r} out of range 1..{len(gains)}")
    idcg = dcg_from_gains(ideal, r)
    if idcg == 0.0:
        return 0.0
    return dcg_from_gains(gains, r) / idcg


def q_measure(ranking: Sequence[str], labels: set[str] | frozenset[str], k: int, ctx: RelevanceContext) -> float:
    return q_from_gains(ranking_gains(ranking, labels, ctx, depth=k), ideal_gains(labels, ctx), k)


def ndcg(ranking: Sequence[str], labels: set[str] | frozenset[str], r: int, ctx: RelevanceContext) -> float:
    return ndcg_from_gains(ranking_gains(ranking, labels, ctx, depth=r), ideal_gains(labels, ctx), r)


def graded_curves(
    ranking: Sequence[str], labels: set[str] | frozenset[str], ctx: RelevanceContext, depth: int
) -> tuple[np.ndarray, np.ndarray]:
    """Q(k) and nDCG(r) for every cutoff 1..depth, computed incrementally."""
    gains = ranking_gains(ranking, labels, ctx, depth=depth)
    ideal = ideal_gains(labels, ctx)
    q_curve = np.empty(depth)
    ndcg_curve = np.empty(depth)
    cg = cg_ideal = q_total = dcg = idcg = 0.0
    relevant_seen = 0
    for r in range(1, depth + 1):
        g = float(gains[r - 1])
        ig = float(ideal[r - 1]) if r - 1 < len(ideal) else 0.0
        cg += g
        cg_ideal += ig
        if g > 0.0:
            relevant_seen += 1
            q_total += (cg + relevant_seen) / (cg_ideal + r)
        discount = math.log2(r + 1)
        dcg += (2.0 ** g - 1.0) / discount
        idcg += (2.0 ** ig - 1.0) / discount
        q_curve[r - 1] = q_total / r
        ndcg_curve[r - 1] = dcg / idcg if idcg > 0.0 else 0.0
    return q_curve, ndcg_curve


# ---------------------------------------------------------------------------
# Exact-match rank metrics
# ---------------------------------------------------------------------------

Run = Sequence[tuple[Sequence[str], set[str] | frozenset[str]]]


def _query_interpolated(ranking: Sequence[str], labels: set[str] | frozenset[str]) -> np.ndarray:
    hits = np.array([1.0 if e in labels else 0.0 for e in ranking])
    cum = np.cumsum(hits)
    recall = cum / len(labels)
    precision = cum / np.arange(1, len(ranking) + 1)
    best_from = np.maximum.accumulate(precision[::-1])[::-1]
    out = np.zeros_like(RECALL_GRID)
    idx = np.searchsorted(recall, RECALL_GRID, side="left")
    inside = idx < len(recall)
    out[inside] = best_from[idx[inside]]
    return out


def interpolated_precision(run: Run) -> np.ndarray:
    """Macro-averaged interpolated precision on a 101-point recall grid.

    Relevance is exact label match; the precision at recall r is the best
    precision at any recall >= r, and recall levels a query never reaches
    contribute zero.
    """
    if not run:
        raise InputError("interpolated_precision requires a non-empty run")
    acc = np.zeros_like(RECALL_GRID)
    for ranking, labels in run:
        if not labels:
            raise InputError("every query needs a non-empty label set")
        acc += _query_interpolated(ranking, labels)
    return acc / len(run)


def recall_at_k(run: Run, k: int) -> float:
    """Macro average of |labels ∩ top-k| / |labels| over the run's queries."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if not run:
        raise InputError("recall_at_k requires a non-empty run")
    total = 0.0
    for ranking, labels in run:
        if not labels:
            raise InputError("every query needs a non-empty label set")
        top = set(ranking[:k])
        total += len(top & set(labels)) / len(labels)
    return total / len(run)


# ---------------------------------------------------------------------------
# Binary sentiment metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BinaryMetrics:
    accuracy: float
    balanced_accuracy: float
    f1: float
    precision: float
    recall: float


def binary_metrics(preds: Sequence[str], truths: Sequence[str]) -> BinaryMetrics:
    """Accuracy plus macro-averaged precision/recall/F1 over the two classes.

    Zero-denominator per-class values are defined as 0; balanced accuracy is
    the macro recall.
    """
    if len(preds) != len(truths):
        raise InputError(f"length mismatch: {len(preds)} predictions vs {len(truths)} truths")
    if not preds:
        raise InputError("binary_metrics requires at least one prediction")
    for v in (*preds, *truths):
        if v not in (POSITIVE, NEGATIVE):
            raise InputError(f"labels must be 'positive' or 'negative', got {v!r}")

    accuracy = sum(p == t for p, t in zip(preds, truths)) / len(preds)
    per_class = {}
    for cls in (POSITIVE, NEGATIVE):
        tp = sum(1 for p, t in zip(preds, truths) if p == cls and t == cls)
        fp = sum(1 for p, t in zip(preds, truths) if p == cls and t != cls)
        fn = sum(1 for p, t in zip(preds, truths) if p != cls and t == cls)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        per_class[cls] = (prec, rec, f1)
    macro_p = sum(v[0] for v in per_class.values()) / 2
    macro_r = sum(v[1] for v in per_class.values()) / 2
    macro_f1 = sum(v[2] for v in per_class.values()) / 2
    return BinaryMetrics(
        accuracy=accuracy,
        balanced_accuracy=macro_r,
        f1=macro_f1,
        precision=macro_p,
        recall=macro_r,
    )


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------


def mle_baseline(train_docs: Sequence[Document], pol: PolarityMap) -> RankedPrediction:
    """Constant prediction equal to the training tag-frequency distribution."""
    if not train_docs:
        raise InputError("mle_baseline requires a non-empty training set")
    counts = Counter(e for d in train_docs for e in d.emotions)
    total = sum(counts.values())
    post = {e: c / total for e, c in sorted(counts.items())}
    ranking = tuple(sorted(post, key=lambda e: (-post[e], e)))
    pol.require_covers(post)
    positive = sum(p for e, p in post.items() if pol.is_positive(e))
    return RankedPrediction(posterior=post, ranking=ranking, positive_posterior=positive)


def uniform_baseline(
    universe: Sequence[str], seed: int, pol: PolarityMap, query_index: int = 0
) -> RankedPrediction:
    """Uniform posterior with a per-query seeded random ranking."""
    if not universe:
        raise InputError("uniform_baseline requires a non-empty emotion universe")
    labels = sorted(universe)
    p = 1.0 / len(labels)
    rng = np.random.default_rng([seed, query_index])
    ranking = tuple(labels[int(i)] for i in rng.permutation(len(labels)))
    pol.require_covers(labels)
    positive = sum(p for e in labels if pol.is_positive(e))
    return RankedPrediction(
        posterior={e: p for e in labels}, ranking=ranking, positive_posterior=positive
    )


def load_lexicon(path: str | Path) -> dict[str, float]:
    """Read a word<TAB>score sentiment lexicon."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"lexicon file not found: {path}")
    lexicon: dict[str, float] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected word<TAB>score")
        try:
            lexicon[parts[0].strip()] = float(parts[1])
        except ValueError:
            raise InputError(f"line {lineno}: score {parts[1]!r} is not a number") from None
    if not lexicon:
        raise InputError(f"lexicon {path} is empty")
    return lexicon


def lexicon_classify(tokens: Sequence[str], lexicon: Mapping[str, float]) -> str:
    """Mean lexicon score of the covered tokens; no hits or ties go positive."""
    if not lexicon:
        raise InputError("lexicon must be non-empty")
    scores = [lexicon[t] for t in tokens if t in lexicon]
    if not scores:
        return POSITIVE
    return POSITIVE if sum(scores) / len(scores) >= 0.0 else NEGATIVE


# ---------------------------------------------------------------------------
# Cross-validation harness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CvConfig:
    folds: int = 10
    seed: int = 0
    epsilon: float = DEFAULT_EPSILON
    max_rank: int = 50
    relevance_partition: str | None = None  # defaults to the first named partition
    include_full_vocab: bool = True
    lexicons: Mapping[str, Mapping[str, float]] = field(default_factory=dict)


@dataclass
class ModelFoldMetrics:
    """One model's metrics on one fold (or macro-averaged across folds)."""

    binary: BinaryMetrics
    q: np.ndarray | None
    ndcg: np.ndarray | None
    recall_at_k: np.ndarray | None
    interpolated_precision: np.ndarray | None
    n_queries: int
    n_graded_queries: int


@dataclass
class MetricReport:
    config: dict
    models: list[str]
    per_fold: dict[str, list[ModelFoldMetrics]]
    macro: dict[str, ModelFoldMetrics]


def _prior_fallback(model_pred: RankedPrediction | None, fallback: RankedPrediction) -> RankedPrediction:
    return fallback if model_pred is None else model_pred


def _mean_metrics(folds: list[ModelFoldMetrics]) -> ModelFoldMetrics:
    binary = BinaryMetrics(
        accuracy=float(np.mean([f.binary.accuracy for f in folds])),
        balanced_accuracy=float(np.mean([f.binary.balanced_accuracy for f in folds])),
        f1=float(np.mean([f.binary.f1 for f in folds])),
        precision=float(np.mean([f.binary.precision for f in folds])),
        recall=float(np.mean([f.binary.recall for f in folds])),
    )

    def mean_curve(attr: str) -> np.ndarray | None:
        curves = [getattr(f, attr) for f in folds]
        if any(c is None for c in curves):
            return None
        depth = min(len(c) for c in curves)
        return np.mean([c[:depth] for c in curves], axis=0)

    return ModelFoldMetrics(
        binary=binary,
        q=mean_curve("q"),
        ndcg=mean_curve("ndcg"),
        recall_at_k=mean_curve("recall_at_k"),
        interpolated_precision=mean_curve("interpolated_precision"),
        n_queries=sum(f.n_queries for f in folds),
        n_graded_queries=sum(f.n_graded_queries for f in folds),
    )


def run_cv(
    docs: Sequence[Document],
    partitions: Mapping[str, TopicPartition],
    pol: PolarityMap,
    cfg: CvConfig,
) -> MetricReport:
    """Cross-validate every configured recommender variant and baseline.

    Per fold, topic-variant models (one per named partition) and optionally
    the full-vocabulary model are trained on the training split; the
    relevance context comes from the training split's profiles under the
    configured partition. Test-document emotions unseen in training are
    dropped from the label sets of ranking metrics (the model cannot rank
    them); queries left without labels are skipped for ranking metrics but
    still count for binary sentiment. Queries with no modelled tokens fall
    back to the training prior. Deterministic for a fixed seed.
    """
    if not partitions:
        raise InputError("run_cv requires at least one named partition")
    if len(docs) < cfg.folds:
        raise InputError(
            f"insufficient data: {len(docs)} documents for {cfg.folds} folds"
        )
    relevance_name = cfg.relevance_partition or next(iter(partitions))
    if relevance_name not in partitions:
        raise InputError(f"relevance partition {relevance_name!r} not among partitions")

    doc_ids = [d.id for d in docs]
    assignment = kfold_split(doc_ids, cfg.folds, cfg.seed)

    ranked_models = list(partitions) + (["full_vocab"] if cfg.include_full_vocab else [])
    baseline_models = ["mle", "uniform"]
    lexicon_models = [f"lexicon:{name}" for name in sorted(cfg.lexicons)]
    model_names = ranked_models + baseline_models + lexicon_models

    per_fold: dict[str, list[ModelFoldMetrics]] = {name: [] for name in model_names}

    for fold in range(cfg.folds):
        train_docs = [d for d in docs if assignment.fold_of[d.id] != fold]
        test_docs = [d for d in docs if assignment.fold_of[d.id] == fold]
        query_index = {d.id: i for i, d in enumerate(docs)}

        trained = {
            name: train(train_docs, part, pol, cfg.epsilon, "topic")
            for name, part in partitions.items()
        }
        if cfg.include_full_vocab:
            trained["full_vocab"] = train(train_docs, None, pol, cfg.epsilon, "full_vocab")

        prior_pred = mle_baseline(train_docs, pol)
        universe = set(prior_pred.ranking)
        ctx = RelevanceContext.build(
            all_profiles(train_docs, partitions[relevance_name]), pol
        )
        depth = min(cfg.max_rank, len(universe))

        truths = [empirical_sentiment(d, pol) for d in test_docs]
        graded_labels = [
            frozenset(d.emotions & universe) for d in test_docs
        ]

        for name in model_names:
            preds: list[RankedPrediction | None] = []
            if name in trained:
                for d in test_docs:
                    try:
                        preds.append(posterior(trained[name], d.bow))
                    except NoModelledTokensError:
                        preds.append(None)
                preds = [_prior_fallback(p, prior_pred) for p in preds]
            elif name == "mle":
                preds = [prior_pred for _ in test_docs]
            elif name == "uniform":
                preds = [
                    uniform_baseline(sorted(universe), cfg.seed, pol, query_index[d.id])
                    for d in test_docs
                ]

            if name in lexicon_models:
                lexicon = cfg.lexicons[name.split(":", 1)[1]]
                calls = []
                for d in test_docs:
                    tokens = [w for w in sorted(d.bow) for _ in range(d.bow[w])]
                    calls.append(lexicon_classify(tokens, lexicon))
                per_fold[name].append(
                    ModelFoldMetrics(
                        binary=binary_metrics(calls, truths),
                        q=None,
                        ndcg=None,
                        recall_at_k=None,
                        interpolated_precision=None,
                        n_queries=len(test_docs),
                        n_graded_queries=0,
                    )
                )
                continue

            calls = [classify_sentiment(p, pol) for p in preds]
            run = [
                (p.ranking, labels)
                for p, labels in zip(preds, graded_labels)
                if labels
            ]
            q_acc = np.zeros(depth)
            ndcg_acc = np.zeros(depth)
            for ranking, labels in run:
                q_curve, ndcg_curve = graded_curves(ranking, labels, ctx, depth)
                q_acc += q_curve
                ndcg_acc += ndcg_curve
            n_graded = len(run)
            per_fold[name].append(
                ModelFoldMetrics(
                    binary=binary_metrics(calls, truths),
                    q=q_acc / n_graded if n_graded else None,
                    ndcg=ndcg_acc / n_graded if n_graded else None,
                    recall_at_k=(
                        np.array([recall_at_k(run, k) for k in range(1, depth + 1)])
                        if n_graded
                        else None
                    ),
                    interpolated_precision=interpolated_precision(run) if n_graded else None,
                    n_queries=len(test_docs),
                    n_graded_queries=n_graded,
                )
            )

    macro = {name: _mean_metrics(folds) for name, folds in per_fold.items()}
    config_echo = {
        "folds": cfg.folds,
        "seed": cfg.seed,
        "epsilon": cfg.epsilon,
        "max_rank": cfg.max_rank,
        "partitions": list(partitions),
        "relevance_partition": relevance_name,
        "include_full_vocab": cfg.include_full_vocab,
        "lexicons": sorted(cfg.lexicons),
        "n_documents": len(docs),
        "n_emotions": len({e for d in docs for e in d.emotions}),
    }
    return MetricReport(config=config_echo, models=model_names, per_fold=per_fold, macro=macro)
