"""Word-topic partitions and the densities derived from them.

A partition assigns every vocabulary word to exactly one topic, which lets a
document be summarized by its empirical topic-use density (fraction of tokens
falling in each topic). Averaging those densities over the documents tagged
with an emotion gives that emotion's topic profile; marginalizing profiles
over a polarity class gives per-sentiment topic likelihoods, whose ratio is
the topic's positivity.

Partition inference itself (e.g. hierarchical SBM community detection) is an
external concern; partitions arrive as word<TAB>topic_id files. A seeded
co-occurrence clusterer is provided as a stand-in baseline only.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import Document, PolarityMap, Vocabulary
from .errors import InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TopicPartition:
    """Total map from vocabulary words to topic ids 0..n_t-1."""

    assignment: Mapping[str, int]
    n_t: int

    def __post_init__(self):
        used = set(self.assignment.values())
        if self.n_t < 1:
            raise InputError("partition must have at least one topic")
        if used != set(range(self.n_t)):
            raise InputError(
                f"topic ids must cover 0..{self.n_t - 1} with no gaps; got {sorted(used)}"
            )

    def topic_of(self, word: str) -> int | None:
        return self.assignment.get(word)

    def words_in_topic(self, k: int) -> list[str]:
        return sorted(w for w, t in self.assignment.items() if t == k)


@dataclass(frozen=True)
class EmotionTopicProfile:
    """Mean document-topic density over the documents tagged with an emotion."""

    emotion: str
    density: np.ndarray
    support: int  # number of contributing documents


def load_partition(path: str | Path, vocab: Vocabulary) -> TopicPartition:
    """Read a word<TAB>topic_id file and restrict it to the vocabulary.

    Vocabulary words absent from the file land in one reserved extra topic
    (reported via logging); topic ids are compacted to 0..n_t-1 preserving
    the file's id order, with the reserved topic last.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"partition file not found: {path}")
    raw: dict[str, int] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected word<TAB>topic_id")
        word, id_text = parts[0].strip(), parts[1].strip()
        if word in raw:
            raise InputError(f"line {lineno}: word {word!r} assigned to two topics")
        try:
            topic_id = int(id_text)
        except ValueError:
            raise InputError(f"line {lineno}: topic id {id_text!r} is not an integer") from None
        if topic_id < 0:
            raise InputError(f"line {lineno}: topic id must be non-negative")
        raw[word] = topic_id

    in_vocab = {w: t for w, t in raw.items() if w in vocab}
    missing = sorted(w for w in vocab.words if w not in in_vocab)

    used_ids = sorted(set(in_vocab.values()))
    compact = {old: new for new, old in enumerate(used_ids)}
    assignment = {w: compact[t] for w, t in in_vocab.items()}
    n_t = len(used_ids)
    if missing:
        logger.warning(
            "%d vocabulary words missing from %s assigned to reserved topic %d",
            len(missing), path.name, n_t,
        )
        for w in missing:
            assignment[w] = n_t
        n_t += 1
    if not assignment:
        raise InputError(f"partition {path} covers no vocabulary words")
    return TopicPartition(assignment=assignment, n_t=n_t)


def save_partition(part: TopicPartition, path: str | Path) -> None:
    lines = [f"{w}\t{part.assignment[w]}" for w in sorted(part.assignment)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def doc_topic_density(bow: Mapping[str, int], part: TopicPartition) -> np.ndarray:
    """Empirical topic-use density of one bag-of-words.

    Entry k is the fraction of the document's tokens whose word belongs to
    topic k. Every bow word must be in the partition's domain.
    """
    if not bow:
        raise InputError("no tokens: cannot compute a topic density of an empty bag")
    density = np.zeros(part.n_t)
    total = 0
    for word, count in bow.items():
        k = part.topic_of(word)
        if k is None:
            raise InputError(f"word {word!r} is not covered by the partition")
        density[k] += count
        total += count
    return density / total


def emotion_topic_profile(
    docs: Sequence[Document], part: TopicPartition, emotion: str
) -> EmotionTopicProfile:
    """Unweighted mean of doc_topic_density over the documents tagged `emotion`."""
    tagged = [d for d in docs if emotion in d.emotions]
    if not tagged:
        raise InputError(f"no documents labelled with emotion {emotion!r}")
    density = np.zeros(part.n_t)
    for doc in tagged:
        density += doc_topic_density(doc.bow, part)
    return EmotionTopicProfile(emotion=emotion, density=density / len(tagged), support=len(tagged))


def all_profiles(
    docs: Sequence[Document], part: TopicPartition
) -> dict[str, EmotionTopicProfile]:
    """Profiles for every emotion present in the documents, keyed by label."""
    emotions = sorted({e for d in docs for e in d.emotions})
    return {e: emotion_topic_profile(docs, part, e) for e in emotions}


def sentiment_topic_density(
    profiles: Mapping[str, EmotionTopicProfile],
    priors: Mapping[str, float],
    side: str,
    pol: PolarityMap,
) -> np.ndarray:
    """Topic likelihood given any emotion of one polarity.

    Mixture of the side's emotion profiles weighted by their priors,
    renormalized by the side's total prior mass.
    """
    members = [e for e in sorted(profiles) if pol.polarity.get(e) == side]
    if not members:
        raise InputError(f"no {side} emotions among the profiles")
    weight = sum(priors[e] for e in members)
    if weight <= 0:
        raise InputError(f"{side} emotions have zero total prior mass")
    acc = np.zeros_like(profiles[members[0]].density)
    for e in members:
        acc += profiles[e].density * priors[e]
    return acc / weight


def topic_positivity(k: int, pos_density: np.ndarray, neg_density: np.ndarray) -> float:
    """Ratio of a topic's positive to negative likelihood.

    Returns +inf when the negative mass is zero and the positive is not, and
    nan when both are zero (undefined); never raises, so report generation
    survives sparse topics.
    """
    pos, neg = float(pos_density[k]), float(neg_density[k])
    if neg == 0.0:
        return math.nan if pos == 0.0 else math.inf
    return pos / neg


def emotion_distance(a: EmotionTopicProfile, b: EmotionTopicProfile) -> float:
    """Euclidean distance between two emotion-topic densities."""
    if a.density.shape != b.density.shape:
        raise InputError(
            f"profile dimension mismatch: {a.density.shape} vs {b.density.shape}"
        )
    return float(np.linalg.norm(a.density - b.density))


def distance_matrix(
    profiles: Mapping[str, EmotionTopicProfile]
) -> tuple[list[str], np.ndarray]:
    """Pairwise emotion distances; labels sorted, zero diagonal, symmetric."""
    if not profiles:
        raise InputError("at least one profile is required")
    labels = sorted(profiles)
    n = len(labels)
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = emotion_distance(profiles[labels[i]], profiles[labels[j]])
            mat[i, j] = mat[j, i] = d
    return labels, mat


def baseline_partition(
    docs: Sequence[Document], vocab: Vocabulary, n_t: int, seed: int
) -> TopicPartition:
    """Stand-in partition from seeded greedy agglomeration of co-occurrence.

    Words are embedded by their per-document count profile and merged
    greedily on centroid cosine similarity until n_t groups remain.
    Deterministic for a fixed corpus and seed; intended for experimentation
    where no externally inferred partition is available. Outputs derived
    from it should be labelled as baseline-partition results.
    """
    if n_t < 1:
        raise InputError("n_t must be >= 1")
    if n_t > len(vocab):
        raise InputError(f"n_t={n_t} exceeds vocabulary size {len(vocab)}")

    words = list(vocab.words)
    word_index = {w: i for i, w in enumerate(words)}
    emb = np.zeros((len(words), len(docs)))
    for j, doc in enumerate(docs):
        for w, c in doc.bow.items():
            if w in word_index:
                emb[word_index[w], j] = c

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(words))
    clusters: list[list[int]] = [[int(i)] for i in order]
    centroids = emb[order].astype(float)

    while len(clusters) > n_t:
        norms = np.linalg.norm(centroids, axis=1)
        norms[norms == 0] = 1.0
        unit = centroids / norms[:, None]
        sims = unit @ unit.T
        np.fill_diagonal(sims, -np.inf)
        a, b = np.unravel_index(int(np.argmax(sims)), sims.shape)
        a, b = (int(a), int(b)) if a < b else (int(b), int(a))
        clusters[a].extend(clusters[b])
        centroids[a] += centroids[b]
        del clusters[b]
        centroids = np.delete(centroids, b, axis=0)

    # Stable topic ids: order clusters by their lexicographically smallest word.
    keyed = sorted(range(len(clusters)), key=lambda c: min(words[i] for i in clusters[c]))
    assignment = {}
    for new_id, c in enumerate(keyed):
        for i in clusters[c]:
            assignment[words[i]] = new_id
    return TopicPartition(assignment=assignment, n_t=n_t)
