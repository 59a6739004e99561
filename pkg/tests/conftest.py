"""Shared fixtures: the four-document worked-example network and random corpora.

The toy network has four words in three topics (t0={v1,v2}, t1={v3},
t2={v4}), four documents, and three emotions tagging them as e1->{d1,d2},
e2->{d1}, e3->{d3,d4}. Its exact quantities (priors 2/5, 1/5, 2/5; profile
columns (7/8, 0, 1/8), (3/4, 0, 1/4), (1/3, 1/2, 1/6)) are used as golden
values throughout the suite.
"""

from __future__ import annotations

import numpy as np
import pytest

from emorec import Document, PolarityMap, TopicPartition


def toy_documents() -> list[Document]:
    return [
        Document("d1", {"v1": 2, "v2": 1, "v4": 1}, frozenset({"e1", "e2"})),
        Document("d2", {"v1": 2, "v2": 2}, frozenset({"e1"})),
        Document("d3", {"v1": 1, "v2": 1, "v3": 1}, frozenset({"e3"})),
        Document("d4", {"v3": 2, "v4": 1}, frozenset({"e3"})),
    ]


@pytest.fixture
def toy_docs() -> list[Document]:
    return toy_documents()


@pytest.fixture
def toy_partition() -> TopicPartition:
    return TopicPartition({"v1": 0, "v2": 0, "v3": 1, "v4": 2}, n_t=3)


@pytest.fixture
def toy_polarity() -> PolarityMap:
    """Polarity used by the sentiment examples: e1 positive, e2/e3 negative."""
    return PolarityMap({"e1": "positive", "e2": "negative", "e3": "negative"})


@pytest.fixture
def toy_query() -> dict[str, int]:
    """The first document's bag-of-words, the worked query."""
    return {"v1": 2, "v2": 1, "v4": 1}


# Words and labels are purely alphabetic so the corpus survives tokenization
# when round-tripped through files (digits split tokens).
SEPARABLE_EMOTIONS = {
    "calm": "positive",
    "glad": "positive",
    "warm": "positive",
    "angry": "negative",
    "bitter": "negative",
    "dour": "negative",
}


def separable_corpus(
    docs_per_emotion: int = 20,
    words_per_emotion: int = 5,
    tokens_per_doc: int = 8,
    seed: int = 0,
) -> tuple[list[Document], TopicPartition, PolarityMap]:
    """Each emotion owns a disjoint vocabulary; every document uses only its
    emotion's words, so any sensible model separates them perfectly."""
    from collections import Counter

    rng = np.random.default_rng(seed)
    emotions = sorted(SEPARABLE_EMOTIONS)
    words = {e: [f"{e}{chr(ord('a') + j)}" for j in range(words_per_emotion)] for e in emotions}
    docs = []
    for e in emotions:
        for i in range(docs_per_emotion):
            tokens = [words[e][int(t)] for t in rng.integers(0, words_per_emotion, tokens_per_doc)]
            docs.append(Document(f"{e}{i:03d}", dict(Counter(tokens)), frozenset({e})))
    assignment = {w: k for k, e in enumerate(emotions) for w in words[e]}
    part = TopicPartition(assignment, n_t=len(emotions))
    pol = PolarityMap(dict(SEPARABLE_EMOTIONS))
    return docs, part, pol


def write_corpus_files(docs, part, pol, directory) -> dict[str, str]:
    """Materialize documents/partition/polarity as CLI-consumable files."""
    import json

    corpus_path = directory / "corpus.jsonl"
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for d in docs:
            text = " ".join(w for word in sorted(d.bow) for w in [word] * d.bow[word])
            fh.write(json.dumps({"id": d.id, "text": text, "emotions": sorted(d.emotions)}) + "\n")
    partition_path = directory / "partition.tsv"
    partition_path.write_text(
        "".join(f"{w}\t{t}\n" for w, t in sorted(part.assignment.items())), encoding="utf-8"
    )
    polarity_path = directory / "polarity.tsv"
    polarity_path.write_text(
        "".join(f"{e}\t{p}\n" for e, p in sorted(pol.polarity.items())), encoding="utf-8"
    )
    return {
        "corpus": str(corpus_path),
        "partition": str(partition_path),
        "polarity": str(polarity_path),
    }


def toy_corpus_files(directory) -> dict[str, str]:
    """The worked-example network with alphabetic word names (va..vd), as files."""
    docs = [
        Document("d1", {"va": 2, "vb": 1, "vd": 1}, frozenset({"e1", "e2"})),
        Document("d2", {"va": 2, "vb": 2}, frozenset({"e1"})),
        Document("d3", {"va": 1, "vb": 1, "vc": 1}, frozenset({"e3"})),
        Document("d4", {"vc": 2, "vd": 1}, frozenset({"e3"})),
    ]
    part = TopicPartition({"va": 0, "vb": 0, "vc": 1, "vd": 2}, n_t=3)
    pol = PolarityMap({"e1": "positive", "e2": "negative", "e3": "negative"})
    return write_corpus_files(docs, part, pol, directory)


def random_corpus(
    rng: np.random.Generator,
    n_words: int = 12,
    n_emotions: int = 4,
    n_docs: int = 10,
    n_topics: int = 3,
) -> tuple[list[Document], TopicPartition, PolarityMap]:
    """A random small corpus with a random partition and polarity map."""
    words = [f"w{i:02d}" for i in range(n_words)]
    emotions = [f"em{i}" for i in range(n_emotions)]
    docs = []
    for d in range(n_docs):
        size = int(rng.integers(1, 6))
        chosen = rng.choice(n_words, size=size, replace=True)
        bow: dict[str, int] = {}
        for w in chosen:
            bow[words[int(w)]] = bow.get(words[int(w)], 0) + int(rng.integers(1, 4))
        n_tags = int(rng.integers(1, min(3, n_emotions) + 1))
        tags = rng.choice(n_emotions, size=n_tags, replace=False)
        docs.append(Document(f"doc{d}", bow, frozenset(emotions[int(t)] for t in tags)))

    assignment = {w: int(rng.integers(0, n_topics)) for w in words}
    # ensure every topic is used
    for k in range(n_topics):
        if k not in assignment.values():
            assignment[words[k]] = k
    used = sorted(set(assignment.values()))
    compact = {old: new for new, old in enumerate(used)}
    part = TopicPartition({w: compact[t] for w, t in assignment.items()}, n_t=len(used))

    polarity = PolarityMap(
        {e: ("positive" if rng.random() < 0.5 else "negative") for e in emotions}
    )
    return docs, part, polarity
