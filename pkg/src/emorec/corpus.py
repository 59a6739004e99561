"""Corpus ingestion, preprocessing, vocabulary building, and descriptive stats.

Input records are free-text narratives labelled with zero or more emotion
tags. The preprocessing pipeline is: lowercase, contract hyphenated words and
conjunctions (a hyphen or apostrophe flanked by letters is deleted), replace
every remaining non-alphabetic character with a space, split on whitespace,
drop stopwords. Vocabulary is then pruned corpus-wide by a minimum total
count, and narratives without emotion tags are dropped before modelling.

All operations are pure functions over immutable inputs.
"""

from __future__ import annotations

import csv
import datetime
import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import InputError

POSITIVE = "positive"
NEGATIVE = "negative"

# Characters that glue word parts together ("follow-up" -> "followup",
# "didn't" -> "didnt") when flanked by letters on both sides.
_CONTRACTIBLE = {"-", "'", "’"}


@dataclass(frozen=True)
class RawDocument:
    """One input record, prior to any preprocessing."""

    id: str
    text: str
    emotions: frozenset[str]
    date: datetime.date | None = None
    region: str | None = None


@dataclass(frozen=True)
class Document:
    """A modelling-ready narrative: bag-of-words plus non-empty emotion tags."""

    id: str
    bow: Mapping[str, int]
    emotions: frozenset[str]


@dataclass(frozen=True)
class Vocabulary:
    """Surviving corpus words (sorted) with their total corpus counts."""

    words: tuple[str, ...]
    counts: Mapping[str, int]

    def __contains__(self, word: str) -> bool:
        return word in self.counts

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class PolarityMap:
    """Total map from emotion label to 'positive' or 'negative'."""

    polarity: Mapping[str, str]

    def __post_init__(self):
        bad = {e: p for e, p in self.polarity.items() if p not in (POSITIVE, NEGATIVE)}
        if bad:
            raise InputError(f"invalid polarity values: {bad}")

    def is_positive(self, emotion: str) -> bool:
        try:
            return self.polarity[emotion] == POSITIVE
        except KeyError:
            raise InputError(f"emotion {emotion!r} missing from polarity map") from None

    def side(self, polarity: str) -> frozenset[str]:
        """All emotions with the given polarity ('positive' or 'negative')."""
        if polarity not in (POSITIVE, NEGATIVE):
            raise InputError(f"unknown polarity {polarity!r}")
        return frozenset(e for e, p in self.polarity.items() if p == polarity)

    def require_covers(self, emotions: Iterable[str]) -> None:
        for e in emotions:
            if e not in self.polarity:
                raise InputError(f"emotion {e!r} missing from polarity map")

    def __contains__(self, emotion: str) -> bool:
        return emotion in self.polarity


@dataclass(frozen=True)
class PreprocessConfig:
    min_count: int = 5
    stopwords: frozenset[str] = field(default_factory=frozenset)
    lowercase: bool = True

    def __post_init__(self):
        if self.min_count < 1:
            raise InputError(f"min_count must be >= 1, got {self.min_count}")


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

_TSV_HEADER = ["id", "text", "emotions", "date", "region"]


def _parse_date(value: str, where: str) -> datetime.date:
    try:
        return datetime.date.fromisoformat(value)
    except ValueError:
        raise InputError(f"{where}: invalid ISO-8601 date {value!r}") from None


def _record_from_json(obj: object, lineno: int) -> RawDocument:
    where = f"line {lineno}"
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected a JSON object")
    for key in ("id", "text", "emotions"):
        if key not in obj:
            raise InputError(f"{where}: missing required field {key!r}")
    if not isinstance(obj["id"], str) or not isinstance(obj["text"], str):
        raise InputError(f"{where}: 'id' and 'text' must be strings")
    emotions = obj["emotions"]
    if not isinstance(emotions, list) or any(not isinstance(e, str) for e in emotions):
        raise InputError(f"{where}: 'emotions' must be an array of strings")
    date = None
    if obj.get("date") is not None:
        if not isinstance(obj["date"], str):
            raise InputError(f"{where}: 'date' must be an ISO-8601 string")
        date = _parse_date(obj["date"], where)
    region = obj.get("region")
    if region is not None and not isinstance(region, str):
        raise InputError(f"{where}: 'region' must be a string")
    return RawDocument(
        id=obj["id"],
        text=obj["text"],
        emotions=frozenset(emotions),
        date=date,
        region=region,
    )


def _ingest_jsonl(path: Path) -> list[RawDocument]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"line {lineno}: malformed JSON ({exc.msg})") from None
            records.append(_record_from_json(obj, lineno))
    return records


def _ingest_tsv(path: Path) -> list[RawDocument]:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        try:
            header = next(reader)
        except StopIteration:
            return []
        if header != _TSV_HEADER:
            expected = "\t".join(_TSV_HEADER)
            raise InputError(f"line 1: expected header {expected!r}, got {'/'.join(header)!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(_TSV_HEADER):
                raise InputError(f"line {lineno}: expected {len(_TSV_HEADER)} fields, got {len(row)}")
            doc_id, text, emotions_field, date_field, region_field = row
            emotions = frozenset(e for e in emotions_field.split("|") if e)
            date = _parse_date(date_field, f"line {lineno}") if date_field else None
            records.append(
                RawDocument(
                    id=doc_id,
                    text=text,
                    emotions=emotions,
                    date=date,
                    region=region_field or None,
                )
            )
    return records


def ingest(path: str | Path, format: str = "jsonl") -> list[RawDocument]:
    """Read labelled narratives from a JSONL or TSV corpus file.

    Duplicate emotion tags within a record are collapsed; a duplicate record
    id anywhere in the file is an error.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"corpus file not found: {path}")
    if format == "jsonl":
        records = _ingest_jsonl(path)
    elif format == "tsv":
        records = _ingest_tsv(path)
    else:
        raise InputError(f"unknown corpus format {format!r} (expected 'jsonl' or 'tsv')")
    seen: set[str] = set()
    for rec in records:
        if rec.id in seen:
            raise InputError(f"duplicate document id {rec.id!r}")
        seen.add(rec.id)
    return records


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One token per line, UTF-8; '#' lines are comments."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"stopword file not found: {path}")
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        token = line.strip()
        if token and not token.startswith("#"):
            words.add(token)
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    """The small stopword list shipped with the package."""
    text = resources.files("emorec").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(
        t.strip() for t in text.splitlines() if t.strip() and not t.startswith("#")
    )


def load_polarity(path: str | Path) -> PolarityMap:
    """Read an emotion<TAB>polarity table."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"polarity file not found: {path}")
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected emotion<TAB>polarity")
        emotion, polarity = parts[0].strip(), parts[1].strip()
        if polarity not in (POSITIVE, NEGATIVE):
            raise InputError(f"line {lineno}: polarity must be 'positive' or 'negative'")
        if emotion in mapping:
            raise InputError(f"line {lineno}: duplicate emotion {emotion!r}")
        mapping[emotion] = polarity
    return PolarityMap(mapping)


# ---------------------------------------------------------------------------
# Preprocessing
# ---------------------------------------------------------------------------


def preprocess(raw: RawDocument, cfg: PreprocessConfig) -> list[str]:
    """Tokenize one narrative.

    A hyphen or apostrophe with letters on both sides is deleted (the parts
    concatenate); every other non-alphabetic character becomes a space.
    Stopwords are dropped; token order is preserved.
    """
    text = raw.text.lower() if cfg.lowercase else raw.text
    out: list[str] = []
    last = len(text) - 1
    for i, ch in enumerate(text):
        if ch in _CONTRACTIBLE and 0 < i < last and text[i - 1].isalpha() and text[i + 1].isalpha():
            continue
        out.append(ch if ch.isalpha() else " ")
    return [t for t in "".join(out).split() if t not in cfg.stopwords]


def build_corpus(
    raws: Sequence[RawDocument], cfg: PreprocessConfig
) -> tuple[list[Document], Vocabulary]:
    """Tokenize, filter, and assemble the modelling corpus.

    Unlabelled narratives are dropped first; the min-count rule is then
    applied to counts pooled over the surviving narratives, and any document
    whose bag-of-words empties out is dropped too.
    """
    tokenized = [(raw, preprocess(raw, cfg)) for raw in raws if raw.emotions]

    totals: Counter[str] = Counter()
    for _, tokens in tokenized:
        totals.update(tokens)
    kept = {w for w, c in totals.items() if c >= cfg.min_count}

    docs: list[Document] = []
    for raw, tokens in tokenized:
        bow = Counter(t for t in tokens if t in kept)
        if bow:
            docs.append(Document(id=raw.id, bow=dict(bow), emotions=raw.emotions))

    if not docs:
        raise InputError("empty corpus after preprocessing")

    counts = {w: totals[w] for w in sorted(kept)}
    return docs, Vocabulary(words=tuple(sorted(kept)), counts=counts)


# ---------------------------------------------------------------------------
# Descriptive statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SentimentSummaryRow:
    sentiment: str
    positivity: float | None  # None for the untagged class
    count: int
    proportion: float
    tags_per_post: float


def sentiment_summary(
    raws: Sequence[RawDocument], pol: PolarityMap
) -> list[SentimentSummaryRow]:
    """Classify each pre-filter record as Positive/Negative/Mixed/None.

    Positive (negative) means every tag is positive (negative); records with
    both are Mixed, records without tags are None. Positivity is the mean
    proportion of a record's tags that are positive. Runs on the raw,
    pre-filter records so the None class reflects untagged narratives.
    """
    groups: dict[str, list[RawDocument]] = {
        "Positive": [], "Negative": [], "Mixed": [], "None": []
    }
    for raw in raws:
        pol.require_covers(raw.emotions)
        if not raw.emotions:
            groups["None"].append(raw)
            continue
        n_pos = sum(1 for e in raw.emotions if pol.is_positive(e))
        if n_pos == len(raw.emotions):
            groups["Positive"].append(raw)
        elif n_pos == 0:
            groups["Negative"].append(raw)
        else:
            groups["Mixed"].append(raw)

    total = len(raws)
    rows = []
    for name in ("Positive", "Negative", "Mixed", "None"):
        members = groups[name]
        if members and name != "None":
            positivity = sum(
                sum(1 for e in r.emotions if pol.is_positive(e)) / len(r.emotions)
                for r in members
            ) / len(members)
        else:
            positivity = None
        tags = (
            sum(len(r.emotions) for r in members) / len(members) if members else 0.0
        )
        rows.append(
            SentimentSummaryRow(
                sentiment=name,
                positivity=positivity,
                count=len(members),
                proportion=len(members) / total if total else 0.0,
                tags_per_post=tags,
            )
        )
    return rows


def rank_frequency(
    docs: Sequence[Document | RawDocument], pol: PolarityMap
) -> dict[str, list[tuple[str, int, int]]]:
    """Per-polarity emotion tag counts as (emotion, count, rank) lists.

    Within a polarity, emotions sort by descending count with lexicographic
    tie-breaking; ranks are 1-based. Accepts raw or preprocessed documents
    (only the emotion tags are read).
    """
    counts: Counter[str] = Counter()
    for doc in docs:
        pol.require_covers(doc.emotions)
        counts.update(doc.emotions)

    result: dict[str, list[tuple[str, int, int]]] = {}
    for side in (POSITIVE, NEGATIVE):
        members = [(e, c) for e, c in counts.items() if pol.polarity[e] == side]
        members.sort(key=lambda item: (-item[1], item[0]))
        result[side] = [(e, c, rank) for rank, (e, c) in enumerate(members, start=1)]
    return result


@dataclass(frozen=True)
class ActivityReport:
    monthly: Mapping[str, int]  # "YYYY-MM" or "unknown"
    regions: Mapping[str, int]  # region name or "unknown"


def activity_report(raws: Sequence[RawDocument]) -> ActivityReport:
    """Record counts per calendar month and per region; missing -> 'unknown'."""
    monthly: Counter[str] = Counter()
    regions: Counter[str] = Counter()
    for raw in raws:
        monthly[raw.date.strftime("%Y-%m") if raw.date else "unknown"] += 1
        regions[raw.region if raw.region else "unknown"] += 1
    return ActivityReport(
        monthly=dict(sorted(monthly.items())),
        regions=dict(sorted(regions.items())),
    )
