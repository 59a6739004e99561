"""Report rendering: delimited tables, structured metric reports, and figures.

Every writer has a matching reader so report artifacts round-trip. Figures
are rendered headlessly to PNG next to the delimited output; PNG metadata is
stripped so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .corpus import ActivityReport, SentimentSummaryRow
from .errors import InputError
from .evaluation import RECALL_GRID, MetricReport, ModelFoldMetrics
from .model import EmotionModel, model_profiles, topic_top_words
from .topics import (
    EmotionTopicProfile,
    sentiment_topic_density,
    topic_positivity,
)

_SAVEFIG_KW = {"dpi": 120, "metadata": {"Software": None}}

TABLE1_COLUMNS = ["Sentiment", "Positivity", "Count", "Proportion", "Tags per post"]
TABLE3_COLUMNS = ["Topic", "Positive", "Negative", "Positivity"]
TABLE5_COLUMNS = ["Model", "Accuracy", "Balanced accuracy", "F1", "Precision", "Recall"]


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name)


def _write_tsv(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    lines = ["\t".join(header)]
    lines.extend("\t".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_table(path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    """Read any of the TSV tables back as a header plus string-valued rows."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise InputError(f"empty table file: {path}")
    header = lines[0].split("\t")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(header):
            raise InputError(f"{path} line {lineno}: expected {len(header)} fields")
        rows.append(dict(zip(header, fields)))
    return header, rows


# ---------------------------------------------------------------------------
# Corpus summary (sentiment-class breakdown)
# ---------------------------------------------------------------------------


def sentiment_summary_rows(rows: Sequence[SentimentSummaryRow]) -> list[list[str]]:
    out = []
    for r in rows:
        out.append(
            [
                r.sentiment,
                "-" if r.positivity is None else f"{r.positivity:.3f}",
                str(r.count),
                f"{r.proportion:.3f}",
                f"{r.tags_per_post:.3f}",
            ]
        )
    return out


def write_sentiment_summary(rows: Sequence[SentimentSummaryRow], path: str | Path) -> None:
    _write_tsv(Path(path), TABLE1_COLUMNS, sentiment_summary_rows(rows))


def format_sentiment_summary(rows: Sequence[SentimentSummaryRow]) -> str:
    """Fixed-width rendering of the sentiment-class summary for stdout."""
    body = sentiment_summary_rows(rows)
    widths = [
        max(len(TABLE1_COLUMNS[i]), *(len(r[i]) for r in body)) for i in range(len(TABLE1_COLUMNS))
    ]
    lines = ["  ".join(c.ljust(w) for c, w in zip(TABLE1_COLUMNS, widths))]
    for r in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Topic positivity report (conditional sentiment likelihoods per topic)
# ---------------------------------------------------------------------------


def topic_positivity_table(
    model: EmotionModel, top_words: int = 4
) -> list[tuple[str, float, float, float]]:
    """Per-topic (label, positive likelihood, negative likelihood, positivity).

    Topics are labelled by their most frequent training words and sorted by
    ascending positivity, most negative first; undefined ratios sort last.
    """
    if model.variant != "topic":
        raise InputError("report requires topic variant")
    profiles = model_profiles(model)
    priors = {e: model.prior_of(e) for e in model.emotions}
    pos = sentiment_topic_density(profiles, priors, "positive", model.polarity)
    neg = sentiment_topic_density(profiles, priors, "negative", model.polarity)

    rows = []
    for k in range(model.partition.n_t):
        words = topic_top_words(model, k, top_words)
        ratio = topic_positivity(k, pos, neg)
        rows.append((", ".join(words), float(pos[k]), float(neg[k]), ratio))
    rows.sort(key=lambda r: (math.isnan(r[3]), 0.0 if math.isnan(r[3]) else r[3], r[0]))
    return rows


def write_topic_positivity(
    rows: Sequence[tuple[str, float, float, float]], path: str | Path
) -> None:
    body = [
        [label, f"{p:.6g}", f"{n:.6g}", f"{ratio:.6g}"] for label, p, n, ratio in rows
    ]
    _write_tsv(Path(path), TABLE3_COLUMNS, body)


# ---------------------------------------------------------------------------
# Emotion profiles and distances
# ---------------------------------------------------------------------------


def write_profiles(profiles: Mapping[str, EmotionTopicProfile], path: str | Path) -> None:
    labels = sorted(profiles)
    n_t = len(profiles[labels[0]].density)
    header = ["emotion", "support"] + [f"topic_{k}" for k in range(n_t)]
    rows = [
        [e, str(profiles[e].support)] + [f"{x:.10g}" for x in profiles[e].density]
        for e in labels
    ]
    _write_tsv(Path(path), header, rows)


def write_distance_matrix(labels: Sequence[str], matrix: np.ndarray, path: str | Path) -> None:
    header = ["emotion"] + list(labels)
    rows = [
        [labels[i]] + [f"{matrix[i, j]:.10g}" for j in range(len(labels))]
        for i in range(len(labels))
    ]
    _write_tsv(Path(path), header, rows)


def read_distance_matrix(path: str | Path) -> tuple[list[str], np.ndarray]:
    header, rows = read_table(path)
    labels = header[1:]
    matrix = np.array([[float(r[lab]) for lab in labels] for r in rows])
    return labels, matrix


# ---------------------------------------------------------------------------
# Cross-validation metric reports
# ---------------------------------------------------------------------------


def _metrics_to_dict(m: ModelFoldMetrics) -> dict:
    def arr(a):
        return None if a is None else [float(x) for x in a]

    return {
        "binary": {
            "accuracy": m.binary.accuracy,
            "balanced_accuracy": m.binary.balanced_accuracy,
            "f1": m.binary.f1,
            "precision": m.binary.precision,
            "recall": m.binary.recall,
        },
        "q": arr(m.q),
        "ndcg": arr(m.ndcg),
        "recall_at_k": arr(m.recall_at_k),
        "interpolated_precision": arr(m.interpolated_precision),
        "n_queries": m.n_queries,
        "n_graded_queries": m.n_graded_queries,
    }


def report_to_dict(report: MetricReport) -> dict:
    return {
        "schema_version": 1,
        "config": report.config,
        "models": report.models,
        "per_fold": {
            name: [_metrics_to_dict(m) for m in folds]
            for name, folds in report.per_fold.items()
        },
        "macro": {name: _metrics_to_dict(m) for name, m in report.macro.items()},
    }


def read_metric_report(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"report parse error at byte offset {exc.pos}: {exc.msg}") from None


def _curve_rows(metrics: ModelFoldMetrics, fold: str) -> list[list[str]]:
    rows = []
    for metric, xs in (
        ("q_measure", None),
        ("ndcg", None),
        ("recall_at_k", None),
        ("interpolated_precision", RECALL_GRID),
    ):
        curve = getattr(metrics, "q" if metric == "q_measure" else metric, None)
        if curve is None:
            continue
        for i, v in enumerate(curve):
            x = f"{xs[i]:.2f}" if xs is not None else str(i + 1)
            rows.append([metric, x, repr(float(v)), fold])
    return rows


def write_curves(report: MetricReport, directory: str | Path) -> list[Path]:
    """One metric<TAB>x<TAB>value<TAB>fold file per model configuration."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in report.models:
        rows: list[list[str]] = []
        for fold, metrics in enumerate(report.per_fold[name]):
            rows.extend(_curve_rows(metrics, str(fold)))
        rows.extend(_curve_rows(report.macro[name], "macro"))
        if not rows:
            continue
        path = directory / f"{_safe_name(name)}.tsv"
        _write_tsv(path, ["metric", "x", "value", "fold"], rows)
        written.append(path)
    return written


def read_curves(path: str | Path) -> list[tuple[str, float, float, str]]:
    header, rows = read_table(path)
    if header != ["metric", "x", "value", "fold"]:
        raise InputError(f"unexpected curve file header in {path}")
    return [(r["metric"], float(r["x"]), float(r["value"]), r["fold"]) for r in rows]


def write_binary_table(report: MetricReport, path: str | Path) -> None:
    """Macro-averaged binary metrics, one row per model configuration."""
    rows = []
    for name in report.models:
        b = report.macro[name].binary
        rows.append(
            [
                name,
                f"{b.accuracy:.3f}",
                f"{b.balanced_accuracy:.3f}",
                f"{b.f1:.3f}",
                f"{b.precision:.3f}",
                f"{b.recall:.3f}",
            ]
        )
    _write_tsv(Path(path), TABLE5_COLUMNS, rows)


def write_metric_report(
    report: MetricReport, out_dir: str | Path, figures: bool = True
) -> list[Path]:
    """Write report.json, the binary-metrics table, curve TSVs, and figures."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    report_path = out_dir / "report.json"
    report_path.write_text(
        json.dumps(report_to_dict(report), indent=1, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    written.append(report_path)

    table_path = out_dir / "binary_metrics.tsv"
    write_binary_table(report, table_path)
    written.append(table_path)

    written.extend(write_curves(report, out_dir / "curves"))

    if figures:
        written.extend(plot_metric_curves(report, out_dir / "figures"))
    return written


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_SAVEFIG_KW)
    plt.close(fig)
    return path


def plot_metric_curves(report: MetricReport, directory: str | Path) -> list[Path]:
    """Macro-averaged curve figures, one line per model configuration."""
    directory = Path(directory)
    specs = [
        ("q", "q_measure.png", "rank cutoff k", "Q-measure"),
        ("ndcg", "ndcg.png", "rank cutoff r", "nDCG"),
        ("recall_at_k", "recall_at_k.png", "rank cutoff k", "recall@k"),
        ("interpolated_precision", "interpolated_precision.png", "recall", "interpolated precision"),
    ]
    written = []
    for attr, filename, xlabel, ylabel in specs:
        fig, ax = plt.subplots(figsize=(6, 4))
        plotted = False
        for name in report.models:
            curve = getattr(report.macro[name], attr)
            if curve is None:
                continue
            xs = RECALL_GRID if attr == "interpolated_precision" else np.arange(1, len(curve) + 1)
            ax.plot(xs[: len(curve)], curve, label=name, linewidth=1.5)
            plotted = True
        if not plotted:
            plt.close(fig)
            continue
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_ylim(-0.02, 1.02)
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        written.append(_save(fig, directory / filename))
    return written


def plot_topic_positivity(
    rows: Sequence[tuple[str, float, float, float]], path: str | Path
) -> Path:
    """Horizontal bars of per-topic positivity (finite values only), log scale."""
    finite = [(label, ratio) for label, _, _, ratio in rows if math.isfinite(ratio) and ratio > 0]
    fig, ax = plt.subplots(figsize=(7, max(2.0, 0.35 * len(finite) + 1)))
    if finite:
        labels = [label for label, _ in finite]
        values = [ratio for _, ratio in finite]
        ax.barh(range(len(finite)), values, color="#4878a8")
        ax.set_yticks(range(len(finite)))
        ax.set_yticklabels(labels, fontsize=7)
        ax.set_xscale("log")
        ax.axvline(1.0, color="grey", linewidth=0.8)
    ax.set_xlabel("positivity (positive / negative likelihood)")
    fig.tight_layout()
    return _save(fig, Path(path))


def plot_distance_heatmap(labels: Sequence[str], matrix: np.ndarray, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(matrix, cmap="viridis")
    ax.set_xticks(range(len(labels)))
    ax.set_yticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=90, fontsize=6)
    ax.set_yticklabels(labels, fontsize=6)
    fig.colorbar(im, ax=ax, label="Euclidean distance")
    fig.tight_layout()
    return _save(fig, Path(path))


def plot_rank_frequency(
    ranked: Mapping[str, list[tuple[str, int, int]]], path: str | Path
) -> Path:
    """Log-log rank-size plot of emotion tag frequencies per polarity."""
    fig, ax = plt.subplots(figsize=(5, 4))
    colors = {"positive": "#2a6fba", "negative": "#c23b22"}
    for side, entries in ranked.items():
        if not entries:
            continue
        ranks = [rank for _, _, rank in entries]
        counts = [count for _, count, _ in entries]
        ax.loglog(ranks, counts, "o-", markersize=3, linewidth=0.8,
                  label=side, color=colors.get(side))
    ax.set_xlabel("rank")
    ax.set_ylabel("tag count")
    ax.legend()
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    return _save(fig, Path(path))


def plot_activity(activity: ActivityReport, monthly_path: str | Path, regions_path: str | Path) -> list[Path]:
    """Monthly report counts (line) and per-region counts (bars)."""
    written = []
    months = [m for m in activity.monthly if m != "unknown"]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(range(len(months)), [activity.monthly[m] for m in months], linewidth=1.2)
    step = max(1, len(months) // 12)
    ax.set_xticks(range(0, len(months), step))
    ax.set_xticklabels(months[::step], rotation=45, fontsize=7, ha="right")
    ax.set_ylabel("reports per month")
    fig.tight_layout()
    written.append(_save(fig, Path(monthly_path)))

    regions = list(activity.regions)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(range(len(regions)), [activity.regions[r] for r in regions], color="#4878a8")
    ax.set_xticks(range(len(regions)))
    ax.set_xticklabels(regions, rotation=45, fontsize=8, ha="right")
    ax.set_ylabel("reports")
    fig.tight_layout()
    written.append(_save(fig, Path(regions_path)))
    return written
