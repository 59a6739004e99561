"""Command-line interface: train, predict, evaluate, report, serve.

Exit codes: 0 success, 2 bad input, 3 no modelled tokens in a prediction,
1 internal error. The global flags --seed, --epsilon, --stopwords, and
--format can also be set through environment variables with the EMOREC_
prefix (EMOREC_SEED, EMOREC_EPSILON, EMOREC_STOPWORDS, EMOREC_FORMAT);
command-line flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import reports
from .errors import EmorecError, InputError, NoModelledTokensError
from .evaluation import CvConfig, load_lexicon, run_cv
from .model import DEFAULT_EPSILON, load_model, model_profiles, save_model, train
from .predict import predict_text, result_to_dict
from .topics import distance_matrix, load_partition

ENV_PREFIX = "EMOREC_"


def _env(name: str, cast, fallback):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise InputError(f"environment variable {ENV_PREFIX}{name}={raw!r} is invalid") from None


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_env("SEED", int, 0),
                        help="random seed (env EMOREC_SEED)")
    common.add_argument("--epsilon", type=float, default=_env("EPSILON", float, DEFAULT_EPSILON),
                        help="zero-density smoothing constant (env EMOREC_EPSILON)")
    common.add_argument("--stopwords", default=_env("STOPWORDS", str, None),
                        help="stopword file, one token per line (env EMOREC_STOPWORDS)")
    common.add_argument("--format", choices=["jsonl", "tsv"], default=_env("FORMAT", str, None),
                        help="corpus file format; inferred from the extension when omitted")
    return common


def _corpus_format(path: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    return "tsv" if Path(path).suffix.lower() == ".tsv" else "jsonl"


def _stopwords(args) -> frozenset[str]:
    if args.stopwords:
        return corpus_mod.load_stopwords(args.stopwords)
    return corpus_mod.default_stopwords()


def _load_corpus(args):
    fmt = _corpus_format(args.corpus, args.format)
    raws = corpus_mod.ingest(args.corpus, fmt)
    cfg = corpus_mod.PreprocessConfig(min_count=args.min_count, stopwords=_stopwords(args))
    docs, vocab = corpus_mod.build_corpus(raws, cfg)
    return raws, docs, vocab


def _named_paths(pairs: list[str]) -> dict[str, str]:
    """NAME=PATH arguments; a bare PATH is named by its file stem."""
    out: dict[str, str] = {}
    for item in pairs:
        name, _, path = item.partition("=")
        if not path:
            name, path = Path(item).stem, item
        if name in out:
            raise InputError(f"duplicate name {name!r}")
        out[name] = path
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_train(args) -> int:
    raws, docs, vocab = _load_corpus(args)
    pol = corpus_mod.load_polarity(args.polarity)
    variant = args.variant or ("topic" if args.partition else "full-vocab")
    part = None
    if variant == "topic":
        if not args.partition:
            raise InputError("--variant topic requires --partition")
        part = load_partition(args.partition, vocab)
    model = train(docs, part, pol, epsilon=args.epsilon,
                  variant=variant.replace("-", "_"))
    save_model(model, args.out)

    print(reports.format_sentiment_summary(corpus_mod.sentiment_summary(raws, pol)))
    print()
    print(f"documents: {len(docs)} modelled (of {len(raws)} ingested)")
    print(f"vocabulary: {len(vocab)} words")
    print(f"emotions: {len(model.emotions)}")
    if part is not None:
        print(f"topics: {part.n_t}")
    print(f"model written to {args.out}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    text = args.text if args.text is not None else sys.stdin.read()
    result = predict_text(model, text, top_k=args.top_k)
    if args.json:
        print(json.dumps(result_to_dict(result), indent=2, sort_keys=True))
        return 0
    print(f"positive sentiment posterior: {result.positive_posterior:.5f}")
    print(f"{'emotion':24s} {'prior':>10s} {'posterior':>10s}")
    for entry in result.emotions:
        print(f"{entry.label:24s} {entry.prior:10.5f} {entry.posterior:10.5f}")
    for att in result.topic_attribution:
        words = ", ".join(att.top_words[:4])
        print(f"topic {att.topic} (density {att.density:.3f}): {words}")
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    raws, docs, vocab = _load_corpus(args)
    pol = corpus_mod.load_polarity(args.polarity)
    partition_paths = _named_paths(args.partition or [])
    if not partition_paths:
        raise InputError("evaluate requires at least one --partition NAME=PATH")
    partitions = {name: load_partition(path, vocab) for name, path in partition_paths.items()}
    lexicons = {
        name: load_lexicon(path) for name, path in _named_paths(args.lexicon or []).items()
    }
    cfg = CvConfig(
        folds=args.folds,
        seed=args.seed,
        epsilon=args.epsilon,
        max_rank=args.max_rank,
        lexicons=lexicons,
        include_full_vocab=not args.no_full_vocab,
    )
    report = run_cv(docs, partitions, pol, cfg)
    written = reports.write_metric_report(report, args.out_dir, figures=not args.no_figures)
    for name in report.models:
        b = report.macro[name].binary
        print(f"{name:32s} accuracy={b.accuracy:.3f} balanced={b.balanced_accuracy:.3f} "
              f"f1={b.f1:.3f} precision={b.precision:.3f} recall={b.recall:.3f}")
    print(f"{len(written)} report files written to {args.out_dir}")
    return 0


def cmd_report(args) -> int:
    model = load_model(args.model)
    if model.variant != "topic":
        raise InputError("report requires topic variant")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rows = reports.topic_positivity_table(model, top_words=args.top_words)
    reports.write_topic_positivity(rows, out / "topic_positivity.tsv")
    reports.plot_topic_positivity(rows, out / "figures" / "topic_positivity.png")

    profiles = model_profiles(model)
    reports.write_profiles(profiles, out / "emotion_profiles.tsv")
    labels, matrix = distance_matrix(profiles)
    reports.write_distance_matrix(labels, matrix, out / "emotion_distances.tsv")
    reports.plot_distance_heatmap(labels, matrix, out / "figures" / "emotion_distances.png")

    if args.corpus:
        fmt = _corpus_format(args.corpus, args.format)
        raws = corpus_mod.ingest(args.corpus, fmt)
        model.polarity.require_covers(e for r in raws for e in r.emotions)
        summary = corpus_mod.sentiment_summary(raws, model.polarity)
        reports.write_sentiment_summary(summary, out / "sentiment_summary.tsv")
        tagged = [r for r in raws if r.emotions]
        ranked = corpus_mod.rank_frequency(tagged, model.polarity)
        reports.plot_rank_frequency(ranked, out / "figures" / "rank_frequency.png")
        activity = corpus_mod.activity_report(raws)
        reports.plot_activity(
            activity, out / "figures" / "monthly_reports.png", out / "figures" / "regions.png"
        )

    print(f"report written to {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    model = load_model(args.model)
    app = create_app(
        model,
        max_bytes=args.max_bytes,
        top_k_cap=args.top_k_cap,
        static_dir=args.frontend,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="emorec",
        description="Probabilistic emotion recommendation and sentiment "
                    "classification over labelled free-text narratives.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="train a model from a labelled corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--polarity", required=True, help="emotion<TAB>polarity file")
    p.add_argument("--partition", help="word<TAB>topic_id file (topic variant)")
    p.add_argument("--variant", choices=["topic", "full-vocab"],
                   help="default: topic when --partition is given, else full-vocab")
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--out", default="model.json")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="rank emotions for a text")
    p.add_argument("--model", required=True)
    p.add_argument("--text", help="query text; reads stdin when omitted")
    p.add_argument("--top-k", type=int, default=3)
    p.add_argument("--json", action="store_true", help="emit the structured payload")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common],
                       help="k-fold cross-validation of models and baselines")
    p.add_argument("--corpus", required=True)
    p.add_argument("--polarity", required=True)
    p.add_argument("--partition", action="append", metavar="NAME=PATH",
                   help="named partition file; repeatable")
    p.add_argument("--lexicon", action="append", metavar="NAME=PATH",
                   help="named sentiment lexicon (word<TAB>score); repeatable")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--max-rank", type=int, default=50)
    p.add_argument("--no-full-vocab", action="store_true")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out-dir", default="eval_report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", parents=[common],
                       help="topic positivity, emotion profiles, and distances")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", help="optional corpus for descriptive statistics")
    p.add_argument("--top-words", type=int, default=4)
    p.add_argument("--out-dir", default="model_report")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP prediction service")
    p.add_argument("--model", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--max-bytes", type=int, default=64 * 1024)
    p.add_argument("--top-k-cap", type=int, default=50)
    p.add_argument("--frontend", help="directory with the built dashboard, served at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except NoModelledTokensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EmorecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
