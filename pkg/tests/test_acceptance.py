"""Acceptance suite: one test class per acceptance criterion.

Each criterion prints a PASS line when it holds; a failed assertion fails the
corresponding test, so `pytest -v tests/test_acceptance.py` gives one
pass/fail line per criterion.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from emorec import (
    Document,
    PolarityMap,
    log_sum_exp,
    posterior,
    train,
)
from emorec.cli import main
from emorec.evaluation import (
    RelevanceContext,
    ndcg_from_gains,
    q_from_gains,
    recall_at_k,
    relevance,
)
from emorec.model import log_joint
from emorec.reports import TABLE1_COLUMNS, TABLE3_COLUMNS, TABLE5_COLUMNS, read_table
from emorec.topics import all_profiles, doc_topic_density, emotion_topic_profile

from conftest import (
    random_corpus,
    separable_corpus,
    toy_documents,
    write_corpus_files,
)


class TestCriterion1GoldenOracle:
    """Worked four-document network: posterior of the first document's bag."""

    def test_posterior_matches_exact_fraction_oracle(
        self, toy_partition, toy_polarity, toy_query
    ):
        started = time.monotonic()

        # independent exact-fraction oracle, recomputed from first principles
        profiles = {
            "e1": (Fraction(7, 8), Fraction(0), Fraction(1, 8)),
            "e2": (Fraction(3, 4), Fraction(0), Fraction(1, 4)),
            "e3": (Fraction(1, 3), Fraction(1, 2), Fraction(1, 6)),
        }
        priors = {"e1": Fraction(2, 5), "e2": Fraction(1, 5), "e3": Fraction(2, 5)}
        # query uses topic 0 three times (v1 x2, v2 x1) and topic 2 once (v4)
        numerators = {
            e: profiles[e][0] ** 3 * profiles[e][2] * priors[e] for e in profiles
        }
        total = sum(numerators.values())
        oracle = {e: numerators[e] / total for e in numerators}
        assert float(oracle["e1"]) == pytest.approx(0.58704, abs=5e-6)
        assert float(oracle["e2"]) == pytest.approx(0.36968, abs=5e-6)
        assert float(oracle["e3"]) == pytest.approx(0.04327, abs=5e-6)

        model = train(toy_documents(), toy_partition, toy_polarity, epsilon=0.0)
        pred = posterior(model, toy_query)
        for e in ("e1", "e2", "e3"):
            assert pred.posterior[e] == pytest.approx(float(oracle[e]), abs=1e-4)
        for e, coarse in (("e1", 0.59), ("e2", 0.37), ("e3", 0.04)):
            assert pred.posterior[e] == pytest.approx(coarse, abs=5e-3)

        assert time.monotonic() - started < 1.0
        print("PASS criterion 1: golden-oracle posterior (0.58704, 0.36968, 0.04327)")


class TestCriterion2IntermediateQuantities:
    """Priors, document-topic density, and emotion-topic matrix columns."""

    def test_exact_quantities(self, toy_partition, toy_polarity, toy_query):
        docs = toy_documents()
        model = train(docs, toy_partition, toy_polarity, epsilon=0.0)

        # 2/5 and 1/5 are not dyadic; IEEE division is correctly rounded, so
        # equality against the same float-domain ratios is still exact.
        priors = dict(zip(model.emotions, model.priors))
        assert float(priors["e1"]) == 2 / 5
        assert float(priors["e2"]) == 1 / 5
        assert float(priors["e3"]) == 2 / 5

        d1 = doc_topic_density(toy_query, toy_partition)
        assert tuple(d1) == (0.75, 0.0, 0.25)  # dyadic, exact

        e1 = emotion_topic_profile(docs, toy_partition, "e1").density
        e2 = emotion_topic_profile(docs, toy_partition, "e2").density
        e3 = emotion_topic_profile(docs, toy_partition, "e3").density
        assert tuple(e1) == (0.875, 0.0, 0.125)
        assert tuple(e2) == (0.75, 0.0, 0.25)
        assert e3 == pytest.approx([1 / 3, 1 / 2, 1 / 6], abs=1e-12)
        print("PASS criterion 2: intermediate matrices match exactly")


class TestCriterion3NumericalStability:
    """Log-domain equals linear computation; long documents stay finite."""

    def test_log_domain_matches_linear_on_200_instances(self):
        rng = np.random.default_rng(101)
        checked = 0
        while checked < 200:
            n_emotions = int(rng.integers(2, 9))
            n_words = int(rng.integers(4, 31))
            docs, part, pol = random_corpus(
                rng,
                n_words=n_words,
                n_emotions=n_emotions,
                n_docs=int(rng.integers(n_emotions, 2 * n_emotions + 4)),
                n_topics=int(rng.integers(2, 5)),
            )
            variant = "topic" if rng.random() < 0.5 else "full_vocab"
            model = train(
                docs, part if variant == "topic" else None, pol,
                epsilon=1e-10, variant=variant,
            )
            bow = docs[int(rng.integers(0, len(docs)))].bow

            nums = []
            for i, e in enumerate(model.emotions):
                value = float(model.priors[i])
                for w in sorted(bow):
                    j = model.feature_of(w)
                    if j is not None:
                        value *= float(model.profiles[i, j]) ** bow[w]
                nums.append(value)
            if sum(nums) == 0.0:
                continue  # linear domain underflowed; not a comparable instance
            linear = {e: v / sum(nums) for e, v in zip(model.emotions, nums)}

            pred = posterior(model, bow)
            for e in model.emotions:
                assert pred.posterior[e] == pytest.approx(linear[e], rel=1e-9)
            checked += 1
        print("PASS criterion 3a: log-domain matches linear on 200 instances")

    def test_adversarial_repetition_stays_finite(self):
        # every per-emotion word probability is at most 2/11, so any naive
        # 500-fold product underflows to exactly zero for every emotion
        words = {f"w{i}": 1 for i in range(10)}
        docs = [
            Document("da", dict(words, w0=2), frozenset({"a"})),
            Document("db", dict(words, w1=2), frozenset({"b"})),
            Document("dc", dict(words, w2=2), frozenset({"c"})),
        ]
        pol = PolarityMap({"a": "positive", "b": "negative", "c": "negative"})
        model = train(docs, None, pol, epsilon=1e-10, variant="full_vocab")
        bow = {"w0": 500}
        j = model.feature_of("w0")
        naive = [float(model.profiles[i, j]) ** 500 for i in range(3)]
        assert naive == [0.0, 0.0, 0.0]

        pred = posterior(model, bow)
        values = np.array(list(pred.posterior.values()))
        assert np.all(np.isfinite(values))
        assert values.sum() == pytest.approx(1.0, abs=1e-9)
        assert pred.ranking[0] == "a"  # the emotion that overuses w0
        assert math.isfinite(log_sum_exp(list(log_joint(model, bow).values())))
        print("PASS criterion 3b: 500-token repetition stays finite in log domain")


class TestCriterion4TopicSubstitution:
    """Same-topic token swaps leave the topic-variant posterior bit-identical."""

    def test_bit_identical_over_100_corpora(self):
        rng = np.random.default_rng(211)
        substituted_count = 0
        for _ in range(100):
            docs, part, pol = random_corpus(
                rng,
                n_words=int(rng.integers(8, 16)),
                n_emotions=int(rng.integers(2, 6)),
                n_docs=int(rng.integers(6, 14)),
                n_topics=int(rng.integers(2, 5)),
            )
            model = train(docs, part, pol, epsilon=1e-10)
            bow = dict(docs[int(rng.integers(0, len(docs)))].bow)
            word = sorted(bow)[int(rng.integers(0, len(bow)))]
            topic = part.assignment[word]
            replacements = [
                w for w in sorted(part.assignment)
                if part.assignment[w] == topic and w != word and w not in bow
            ]
            baseline = posterior(model, bow)
            if replacements:
                swapped = dict(bow)
                swapped[replacements[0]] = swapped.pop(word)
                other = posterior(model, swapped)
                assert other.posterior == baseline.posterior  # bitwise equality
                assert other.ranking == baseline.ranking
                substituted_count += 1
        assert substituted_count >= 50  # the property was actually exercised
        print(f"PASS criterion 4: substitution bit-identical ({substituted_count} swaps)")


class TestCriterion5FullVocabOracle:
    """Full-vocabulary posterior equals an independent brute-force version."""

    @staticmethod
    def brute_force(docs, pol, epsilon, bow):
        """Separately written word-level naive Bayes with explicit products."""
        emotions = sorted({e for d in docs for e in d.emotions})
        vocab = sorted({w for d in docs for w in d.bow})
        tag_total = sum(len(d.emotions) for d in docs)
        numerators = {}
        for e in emotions:
            prior = sum(1 for d in docs if e in d.emotions) / tag_total
            counts = {w: 0 for w in vocab}
            total = 0
            for d in docs:
                if e in d.emotions:
                    for w, c in d.bow.items():
                        counts[w] += c
                        total += c
            density = {w: counts[w] / total for w in vocab}
            raised = {w: (epsilon if v == 0.0 else v) for w, v in density.items()}
            norm = sum(raised.values())
            density = {w: v / norm for w, v in raised.items()}
            value = prior
            for w in sorted(bow):
                if w in density:
                    value *= density[w] ** bow[w]
            numerators[e] = value
        total = sum(numerators.values())
        return {e: v / total for e, v in numerators.items()}

    def test_matches_on_random_small_instances(self):
        rng = np.random.default_rng(307)
        for _ in range(100):
            docs, _, pol = random_corpus(
                rng,
                n_words=int(rng.integers(5, 14)),
                n_emotions=int(rng.integers(2, 6)),
                n_docs=int(rng.integers(4, 12)),
            )
            model = train(docs, None, pol, epsilon=1e-9, variant="full_vocab")
            bow = docs[int(rng.integers(0, len(docs)))].bow
            expected = self.brute_force(docs, pol, 1e-9, bow)
            pred = posterior(model, bow)
            for e in model.emotions:
                assert pred.posterior[e] == pytest.approx(expected[e], abs=1e-12)
        print("PASS criterion 5: full-vocab posterior matches brute force (1e-12)")


class TestCriterion6MetricProperties:
    def test_ideal_rankings_score_one(self):
        rng = np.random.default_rng(401)
        for _ in range(100):
            n = int(rng.integers(1, 10))
            gains = np.sort(rng.random(n))[::-1] + 0.01  # positive, non-increasing
            k = int(rng.integers(1, n + 1))
            assert q_from_gains(gains, gains, k) == pytest.approx(1.0, abs=1e-12)
            assert ndcg_from_gains(gains, gains, k) == pytest.approx(1.0, abs=1e-12)
        print("PASS criterion 6a: Q and nDCG are 1 on ideal rankings")

    def test_ndcg_exchange_monotonicity_1000(self):
        rng = np.random.default_rng(409)
        checked = 0
        while checked < 1000:
            n = int(rng.integers(2, 12))
            gains = rng.random(n) * (rng.random(n) > 0.3)
            i = int(rng.integers(0, n - 1))
            if not gains[i] < gains[i + 1]:
                continue
            ideal = np.sort(gains)[::-1]
            swapped = gains.copy()
            swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
            for r in (i + 2, n):
                assert ndcg_from_gains(swapped, ideal, r) >= (
                    ndcg_from_gains(gains, ideal, r) - 1e-15
                )
            checked += 1
        print("PASS criterion 6b: nDCG exchange monotonicity on 1000 rankings")

    def test_recall_monotone_in_k(self):
        rng = np.random.default_rng(419)
        universe = [f"e{i}" for i in range(8)]
        for _ in range(100):
            ranking = list(rng.permutation(universe))
            labels = set(rng.choice(universe, size=int(rng.integers(1, 5)), replace=False))
            values = [recall_at_k([(ranking, labels)], k) for k in range(1, 9)]
            assert all(b >= a for a, b in zip(values, values[1:]))
        print("PASS criterion 6c: recall@k monotone in k")

    def test_relevance_zero_across_polarity(self):
        rng = np.random.default_rng(421)
        for _ in range(50):
            docs, part, pol = random_corpus(rng)
            ctx = RelevanceContext.build(all_profiles(docs, part), pol)
            for a in ctx.universe:
                for b in ctx.universe:
                    if pol.is_positive(a) != pol.is_positive(b):
                        assert relevance(a, b, ctx) == 0.0
        print("PASS criterion 6d: relevance is 0 for every cross-polarity pair")

    def test_q_measure_worked_value_exact(self):
        value = q_from_gains(np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0]), 3)
        assert value == 2 / 9
        print("PASS criterion 6e: Q-measure worked value 2/9 reproduced exactly")


class TestCriterion7EndToEndCv:
    """CLI evaluate on a 600-document separable corpus: quality, speed,
    and byte-identical reruns."""

    def run_evaluate(self, tmp_path, files, out_name):
        out_dir = tmp_path / out_name
        code = main([
            "evaluate",
            "--corpus", files["corpus"],
            "--polarity", files["polarity"],
            "--partition", f"topic={files['partition']}",
            "--folds", "10",
            "--seed", "17",
            "--min-count", "1",
            "--out-dir", str(out_dir),
        ])
        assert code == 0
        return out_dir

    def test_end_to_end(self, tmp_path):
        docs, part, pol = separable_corpus(docs_per_emotion=100, seed=23)
        assert len(docs) == 600
        files = write_corpus_files(docs, part, pol, tmp_path)

        started = time.monotonic()
        out_dir = self.run_evaluate(tmp_path, files, "run_a")
        elapsed = time.monotonic() - started
        assert elapsed < 60.0, f"evaluate took {elapsed:.1f}s"

        report = json.loads((out_dir / "report.json").read_text())
        assert report["macro"]["topic"]["binary"]["f1"] == 1.0
        assert report["macro"]["full_vocab"]["binary"]["f1"] == 1.0

        for model_name in ("topic", "full_vocab"):
            model_curve = report["macro"][model_name]["ndcg"]
            for baseline in ("mle", "uniform"):
                base_curve = report["macro"][baseline]["ndcg"]
                depth = min(len(model_curve), 10)
                for r in range(depth):
                    assert model_curve[r] > base_curve[r], (model_name, baseline, r + 1)

        out_dir_b = self.run_evaluate(tmp_path, files, "run_b")
        files_a = sorted(p.relative_to(out_dir) for p in out_dir.rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(out_dir_b) for p in out_dir_b.rglob("*") if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert (out_dir / rel).read_bytes() == (out_dir_b / rel).read_bytes(), rel

        print(f"PASS criterion 7: end-to-end CV in {elapsed:.1f}s, F1=1.0, "
              "models dominate baselines, reruns byte-identical")


class TestCriterion8ReportSchemas:
    """Corpus-dependent headline numbers need the original data, but the
    report generator must emit the three table schemas exactly."""

    def test_schemas_emitted(self, tmp_path):
        docs, part, pol = separable_corpus(docs_per_emotion=10, seed=29)
        files = write_corpus_files(docs, part, pol, tmp_path)

        model_path = tmp_path / "model.json"
        assert main([
            "train",
            "--corpus", files["corpus"],
            "--polarity", files["polarity"],
            "--partition", files["partition"],
            "--min-count", "1",
            "--out", str(model_path),
        ]) == 0

        report_dir = tmp_path / "model_report"
        assert main([
            "report",
            "--model", str(model_path),
            "--corpus", files["corpus"],
            "--out-dir", str(report_dir),
        ]) == 0
        header1, _ = read_table(report_dir / "sentiment_summary.tsv")
        assert header1 == TABLE1_COLUMNS == [
            "Sentiment", "Positivity", "Count", "Proportion", "Tags per post"
        ]
        header3, _ = read_table(report_dir / "topic_positivity.tsv")
        assert header3 == TABLE3_COLUMNS == ["Topic", "Positive", "Negative", "Positivity"]

        eval_dir = tmp_path / "eval_report"
        assert main([
            "evaluate",
            "--corpus", files["corpus"],
            "--polarity", files["polarity"],
            "--partition", f"topic={files['partition']}",
            "--folds", "5",
            "--min-count", "1",
            "--no-figures",
            "--out-dir", str(eval_dir),
        ]) == 0
        header5, rows5 = read_table(eval_dir / "binary_metrics.tsv")
        assert header5 == TABLE5_COLUMNS == [
            "Model", "Accuracy", "Balanced accuracy", "F1", "Precision", "Recall"
        ]
        assert {r["Model"] for r in rows5} >= {"topic", "full_vocab", "mle", "uniform"}
        print("PASS criterion 8: summary/positivity/binary table schemas emitted exactly")
