"""Probabilistic emotion recommendation over labelled free-text narratives.

The package trains a naive Bayes emotion recommender whose features are
either word-topic partitions (dimension-reduced) or the raw vocabulary,
marginalizes its posterior into a binary sentiment classifier, and evaluates
both under k-fold cross-validation with graded ranking metrics.
"""

from .corpus import (
    Document,
    PolarityMap,
    PreprocessConfig,
    RawDocument,
    Vocabulary,
    build_corpus,
    ingest,
    load_polarity,
    load_stopwords,
    preprocess,
)
from .errors import EmorecError, InputError, NoModelledTokensError
from .model import (
    EmotionModel,
    RankedPrediction,
    classify_sentiment,
    load_model,
    log_sum_exp,
    posterior,
    save_model,
    sentiment_posterior,
    top_k,
    train,
)
from .topics import (
    EmotionTopicProfile,
    TopicPartition,
    baseline_partition,
    distance_matrix,
    doc_topic_density,
    emotion_distance,
    emotion_topic_profile,
    load_partition,
    sentiment_topic_density,
    topic_positivity,
)

__version__ = "0.1.0"

__all__ = [
    "Document",
    "EmorecError",
    "EmotionModel",
    "EmotionTopicProfile",
    "InputError",
    "NoModelledTokensError",
    "PolarityMap",
    "PreprocessConfig",
    "RankedPrediction",
    "RawDocument",
    "TopicPartition",
    "Vocabulary",
    "baseline_partition",
    "build_corpus",
    "classify_sentiment",
    "distance_matrix",
    "doc_topic_density",
    "emotion_distance",
    "emotion_topic_profile",
    "ingest",
    "load_model",
    "load_partition",
    "load_polarity",
    "load_stopwords",
    "log_sum_exp",
    "posterior",
    "preprocess",
    "save_model",
    "sentiment_posterior",
    "sentiment_topic_density",
    "top_k",
    "topic_positivity",
    "train",
]
