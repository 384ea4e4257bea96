"""Hope-speech text classification with pool-based active learning."""

from .corpus import (
    Corpus,
    CorpusError,
    CorpusStats,
    CsvSchema,
    Document,
    Label,
    LabeledDocument,
    Split,
    corpus_stats,
    load_corpus,
    normalize,
    save_corpus,
)
from .features import SparseVector, Vectorizer, Vocabulary, fit, tokenize, transform
from .classifier import (
    LinearModel,
    ProbDist,
    Scorer,
    TfidfLogisticScorer,
    TrainConfig,
    predict,
    predict_proba,
    train,
    train_tfidf_scorer,
)
from .active_learning import (
    ALConfig,
    ALState,
    ActiveLearningError,
    OracleHandle,
    RoundRecord,
    Strategy,
    entropy,
    run_loop,
    select_batch,
    write_history,
)
from .evaluation import (
    ConfusionMatrix,
    EvaluationError,
    FoldSplit,
    MetricsReport,
    confusion,
    metrics,
    stratified_kfold,
)
from .scorer_protocol import (
    ExternalScorer,
    ProtocolError,
    ScorerSession,
    score_batch_remote,
    spawn_scorer,
)

__version__ = "0.1.0"

__all__ = [
    "ALConfig",
    "ALState",
    "ActiveLearningError",
    "ConfusionMatrix",
    "Corpus",
    "CorpusError",
    "CorpusStats",
    "CsvSchema",
    "Document",
    "EvaluationError",
    "ExternalScorer",
    "FoldSplit",
    "Label",
    "LabeledDocument",
    "LinearModel",
    "MetricsReport",
    "OracleHandle",
    "ProbDist",
    "ProtocolError",
    "RoundRecord",
    "Scorer",
    "ScorerSession",
    "SparseVector",
    "Split",
    "Strategy",
    "TfidfLogisticScorer",
    "TrainConfig",
    "Vectorizer",
    "Vocabulary",
    "confusion",
    "corpus_stats",
    "entropy",
    "fit",
    "load_corpus",
    "metrics",
    "normalize",
    "predict",
    "predict_proba",
    "run_loop",
    "save_corpus",
    "score_batch_remote",
    "select_batch",
    "spawn_scorer",
    "stratified_kfold",
    "tokenize",
    "train",
    "train_tfidf_scorer",
    "transform",
    "write_history",
]
