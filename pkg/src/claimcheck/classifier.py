"""Binary true/false claim classifier with k-fold cross-validation.

The trainable baseline is logistic regression over binary bag-of-words
features, fit by full-batch gradient descent. It sits behind a small
train/predict/save/load surface so a heavier model can be dropped in later
without touching callers.

Training is fully deterministic: weights start at zero, the batch is the
whole corpus, and the only randomness in the stack (fold shuffling for
cross-validation) is driven by the configured seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Callable, Protocol, Sequence

import numpy as np

from .corpus import Verdict, VettedClaim, corpus_digest, Corpus

ARTIFACT_FORMAT_VERSION = 1


class ClassifierError(Exception):
    pass


class EmptyCorpus(ClassifierError):
    pass


class SingleClassCorpus(ClassifierError):
    pass


class TooFewExamples(ClassifierError):
    pass


class UnrecognizedFormatVersion(ClassifierError):
    pass


class CorruptArtifact(ClassifierError):
    pass


def tokenize(text: str) -> list[str]:
    """Case-fold, map non-alphanumeric characters to spaces, split."""
    folded = text.casefold()
    cleaned = "".join(ch if ch.isalnum() else " " for ch in folded)
    return cleaned.split()


@dataclass(frozen=True)
class TokenVocabulary:
    """Token-to-index map in first-occurrence order, with document frequencies."""

    tokens: tuple[str, ...]
    doc_freq: tuple[int, ...]
    min_df: int

    def __post_init__(self):
        if len(self.tokens) != len(self.doc_freq):
            raise ValueError("tokens and doc_freq lengths differ")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def index(self) -> dict[str, int]:
        cached = self.__dict__.get("_index")
        if cached is None:
            cached = {tok: i for i, tok in enumerate(self.tokens)}
            self.__dict__["_index"] = cached
        return cached

    def to_dict(self) -> dict:
        return {
            "tokens": list(self.tokens),
            "doc_freq": list(self.doc_freq),
            "min_df": self.min_df,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TokenVocabulary":
        return cls(
            tokens=tuple(data["tokens"]),
            doc_freq=tuple(data["doc_freq"]),
            min_df=int(data["min_df"]),
        )


def build_vocab(claims: Sequence[VettedClaim], min_df: int = 1) -> TokenVocabulary:
    """Vocabulary over claim texts, first-occurrence ordered, min_df filtered."""
    if min_df < 1:
        raise ValueError("min_df must be a positive integer")
    if not claims:
        raise EmptyCorpus("cannot build a vocabulary from zero claims")
    order: list[str] = []
    freq: dict[str, int] = {}
    for claim in claims:
        # dict.fromkeys, not set: per-document dedup must keep text order so
        # the vocabulary (and the weight vector) is stable across processes
        for token in dict.fromkeys(tokenize(claim.text)):
            if token not in freq:
                order.append(token)
                freq[token] = 0
            freq[token] += 1
    kept = [tok for tok in order if freq[tok] >= min_df]
    return TokenVocabulary(
        tokens=tuple(kept),
        doc_freq=tuple(freq[tok] for tok in kept),
        min_df=min_df,
    )


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    learning_rate: float = 0.1
    l2: float = 1e-4
    seed: int = 0
    class_weighting: bool = True
    min_df: int = 1

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "seed": self.seed,
            "class_weighting": self.class_weighting,
            "min_df": self.min_df,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        return cls(
            epochs=int(data["epochs"]),
            learning_rate=float(data["learning_rate"]),
            l2=float(data["l2"]),
            seed=int(data["seed"]),
            class_weighting=bool(data["class_weighting"]),
            min_df=int(data.get("min_df", 1)),
        )


class TextClassifier(Protocol):
    """Anything that can turn a headline into a verdict with a confidence."""

    def predict(self, text: str) -> tuple[Verdict, float]: ...


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Clipping keeps probabilities strictly inside (0, 1) in float64.
    return 1.0 / (1.0 + np.exp(-np.clip(z, -30.0, 30.0)))


def features(vocab: TokenVocabulary, texts: Sequence[str]) -> np.ndarray:
    """Binary bag-of-words matrix; out-of-vocabulary tokens are ignored."""
    index = vocab.index
    X = np.zeros((len(texts), len(vocab)), dtype=np.float64)
    for row, text in enumerate(texts):
        for token in tokenize(text):
            col = index.get(token)
            if col is not None:
                X[row, col] = 1.0
    return X


def loss_and_gradient(
    X: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    bias: float,
    l2: float,
    sample_weight: np.ndarray,
) -> tuple[float, np.ndarray, float]:
    """Weighted logistic loss with L2 on the weights (bias unregularized).

    loss = mean_i s_i * CE(p_i, y_i) + (l2 / 2) * ||w||^2
    """
    n = X.shape[0]
    p = _sigmoid(X @ weights + bias)
    ce = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    loss = float(np.sum(sample_weight * ce) / n + 0.5 * l2 * np.dot(weights, weights))
    residual = sample_weight * (p - y)
    grad_w = X.T @ residual / n + l2 * weights
    grad_b = float(np.sum(residual) / n)
    return loss, grad_w, grad_b


@dataclass(eq=False)
class ModelArtifact:
    """Trained classifier weights plus everything needed to reload them."""

    weights: np.ndarray
    bias: float
    vocabulary: TokenVocabulary
    config: TrainConfig
    corpus_digest: str
    format_version: int = ARTIFACT_FORMAT_VERSION
    trained_at: str | None = None

    def __post_init__(self):
        if len(self.weights) != len(self.vocabulary):
            raise ValueError("weight vector length must equal vocabulary size")

    def predict(self, text: str) -> tuple[Verdict, float]:
        """Sigmoid of the linear score; probability >= 0.5 reads as true."""
        z = self.bias
        index = self.vocabulary.index
        seen: set[int] = set()
        for token in tokenize(text):
            col = index.get(token)
            if col is not None and col not in seen:
                seen.add(col)
                z += float(self.weights[col])
        probability = float(_sigmoid(np.asarray([z]))[0])
        verdict = Verdict.TRUE if probability >= 0.5 else Verdict.FALSE
        return verdict, probability

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelArtifact):
            return NotImplemented
        return (
            self.format_version == other.format_version
            and np.array_equal(self.weights, other.weights)
            and self.bias == other.bias
            and self.vocabulary == other.vocabulary
            and self.config == other.config
            and self.corpus_digest == other.corpus_digest
            and self.trained_at == other.trained_at
        )


def _class_counts(claims: Sequence[VettedClaim]) -> tuple[int, int]:
    n_true = sum(1 for c in claims if c.verdict is Verdict.TRUE)
    return n_true, len(claims) - n_true


def train(claims: Sequence[VettedClaim], config: TrainConfig | None = None) -> ModelArtifact:
    """Fit logistic-regression weights by full-batch gradient descent.

    With class weighting on, each example carries weight n / (2 * n_class) so
    both classes contribute equally to the loss regardless of imbalance.
    """
    config = config or TrainConfig()
    if not claims:
        raise EmptyCorpus("no claims to train on")
    n_true, n_false = _class_counts(claims)
    if n_true == 0 or n_false == 0:
        raise SingleClassCorpus("training requires both verdict classes")

    vocab = build_vocab(claims, min_df=config.min_df)
    X = features(vocab, [c.text for c in claims])
    y = np.array([float(c.verdict) for c in claims], dtype=np.float64)
    n = len(claims)
    if config.class_weighting:
        weight_true = n / (2.0 * n_true)
        weight_false = n / (2.0 * n_false)
        sample_weight = np.where(y == 1.0, weight_true, weight_false)
    else:
        sample_weight = np.ones(n, dtype=np.float64)

    weights = np.zeros(len(vocab), dtype=np.float64)
    bias = 0.0
    for _ in range(config.epochs):
        _, grad_w, grad_b = loss_and_gradient(X, y, weights, bias, config.l2, sample_weight)
        weights -= config.learning_rate * grad_w
        bias -= config.learning_rate * grad_b

    return ModelArtifact(
        weights=weights,
        bias=bias,
        vocabulary=vocab,
        config=config,
        corpus_digest=corpus_digest(Corpus(claims=list(claims))),
    )


@dataclass(frozen=True)
class MajorityClassifier:
    """Constant baseline: always predicts the training majority class."""

    verdict: Verdict
    probability: float

    def predict(self, text: str) -> tuple[Verdict, float]:
        return self.verdict, self.probability


def train_majority(
    claims: Sequence[VettedClaim], config: TrainConfig | None = None
) -> MajorityClassifier:
    """Independent evaluation baseline; ties break toward true."""
    if not claims:
        raise EmptyCorpus("no claims to train on")
    n_true, n_false = _class_counts(claims)
    verdict = Verdict.TRUE if n_true >= n_false else Verdict.FALSE
    share = max(n_true, n_false) / len(claims)
    probability = share if verdict is Verdict.TRUE else 1.0 - share
    return MajorityClassifier(verdict=verdict, probability=probability)


@dataclass
class FoldConfusion:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def accuracy(self) -> float:
        total = self.tp + self.tn + self.fp + self.fn
        return (self.tp + self.tn) / total if total else 0.0

    def to_dict(self) -> dict:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


@dataclass
class CvReport:
    k: int
    fold_accuracies: list[float]
    mean_accuracy: float
    fold_confusions: list[FoldConfusion]
    seed: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "fold_accuracies": self.fold_accuracies,
            "mean_accuracy": self.mean_accuracy,
            "fold_confusions": [c.to_dict() for c in self.fold_confusions],
            "seed": self.seed,
        }


def stratified_folds(
    claims: Sequence[VettedClaim], k: int, seed: int
) -> list[list[int]]:
    """Deterministic stratified fold assignment (round-robin after shuffle)."""
    rng = Random(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for target in (Verdict.FALSE, Verdict.TRUE):
        indices = [i for i, c in enumerate(claims) if c.verdict is target]
        rng.shuffle(indices)
        for fold in range(k):
            folds[fold].extend(indices[fold::k])
    return [sorted(fold) for fold in folds]


def evaluate(model: TextClassifier, claims: Sequence[VettedClaim]) -> FoldConfusion:
    confusion = FoldConfusion()
    for claim in claims:
        predicted, _ = model.predict(claim.text)
        if claim.verdict is Verdict.TRUE:
            if predicted is Verdict.TRUE:
                confusion.tp += 1
            else:
                confusion.fn += 1
        else:
            if predicted is Verdict.TRUE:
                confusion.fp += 1
            else:
                confusion.tn += 1
    return confusion


def cross_validate(
    claims: Sequence[VettedClaim],
    k: int = 10,
    config: TrainConfig | None = None,
    trainer: Callable[[Sequence[VettedClaim], TrainConfig], TextClassifier] = train,
) -> CvReport:
    """Stratified k-fold cross-validation of a trainable classifier.

    ``trainer`` builds a fresh model per fold, so an independent baseline
    (e.g. the majority classifier) can be evaluated on identical folds.
    """
    config = config or TrainConfig()
    if k < 2:
        raise ValueError("k must be at least 2")
    n_true, n_false = _class_counts(claims)
    if min(n_true, n_false) < k:
        raise TooFewExamples(
            f"each class needs at least k={k} members (got {n_true} true / {n_false} false)"
        )

    folds = stratified_folds(claims, k, config.seed)
    confusions: list[FoldConfusion] = []
    for fold_indices in folds:
        held_out = set(fold_indices)
        train_claims = [c for i, c in enumerate(claims) if i not in held_out]
        test_claims = [claims[i] for i in fold_indices]
        model = trainer(train_claims, config)
        confusions.append(evaluate(model, test_claims))

    accuracies = [c.accuracy for c in confusions]
    return CvReport(
        k=k,
        fold_accuracies=accuracies,
        mean_accuracy=sum(accuracies) / k,
        fold_confusions=confusions,
        seed=config.seed,
    )


def _artifact_to_dict(model: ModelArtifact) -> dict:
    return {
        "format_version": model.format_version,
        "weights": [float(w) for w in model.weights],
        "bias": float(model.bias),
        "vocabulary": model.vocabulary.to_dict(),
        "hyperparameters": model.config.to_dict(),
        "corpus_digest": model.corpus_digest,
        "trained_at": model.trained_at,
    }


def save_model(model: ModelArtifact, path: str | Path) -> None:
    """Write the artifact as canonical JSON (stable key order, exact floats)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(_artifact_to_dict(model), sort_keys=True, indent=2)
    path.write_text(payload + "\n", encoding="utf-8")


def load_model(path: str | Path) -> ModelArtifact:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptArtifact(f"cannot read model artifact: {exc}") from exc
    if not isinstance(data, dict) or "format_version" not in data:
        raise CorruptArtifact("artifact is missing its format_version")
    version = data["format_version"]
    if version != ARTIFACT_FORMAT_VERSION:
        raise UnrecognizedFormatVersion(f"format_version {version!r} is not supported")
    try:
        return ModelArtifact(
            weights=np.asarray(data["weights"], dtype=np.float64),
            bias=float(data["bias"]),
            vocabulary=TokenVocabulary.from_dict(data["vocabulary"]),
            config=TrainConfig.from_dict(data["hyperparameters"]),
            corpus_digest=data["corpus_digest"],
            format_version=version,
            trained_at=data.get("trained_at"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptArtifact(f"artifact fields invalid: {exc}") from exc
