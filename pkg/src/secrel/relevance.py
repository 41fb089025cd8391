"""Logistic-regression document gate over entity-type count features.

Deliberately tiny: seven count features, zero-initialized full-batch gradient
descent on L2-regularized log loss, so retraining is deterministic. The
feature extractor is pluggable; only entity counts ship.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import Document
from .entity import ENTITY_TYPES, EntityMention, entity_type_counts

NUM_FEATURES = len(ENTITY_TYPES)

FeatureFn = Callable[[Document, list[EntityMention]], Sequence[float]]


def count_features(doc: Document, mentions: list[EntityMention]) -> Sequence[float]:
    return entity_type_counts(mentions)


@dataclass(frozen=True)
class RelevanceModel:
    weights: tuple[float, ...]
    bias: float
    threshold: float = 0.5

    def __post_init__(self) -> None:
        if len(self.weights) != NUM_FEATURES:
            raise ValueError(f"expected {NUM_FEATURES} weights, got {len(self.weights)}")
        if not all(math.isfinite(w) for w in self.weights) or not math.isfinite(self.bias):
            raise ValueError("model coefficients must be finite")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")


def zero_model(threshold: float = 0.5) -> RelevanceModel:
    return RelevanceModel(weights=(0.0,) * NUM_FEATURES, bias=0.0, threshold=threshold)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def predict(model: RelevanceModel, counts: Sequence[float]) -> float:
    """P(relevant) = sigmoid(bias + weights . counts)."""
    if len(counts) != NUM_FEATURES:
        raise ValueError(f"expected {NUM_FEATURES} counts, got {len(counts)}")
    z = model.bias + float(np.dot(model.weights, np.asarray(counts, dtype=float)))
    return float(_sigmoid(np.array(z)))


def loss_and_gradient(
    weights: np.ndarray,
    bias: float,
    features: np.ndarray,
    labels: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, float]:
    """Mean log loss + (l2/2)||w||^2 and its analytic gradient.

    The loss is evaluated in logit space (softplus form), so it stays finite
    for arbitrarily large margins; the bias is not regularized.
    """
    z = features @ weights + bias
    # log(1+e^z) - y*z, computed stably
    loss = float(np.mean(np.maximum(z, 0.0) - z * labels + np.log1p(np.exp(-np.abs(z)))))
    loss += 0.5 * l2 * float(np.dot(weights, weights))
    residual = _sigmoid(z) - labels
    grad_w = features.T @ residual / len(labels) + l2 * weights
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


def train(
    labeled: Sequence[tuple[Sequence[float], bool]],
    l2: float = 0.01,
    epochs: int = 500,
    learning_rate: float = 0.1,
    threshold: float = 0.5,
) -> RelevanceModel:
    """Full-batch gradient descent from zero initialization; deterministic."""
    if not labeled:
        raise ValueError("training requires at least one labeled example")
    if l2 < 0:
        raise ValueError("l2 must be non-negative")
    if epochs <= 0 or learning_rate <= 0:
        raise ValueError("epochs and learning_rate must be positive")
    features = np.asarray([counts for counts, _ in labeled], dtype=float)
    labels = np.asarray([1.0 if y else 0.0 for _, y in labeled], dtype=float)
    if labels.min() == labels.max():
        raise ValueError("training data contains a single class; need both labels")
    if features.shape[1] != NUM_FEATURES:
        raise ValueError(f"expected {NUM_FEATURES} features, got {features.shape[1]}")

    weights = np.zeros(NUM_FEATURES)
    bias = 0.0
    for epoch in range(epochs):
        loss, grad_w, grad_b = loss_and_gradient(weights, bias, features, labels, l2)
        if not math.isfinite(loss):
            raise ValueError(f"non-finite training loss at epoch {epoch}")
        weights = weights - learning_rate * grad_w
        bias = bias - learning_rate * grad_b
    return RelevanceModel(tuple(float(w) for w in weights), float(bias), threshold)


def filter_corpus(
    model: RelevanceModel,
    documents: Sequence[Document],
    mentions_by_doc: dict[str, list[EntityMention]],
    feature_fn: FeatureFn = count_features,
) -> tuple[list[Document], list[Document]]:
    """Partition documents into (kept, dropped) at the model threshold, order preserved."""
    kept: list[Document] = []
    dropped: list[Document] = []
    for doc in documents:
        p = predict(model, feature_fn(doc, mentions_by_doc.get(doc.id, [])))
        (kept if p >= model.threshold else dropped).append(doc)
    return kept, dropped


def save_model(model: RelevanceModel, path: str | Path) -> None:
    payload = {"weights": list(model.weights), "bias": model.bias, "threshold": model.threshold}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", "utf-8")


def load_model(path: str | Path) -> RelevanceModel:
    data = json.loads(Path(path).read_text("utf-8"))
    return RelevanceModel(tuple(data["weights"]), data["bias"], data.get("threshold", 0.5))
