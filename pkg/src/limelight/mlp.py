"""One-hidden-layer softmax classifier trained with mini-batch SGD.

This is the black box the explainer interrogates. Training is a pure
function of (dataset order, vocabulary, config): initialization and
epoch shuffles consume a single seeded PRNG stream, so two runs with the
same inputs produce bit-identical parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import LabeledDataset, Vocabulary, vectorize_dataset
from .errors import EmptyInputError, InvalidDimensionError
from .rng import SplitMix64


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    batch_size: int = 32
    epochs: int = 20
    hidden_dim: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1 or self.epochs < 1 or self.hidden_dim < 1:
            raise ValueError("batch_size, epochs, and hidden_dim must be positive")


@dataclass(frozen=True)
class MlpModel:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    categories: tuple[str, ...]

    def __post_init__(self):
        hidden, inputs = self.W1.shape
        classes = len(self.categories)
        if self.b1.shape != (hidden,) or self.W2.shape != (classes, hidden) or self.b2.shape != (classes,):
            raise InvalidDimensionError("parameter shapes are inconsistent")
        if classes < 2:
            raise InvalidDimensionError("need at least 2 classes")
        for arr in (self.W1, self.b1, self.W2, self.b2):
            if not np.all(np.isfinite(arr)):
                raise ValueError("model parameters must be finite")
            arr.setflags(write=False)

    @property
    def input_dim(self) -> int:
        return self.W1.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.W1.shape[0]

    @property
    def num_classes(self) -> int:
        return len(self.categories)


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confusion: np.ndarray

    def __post_init__(self):
        self.confusion.setflags(write=False)


@dataclass(frozen=True)
class SearchGrid:
    learning_rates: tuple[float, ...] = (0.5, 0.1, 0.05)
    batch_sizes: tuple[int, ...] = (16, 32)
    epoch_counts: tuple[int, ...] = (20,)
    hidden_dims: tuple[int, ...] = (64,)

    def __len__(self) -> int:
        return (
            len(self.learning_rates)
            * len(self.batch_sizes)
            * len(self.epoch_counts)
            * len(self.hidden_dims)
        )


def _glorot_limit(fan_in: int, fan_out: int) -> float:
    return math.sqrt(6.0 / (fan_in + fan_out))


def _init_arrays(rng: SplitMix64, input_dim: int, hidden_dim: int, num_classes: int):
    s1 = _glorot_limit(input_dim, hidden_dim)
    s2 = _glorot_limit(hidden_dim, num_classes)
    W1 = -s1 + 2.0 * s1 * rng.uniform_array(hidden_dim * input_dim).reshape(hidden_dim, input_dim)
    b1 = np.zeros(hidden_dim)
    W2 = -s2 + 2.0 * s2 * rng.uniform_array(num_classes * hidden_dim).reshape(num_classes, hidden_dim)
    b2 = np.zeros(num_classes)
    return W1, b1, W2, b2


def _default_categories(num_classes: int) -> tuple[str, ...]:
    return tuple(f"class_{i}" for i in range(num_classes))


def init_model(
    input_dim: int,
    hidden_dim: int,
    num_classes: int,
    seed: int,
    categories: tuple[str, ...] | None = None,
) -> MlpModel:
    """Glorot-uniform weights in [-s, s] per layer, zero biases."""
    if input_dim < 1 or hidden_dim < 1 or num_classes < 2:
        raise InvalidDimensionError(
            f"invalid dimensions: input={input_dim} hidden={hidden_dim} classes={num_classes}"
        )
    if categories is None:
        categories = _default_categories(num_classes)
    if len(categories) != num_classes:
        raise InvalidDimensionError("len(categories) must equal num_classes")
    W1, b1, W2, b2 = _init_arrays(SplitMix64(seed), input_dim, hidden_dim, num_classes)
    return MlpModel(W1=W1, b1=b1, W2=W2, b2=b2, categories=tuple(categories))


def _affine_forward(model, X: np.ndarray):
    Z1 = X @ model.W1.T + model.b1
    H = np.maximum(Z1, 0.0)
    logits = H @ model.W2.T + model.b2
    return Z1, H, logits


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def forward_batch(model: MlpModel, X: np.ndarray) -> np.ndarray:
    """Probability matrix (rows sum to 1) for a batch of feature rows."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise InvalidDimensionError(
            f"expected (n, {model.input_dim}) inputs, got {X.shape}"
        )
    _, _, logits = _affine_forward(model, X)
    return _softmax(logits)


def forward(model: MlpModel, x) -> np.ndarray:
    """Class probabilities for one feature vector (accepts FeatureVector)."""
    values = getattr(x, "values", x)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.shape[0] != model.input_dim:
        raise InvalidDimensionError(
            f"expected a length-{model.input_dim} vector, got shape {values.shape}"
        )
    return forward_batch(model, values.reshape(1, -1))[0]


def gradient(model: MlpModel, inputs: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy gradients (dW1, db1, dW2, db2) for a batch.

    The output-layer error is (softmax - one_hot) / batch_size; the relu
    derivative at exactly zero is taken as zero.
    """
    X = np.asarray(inputs, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyInputError("gradient needs a non-empty batch")
    if X.shape[1] != model.input_dim:
        raise InvalidDimensionError(f"expected (n, {model.input_dim}) inputs, got {X.shape}")
    Z1, H, logits = _affine_forward(model, X)
    P = _softmax(logits)
    one_hot = np.zeros_like(P)
    one_hot[np.arange(len(y)), y] = 1.0
    delta2 = (P - one_hot) / len(y)
    dW2 = delta2.T @ H
    db2 = delta2.sum(axis=0)
    delta1 = (delta2 @ model.W2) * (Z1 > 0)
    dW1 = delta1.T @ X
    db1 = delta1.sum(axis=0)
    return dW1, db1, dW2, db2


def _batch_loss_sum(logits: np.ndarray, y: np.ndarray) -> float:
    shifted = logits - logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1))
    return float(np.sum(lse - shifted[np.arange(len(y)), y]))


def train(
    dataset: LabeledDataset, vocab: Vocabulary, config: TrainConfig
) -> tuple[MlpModel, list[float]]:
    """Mini-batch SGD on tf features; returns the model and per-epoch mean loss."""
    docs = dataset.documents
    if not docs:
        raise EmptyInputError("cannot train on an empty dataset")
    num_classes = len(dataset.categories)
    labels = np.array([doc.label for doc in docs])
    if labels.min() < 0 or labels.max() >= num_classes:
        raise ValueError("document labels must index into dataset.categories")

    X = vectorize_dataset(docs, vocab, "tf")
    n = len(docs)
    rng = SplitMix64(config.seed)
    W1, b1, W2, b2 = _init_arrays(rng, len(vocab), config.hidden_dim, num_classes)

    order = list(range(n))
    loss_history: list[float] = []
    for _ in range(config.epochs):
        rng.shuffle(order)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            Xb = X[batch]
            yb = labels[batch]
            m = len(batch)

            Z1 = Xb @ W1.T + b1
            H = np.maximum(Z1, 0.0)
            logits = H @ W2.T + b2
            epoch_loss += _batch_loss_sum(logits, yb)

            P = _softmax(logits)
            one_hot = np.zeros_like(P)
            one_hot[np.arange(m), yb] = 1.0
            delta2 = (P - one_hot) / m
            dW2 = delta2.T @ H
            db2 = delta2.sum(axis=0)
            delta1 = (delta2 @ W2) * (Z1 > 0)
            dW1 = delta1.T @ Xb
            db1 = delta1.sum(axis=0)

            W1 -= config.learning_rate * dW1
            b1 -= config.learning_rate * db1
            W2 -= config.learning_rate * dW2
            b2 -= config.learning_rate * db2
        loss_history.append(epoch_loss / n)

    model = MlpModel(W1=W1, b1=b1, W2=W2, b2=b2, categories=dataset.categories)
    return model, loss_history


def grid_search(
    train_set: LabeledDataset, vocab: Vocabulary, grid: SearchGrid, seed: int
) -> TrainConfig:
    """Pick the config with the best accuracy on the last 10% of train_set.

    Combinations are visited in nested order (learning rate outermost,
    hidden size innermost); ties keep the earliest combination.
    """
    if len(grid) == 0:
        raise EmptyInputError("grid must contain at least one combination")
    combos = [
        TrainConfig(lr, bs, ep, hd, seed)
        for lr in grid.learning_rates
        for bs in grid.batch_sizes
        for ep in grid.epoch_counts
        for hd in grid.hidden_dims
    ]
    if len(combos) == 1:
        return combos[0]

    docs = train_set.documents
    n_fit = math.floor(0.9 * len(docs))
    if n_fit < 1 or n_fit == len(docs):
        raise EmptyInputError("training set too small to hold out validation data")
    fit_set = LabeledDataset(docs[:n_fit], train_set.categories, "train")
    val_set = LabeledDataset(docs[n_fit:], train_set.categories, "train")

    best_config = None
    best_accuracy = -1.0
    for config in combos:
        model, _ = train(fit_set, vocab, config)
        accuracy = evaluate(model, val_set, vocab).accuracy
        if accuracy > best_accuracy:
            best_config = config
            best_accuracy = accuracy
    return best_config


def evaluate(model: MlpModel, dataset: LabeledDataset, vocab: Vocabulary) -> Metrics:
    """Accuracy plus macro precision/recall/F1; 0/0 ratios count as 0."""
    docs = dataset.documents
    if not docs:
        raise EmptyInputError("cannot evaluate on an empty dataset")
    X = vectorize_dataset(docs, vocab, "tf")
    labels = np.array([doc.label for doc in docs])
    predictions = np.argmax(forward_batch(model, X), axis=1)

    c = model.num_classes
    confusion = np.zeros((c, c), dtype=np.int64)
    np.add.at(confusion, (labels, predictions), 1)

    diag = np.diag(confusion).astype(np.float64)
    predicted = confusion.sum(axis=0).astype(np.float64)
    actual = confusion.sum(axis=1).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(predicted > 0, diag / predicted, 0.0)
        recall = np.where(actual > 0, diag / actual, 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2.0 * precision * recall / denom, 0.0)

    return Metrics(
        accuracy=float(np.trace(confusion) / confusion.sum()),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        confusion=confusion,
    )


def save_model(model: MlpModel, path, train_config: TrainConfig | None = None) -> None:
    """Self-describing text format; floats use shortest round-trip repr."""
    echo = "none"
    if train_config is not None:
        echo = (
            f"lr={train_config.learning_rate!r} batch={train_config.batch_size}"
            f" epochs={train_config.epochs} hidden={train_config.hidden_dim}"
            f" seed={train_config.seed}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("limelight-mlp v1\n")
        fh.write(f"input_dim {model.input_dim}\n")
        fh.write(f"hidden_dim {model.hidden_dim}\n")
        fh.write(f"num_classes {model.num_classes}\n")
        fh.write("categories " + "\t".join(model.categories) + "\n")
        fh.write(f"train_config {echo}\n")
        for name in ("W1", "b1", "W2", "b2"):
            fh.write(f"{name}\n")
            for value in getattr(model, name).ravel():
                fh.write(repr(float(value)) + "\n")


def load_model(path) -> MlpModel:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "limelight-mlp v1":
        raise ValueError(f"not a model file: {path}")
    input_dim = int(lines[1].split()[1])
    hidden_dim = int(lines[2].split()[1])
    num_classes = int(lines[3].split()[1])
    categories = tuple(lines[4].split(" ", 1)[1].split("\t"))
    pos = 6  # header lines incl. train_config echo
    shapes = {
        "W1": (hidden_dim, input_dim),
        "b1": (hidden_dim,),
        "W2": (num_classes, hidden_dim),
        "b2": (num_classes,),
    }
    arrays = {}
    for name, shape in shapes.items():
        if lines[pos] != name:
            raise ValueError(f"malformed model file at line {pos + 1}: expected {name}")
        pos += 1
        count = int(np.prod(shape))
        values = np.array([float(v) for v in lines[pos : pos + count]])
        arrays[name] = values.reshape(shape)
        pos += count
    return MlpModel(categories=categories, **arrays)
