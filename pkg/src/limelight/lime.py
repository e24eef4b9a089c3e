"""Local explanations for single documents.

A document is represented by the presence/absence of its distinct words.
Neighbors are sampled by deleting random word subsets, weighted by an
exponential kernel over cosine distance from the intact document, and a
weighted ridge model is fitted to the classifier's probabilities on those
neighbors. Its largest coefficients, refitted on the surviving columns,
are the per-word attribution weights.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .corpus import CleanDocument, Vocabulary, vectorize
from .errors import EmptyInstanceError, InvalidDimensionError, SingularFitError
from .mlp import MlpModel, forward_batch
from .rng import SplitMix64


@dataclass(frozen=True)
class Instance:
    distinct_words: tuple[str, ...]
    tokens: tuple[str, ...]
    label_of_interest: int


@dataclass(frozen=True)
class PerturbationBatch:
    masks: np.ndarray
    texts: tuple[tuple[str, ...], ...]
    kernel_weights: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        if not np.all(self.masks[0] == 1):
            raise ValueError("mask row 0 must be the intact document")
        if self.kernel_weights[0] != 1.0:
            raise ValueError("the intact document must carry kernel weight 1")
        if np.any(self.kernel_weights <= 0.0) or np.any(self.kernel_weights > 1.0):
            raise ValueError("kernel weights must lie in (0, 1]")
        if not len(self.masks) == len(self.texts) == len(self.kernel_weights) == len(self.probs):
            raise ValueError("batch fields must have equal row counts")
        self.masks.setflags(write=False)
        self.kernel_weights.setflags(write=False)
        self.probs.setflags(write=False)


@dataclass(frozen=True)
class SurrogateFit:
    coefficients: np.ndarray
    intercept: float
    weighted_r2: float
    alpha: float

    def __post_init__(self):
        self.coefficients.setflags(write=False)


@dataclass(frozen=True)
class ExplainConfig:
    num_samples: int = 1000
    kernel_width: float = 0.25
    alpha: float = 1.0
    num_features: int = 6
    seed: int = 0
    class_to_explain: str | None = None

    def __post_init__(self):
        if self.num_samples < 1 or self.num_features < 1:
            raise ValueError("num_samples and num_features must be positive")
        if self.kernel_width <= 0:
            raise ValueError("kernel_width must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")


@dataclass(frozen=True)
class Explanation:
    document_ref: tuple[str, int]
    categories: tuple[str, ...]
    class_probs: tuple[float, ...]
    explained_class: str
    intercept: float
    weighted_r2: float
    features: tuple[tuple[str, float], ...]
    config: ExplainConfig
    warnings: tuple[str, ...] = ()


def _unique_in_order(tokens) -> tuple[str, ...]:
    return tuple(dict.fromkeys(tokens))


def make_instance(document: CleanDocument, class_index: int) -> Instance:
    """Interpretable view of a document: its distinct words, in first-occurrence order."""
    if not document.tokens:
        raise EmptyInstanceError("document has no tokens after preprocessing")
    return Instance(
        distinct_words=_unique_in_order(document.tokens),
        tokens=tuple(document.tokens),
        label_of_interest=class_index,
    )


def sample_masks(d: int, n: int, seed: int) -> np.ndarray:
    """n x d binary matrix of word-presence masks.

    Row 0 keeps every word. Each later row removes k words, with k drawn
    uniformly from {1, ..., d-1} and the positions drawn uniformly without
    replacement. With d = 1 nothing can be removed, so every row keeps the
    single word.
    """
    if d < 1 or n < 1:
        raise ValueError("d and n must be >= 1")
    masks = np.ones((n, d), dtype=np.int64)
    if d == 1:
        return masks
    rng = SplitMix64(seed)
    positions = list(range(d))
    for row in range(1, n):
        k = 1 + rng.randbelow(d - 1)
        rng.shuffle(positions)
        masks[row, positions[:k]] = 0
    return masks


def reconstruct_text(instance: Instance, mask) -> list[str]:
    """Token list with every occurrence of each masked-off word deleted."""
    if len(mask) != len(instance.distinct_words):
        raise InvalidDimensionError(
            f"mask length {len(mask)} != {len(instance.distinct_words)} distinct words"
        )
    removed = {w for w, keep in zip(instance.distinct_words, mask) if not keep}
    return [t for t in instance.tokens if t not in removed]


def cosine_distance_to_origin_mask(mask) -> float:
    """Cosine distance between a binary mask and the all-ones mask: 1 - sqrt(k/d).

    The all-zero mask has no direction; its distance is 1 by convention.
    """
    mask = np.asarray(mask)
    k = float(mask.sum())
    if k == 0.0:
        return 1.0
    return 1.0 - math.sqrt(k / mask.shape[0])


def kernel_weight(distance: float, width: float) -> float:
    """Exponential proximity kernel exp(-distance^2 / width^2)."""
    if width <= 0:
        raise ValueError("kernel width must be positive")
    if distance < 0:
        raise ValueError("distance must be non-negative")
    return math.exp(-(distance * distance) / (width * width))


def _predict_token_lists(model: MlpModel, vocab: Vocabulary, token_lists) -> np.ndarray:
    if model.input_dim != len(vocab):
        raise InvalidDimensionError(
            f"model input_dim {model.input_dim} != vocabulary size {len(vocab)}"
        )
    X = np.zeros((len(token_lists), len(vocab)))
    for i, tokens in enumerate(token_lists):
        X[i] = vectorize(tokens, vocab, "tf").values
    return forward_batch(model, X)


def predict_perturbations(
    model: MlpModel, vocab: Vocabulary, instance: Instance, masks
) -> np.ndarray:
    """Class-probability matrix for the reconstructed text of every mask row."""
    texts = [reconstruct_text(instance, mask) for mask in masks]
    return _predict_token_lists(model, vocab, texts)


def fit_weighted_ridge(Z, y, weights, alpha: float) -> SurrogateFit:
    """Minimize sum_i w_i (y_i - c.z_i - b)^2 + alpha ||c||^2 (b unpenalized).

    Solved through the (d+1)-dimensional normal equations of the
    ones-augmented design matrix with an LU (partial pivoting) solver.
    """
    Z = np.asarray(Z, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    n, d = Z.shape
    if n < 1:
        raise ValueError("need at least one sample")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")

    A = np.hstack([Z, np.ones((n, 1))])
    AtW = A.T * w
    M = AtW @ A
    M[np.arange(d), np.arange(d)] += alpha
    rhs = AtW @ y
    try:
        theta = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularFitError(f"normal equations are singular: {exc}") from exc

    residuals = y - A @ theta
    ss_res = float(np.sum(w * residuals**2))
    y_mean = float(np.sum(w * y) / np.sum(w))
    ss_tot = float(np.sum(w * (y - y_mean) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SurrogateFit(
        coefficients=theta[:d], intercept=float(theta[d]), weighted_r2=r2, alpha=alpha
    )


def select_features(coefficients, num_features: int) -> list[int]:
    """Indices of the largest-magnitude coefficients; ties keep the lower index."""
    if num_features < 1:
        raise ValueError("num_features must be >= 1")
    coefficients = np.asarray(coefficients)
    order = np.argsort(-np.abs(coefficients), kind="stable")
    return [int(i) for i in order[: min(num_features, len(coefficients))]]


def heuristic_num_features(d: int) -> int:
    """Size-based default: one feature per five distinct words, capped at 10."""
    return min(10, math.ceil(d / 5))


def explain(
    model: MlpModel,
    vocab: Vocabulary,
    document: CleanDocument,
    config: ExplainConfig = ExplainConfig(),
    document_ref: tuple[str, int] = ("all", 0),
) -> Explanation:
    """Full pipeline: sample, predict, weight, fit, select, refit, package."""
    if not document.tokens:
        raise EmptyInstanceError("document has no tokens after preprocessing")
    categories = model.categories
    if config.class_to_explain is not None and config.class_to_explain not in categories:
        raise ValueError(f"unknown class: {config.class_to_explain!r}")

    instance = make_instance(document, 0)
    d = len(instance.distinct_words)
    masks = sample_masks(d, config.num_samples, config.seed)
    texts = [reconstruct_text(instance, mask) for mask in masks]
    probs = _predict_token_lists(model, vocab, texts)

    class_probs = tuple(float(p) for p in probs[0])
    if config.class_to_explain is not None:
        class_index = categories.index(config.class_to_explain)
    else:
        class_index = int(np.argmax(probs[0]))
    if instance.label_of_interest != class_index:
        instance = dataclasses.replace(instance, label_of_interest=class_index)

    distances = np.array([cosine_distance_to_origin_mask(mask) for mask in masks])
    weights = np.array([kernel_weight(dist, config.kernel_width) for dist in distances])
    if np.any(weights == 0.0):
        raise ValueError(
            f"kernel_width={config.kernel_width} is so small that some perturbation"
            " weights underflow to zero; use a larger width"
        )
    batch = PerturbationBatch(
        masks=masks,
        texts=tuple(tuple(t) for t in texts),
        kernel_weights=weights,
        probs=probs[:, class_index].copy(),
    )

    warnings = ()
    if config.num_samples < d + 2:
        warnings = (
            f"num_samples={config.num_samples} is below distinct words + 2 = {d + 2}; "
            "the surrogate fit may be underdetermined",
        )

    full_fit = fit_weighted_ridge(batch.masks, batch.probs, batch.kernel_weights, config.alpha)
    selected = select_features(full_fit.coefficients, config.num_features)
    refit = fit_weighted_ridge(
        batch.masks[:, selected], batch.probs, batch.kernel_weights, config.alpha
    )

    order = sorted(
        range(len(selected)),
        key=lambda j: (-abs(float(refit.coefficients[j])), selected[j]),
    )
    features = tuple(
        (instance.distinct_words[selected[j]], float(refit.coefficients[j])) for j in order
    )

    return Explanation(
        document_ref=document_ref,
        categories=categories,
        class_probs=class_probs,
        explained_class=categories[class_index],
        intercept=refit.intercept,
        weighted_r2=refit.weighted_r2,
        features=features,
        config=config,
        warnings=warnings,
    )
