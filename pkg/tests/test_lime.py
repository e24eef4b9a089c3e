"""Explainer tests: sampling, kernel, surrogate oracle, planted signals."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from limelight.corpus import CleanDocument, Vocabulary
from limelight.errors import EmptyInstanceError, SingularFitError
from limelight.lime import (
    ExplainConfig,
    cosine_distance_to_origin_mask,
    explain,
    fit_weighted_ridge,
    heuristic_num_features,
    kernel_weight,
    make_instance,
    predict_perturbations,
    reconstruct_text,
    sample_masks,
    select_features,
)
from limelight.mlp import MlpModel, forward


def doc(tokens, label=0):
    return CleanDocument(tokens=tuple(tokens), source_id=("t", 0), label=label)


def vocab_of(*words):
    return Vocabulary(words=tuple(sorted(words)), doc_freq=tuple([1] * len(words)))


def planted_model(vocab, word, strength=2.0, scale=10000.0):
    """Target-class logit = strength * min(1, scale * tf(word)).

    The relu pair saturates whenever the word is present at all, so the
    logit depends only on presence, not on the tf renormalization.
    """
    index = vocab.word_to_index[word]
    W1 = np.zeros((2, len(vocab)))
    W1[0, index] = scale
    W1[1, index] = scale
    b1 = np.array([0.0, -1.0])
    W2 = np.zeros((2, 2))
    W2[1, 0] = strength
    W2[1, 1] = -strength
    return MlpModel(W1=W1, b1=b1, W2=W2, b2=np.zeros(2), categories=("other", "target"))


# --- make_instance -----------------------------------------------------

def test_instance_distinct_first_occurrence_order():
    instance = make_instance(doc(["god", "exist", "god"]), 1)
    assert instance.distinct_words == ("god", "exist")
    assert instance.tokens == ("god", "exist", "god")


def test_instance_single_token():
    assert make_instance(doc(["one"]), 0).distinct_words == ("one",)


def test_instance_empty_document_errors():
    with pytest.raises(EmptyInstanceError):
        make_instance(doc([]), 0)


def test_instance_distinct_count_matches_set_cardinality():
    tokens = ["w%d" % (i % 13) for i in range(40)]
    instance = make_instance(doc(tokens), 0)
    assert len(instance.distinct_words) == len(set(tokens))


# --- sample_masks ------------------------------------------------------

def test_masks_row_zero_all_ones():
    masks = sample_masks(7, 50, seed=3)
    assert masks.shape == (50, 7)
    assert masks[0].tolist() == [1] * 7


def test_masks_degenerate_single_word():
    masks = sample_masks(1, 20, seed=1)
    assert np.all(masks == 1)


def test_masks_every_row_keeps_at_least_one_word():
    masks = sample_masks(5, 2000, seed=9)
    assert masks.sum(axis=1).min() >= 1
    assert set(np.unique(masks)) <= {0, 1}


def test_masks_deterministic():
    assert np.array_equal(sample_masks(6, 100, seed=4), sample_masks(6, 100, seed=4))
    assert not np.array_equal(sample_masks(6, 100, seed=4), sample_masks(6, 100, seed=5))


def test_masks_removal_count_uniform_chi_squared():
    # d=5: rows 1+ remove k in {1..4}; chi^2 against uniform, 3 dof, p=0.001
    masks = sample_masks(5, 10001, seed=123)
    zeros = 5 - masks[1:].sum(axis=1)
    counts = np.bincount(zeros, minlength=5)
    assert counts[0] == 0  # zero removals never happen past row 0
    observed = counts[1:5]
    expected = 10000 / 4.0
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    assert chi2 < 16.266, f"chi2={chi2}, counts={observed.tolist()}"


def test_masks_positions_roughly_uniform():
    masks = sample_masks(5, 10001, seed=7)
    zero_rate = 1.0 - masks[1:].mean(axis=0)
    assert np.allclose(zero_rate, zero_rate.mean(), atol=0.02)


# --- reconstruct_text --------------------------------------------------

def test_reconstruct_identity_and_annihilation():
    instance = make_instance(doc(["a", "b", "a", "c"]), 0)
    assert reconstruct_text(instance, [1, 1, 1]) == ["a", "b", "a", "c"]
    assert reconstruct_text(instance, [0, 0, 0]) == []


def test_reconstruct_removes_all_occurrences():
    instance = make_instance(doc(["a", "b", "a", "c"]), 0)
    assert reconstruct_text(instance, [0, 1, 1]) == ["b", "c"]


# --- distance / kernel -------------------------------------------------

def test_distance_all_ones_zero():
    assert cosine_distance_to_origin_mask([1, 1, 1, 1]) == 0.0


def test_distance_all_zeros_one():
    assert cosine_distance_to_origin_mask([0, 0, 0]) == 1.0


def test_distance_closed_form_quarter():
    assert cosine_distance_to_origin_mask([1, 0, 0, 0]) == 0.5


def test_kernel_at_zero_distance():
    for width in (0.1, 0.25, 1.0, 10.0):
        assert kernel_weight(0.0, width) == 1.0


def test_kernel_hand_value():
    assert abs(kernel_weight(0.5, 0.25) - 0.01831563888873418) < 1e-15


@given(
    st.floats(0.0, 1.0), st.floats(0.0, 1.0),
    st.floats(min_value=0.01, max_value=10.0),
)
def test_kernel_monotone_decreasing(d1, d2, width):
    # strict decrease, tested above float64 saturation granularity
    lo, hi = sorted((d1, d2))
    if lo + 1e-6 < hi:
        assert kernel_weight(lo, width) > kernel_weight(hi, width)
    else:
        assert kernel_weight(lo, width) >= kernel_weight(hi, width)


def test_kernel_rejects_bad_args():
    with pytest.raises(ValueError):
        kernel_weight(0.5, 0.0)
    with pytest.raises(ValueError):
        kernel_weight(-0.1, 1.0)


# --- predict_perturbations ---------------------------------------------

def test_predict_rows_sum_to_one_and_row0_matches_forward():
    vocab = vocab_of("god", "say", "one", "two")
    model = planted_model(vocab, "god")
    instance = make_instance(doc(["god", "say", "one"]), 1)
    masks = sample_masks(3, 50, seed=2)
    probs = predict_perturbations(model, vocab, instance, masks)
    assert probs.shape == (50, 2)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    from limelight.corpus import vectorize

    direct = forward(model, vectorize(instance.tokens, vocab, "tf"))
    assert np.allclose(probs[0], direct, atol=1e-12)


def test_predict_out_of_vocab_word_mask_matches_row0():
    vocab = vocab_of("god", "say")  # "newword" is out of vocabulary
    model = planted_model(vocab, "god")
    instance = make_instance(doc(["god", "say", "newword"]), 1)
    masks = np.array([[1, 1, 1], [1, 1, 0]])  # second row removes only OOV word
    probs = predict_perturbations(model, vocab, instance, masks)
    assert np.array_equal(probs[1], probs[0])


# --- fit_weighted_ridge ------------------------------------------------

def ridge_oracle(Z, y, weights, alpha):
    """Independent solver: sqrt-weighted least squares with ridge rows, via SVD."""
    Z = np.asarray(Z, float)
    y = np.asarray(y, float)
    w = np.asarray(weights, float)
    n, d = Z.shape
    A = np.hstack([Z, np.ones((n, 1))])
    sw = np.sqrt(w)
    top = A * sw[:, None]
    ridge_rows = np.zeros((d, d + 1))
    ridge_rows[:, :d] = math.sqrt(alpha) * np.eye(d)
    M = np.vstack([top, ridge_rows])
    rhs = np.concatenate([sw * y, np.zeros(d)])
    theta, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return theta


def test_ridge_constant_target():
    Z = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    fit = fit_weighted_ridge(Z, [3.5, 3.5, 3.5], [1.0, 2.0, 1.0], alpha=0.7)
    assert np.allclose(fit.coefficients, 0.0, atol=1e-12)
    assert abs(fit.intercept - 3.5) < 1e-12
    assert fit.weighted_r2 == 1.0  # SS_tot == 0 convention


def test_ridge_two_point_interpolation():
    fit = fit_weighted_ridge(np.array([[1.0], [0.0]]), [1.0, 0.0], [1.0, 1.0], alpha=0.0)
    assert abs(fit.coefficients[0] - 1.0) < 1e-12
    assert abs(fit.intercept) < 1e-12
    assert abs(fit.weighted_r2 - 1.0) < 1e-9


def test_ridge_matches_oracle_on_random_problems():
    rng = np.random.default_rng(42)
    for trial in range(20):
        n = int(rng.integers(10, 201))
        d = int(rng.integers(1, 21))
        Z = rng.integers(0, 2, size=(n, d)).astype(float)
        Z[0] = 1.0
        y = rng.normal(size=n)
        w = rng.uniform(0.05, 1.0, size=n)
        alpha = float(rng.choice([0.1, 1.0, 10.0]))
        fit = fit_weighted_ridge(Z, y, w, alpha)
        expected = ridge_oracle(Z, y, w, alpha)
        got = np.concatenate([fit.coefficients, [fit.intercept]])
        rel = np.linalg.norm(got - expected) / max(np.linalg.norm(expected), 1e-12)
        assert rel < 1e-8, f"trial {trial}: rel={rel}"


def test_ridge_r2_decomposition_weighted():
    rng = np.random.default_rng(5)
    Z = rng.integers(0, 2, size=(40, 4)).astype(float)
    y = rng.normal(size=40)
    w = rng.uniform(0.1, 1.0, size=40)
    fit = fit_weighted_ridge(Z, y, w, alpha=0.3)
    yhat = Z @ fit.coefficients + fit.intercept
    ss_res = np.sum(w * (y - yhat) ** 2)
    ybar = np.sum(w * y) / np.sum(w)
    ss_tot = np.sum(w * (y - ybar) ** 2)
    assert abs(fit.weighted_r2 - (1 - ss_res / ss_tot)) < 1e-12
    assert fit.weighted_r2 <= 1.0


def test_ridge_alpha_monotone_shrinkage():
    rng = np.random.default_rng(9)
    Z = rng.integers(0, 2, size=(60, 5)).astype(float)
    y = rng.normal(size=60)
    w = rng.uniform(0.2, 1.0, size=60)
    norms = []
    for alpha in (0.0, 0.1, 1.0, 10.0, 100.0):
        fit = fit_weighted_ridge(Z, y, w, alpha)
        norms.append(np.linalg.norm(fit.coefficients))
    assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))


def test_ridge_singular_at_alpha_zero():
    Z = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])  # duplicate columns
    with pytest.raises(SingularFitError):
        fit_weighted_ridge(Z, [1.0, 2.0, 3.0], [1.0, 1.0, 1.0], alpha=0.0)


def test_ridge_rejects_nonpositive_weights():
    with pytest.raises(ValueError):
        fit_weighted_ridge(np.ones((2, 1)), [1.0, 2.0], [1.0, 0.0], alpha=1.0)


# --- select_features ---------------------------------------------------

def test_select_by_magnitude():
    assert select_features([0.3, -0.5, 0.1], 2) == [1, 0]


def test_select_all_when_k_exceeds_d():
    assert select_features([0.3, -0.5, 0.1], 10) == [1, 0, 2]


def test_select_tie_prefers_lower_index():
    assert select_features([0.2, -0.2], 1) == [0]


def test_heuristic_num_features():
    assert heuristic_num_features(4) == 1
    assert heuristic_num_features(23) == 5
    assert heuristic_num_features(200) == 10


# --- explain -----------------------------------------------------------

FOUR_VOCAB = vocab_of("god", "say", "one", "two", "moon")


def sample_doc():
    return doc(["god", "say", "one", "two", "say", "moon"])


def test_explain_structure_and_config_echo():
    model = planted_model(FOUR_VOCAB, "god")
    config = ExplainConfig(num_samples=300, num_features=3, seed=5)
    result = explain(model, FOUR_VOCAB, sample_doc(), config, document_ref=("test", 4))
    assert len(result.features) == 3
    assert result.config == config
    assert result.document_ref == ("test", 4)
    assert result.categories == ("other", "target")
    assert abs(sum(result.class_probs) - 1.0) < 1e-9
    assert result.warnings == ()


def test_explain_feature_count_capped_by_distinct_words():
    model = planted_model(FOUR_VOCAB, "god")
    config = ExplainConfig(num_samples=200, num_features=50, seed=5)
    result = explain(model, FOUR_VOCAB, sample_doc(), config)
    assert len(result.features) == 5  # five distinct words in the document


def test_explain_two_class_probs_shape():
    model = planted_model(FOUR_VOCAB, "god")
    result = explain(model, FOUR_VOCAB, sample_doc(), ExplainConfig(num_samples=200, seed=1))
    assert len(result.class_probs) == 2
    assert all(0.0 < p < 1.0 for p in result.class_probs)


def test_explain_planted_signal_top_feature_positive():
    model = planted_model(FOUR_VOCAB, "god")
    for seed in range(10):
        config = ExplainConfig(num_samples=1000, num_features=3, seed=seed)
        result = explain(
            model, FOUR_VOCAB, sample_doc(), config, document_ref=("test", 0)
        )
        top_word, top_weight = result.features[0]
        assert top_word == "god", f"seed {seed}: features={result.features}"
        assert top_weight > 0.0
        assert result.explained_class == "target"


def test_explain_deterministic():
    model = planted_model(FOUR_VOCAB, "god")
    config = ExplainConfig(num_samples=400, seed=7)
    a = explain(model, FOUR_VOCAB, sample_doc(), config)
    b = explain(model, FOUR_VOCAB, sample_doc(), config)
    assert a == b


def test_explain_respects_class_to_explain():
    model = planted_model(FOUR_VOCAB, "god")
    config = ExplainConfig(num_samples=300, seed=3, class_to_explain="other")
    result = explain(model, FOUR_VOCAB, sample_doc(), config)
    assert result.explained_class == "other"
    # toward "other", presence of the planted word pushes probability down
    weights = dict(result.features)
    assert weights["god"] < 0


def test_explain_unknown_class_errors():
    model = planted_model(FOUR_VOCAB, "god")
    with pytest.raises(ValueError):
        explain(
            model, FOUR_VOCAB, sample_doc(),
            ExplainConfig(num_samples=100, seed=1, class_to_explain="nope"),
        )


def test_explain_empty_document_errors():
    model = planted_model(FOUR_VOCAB, "god")
    with pytest.raises(EmptyInstanceError):
        explain(model, FOUR_VOCAB, doc([]), ExplainConfig(num_samples=100, seed=1))


def test_explain_records_warning_when_undersampled():
    model = planted_model(FOUR_VOCAB, "god")
    config = ExplainConfig(num_samples=4, seed=2)  # d + 2 = 7 > 4
    result = explain(model, FOUR_VOCAB, sample_doc(), config)
    assert len(result.warnings) == 1
    assert "num_samples" in result.warnings[0]


def test_explain_features_sorted_by_magnitude():
    model = planted_model(FOUR_VOCAB, "god")
    config = ExplainConfig(num_samples=500, num_features=5, seed=11)
    result = explain(model, FOUR_VOCAB, sample_doc(), config)
    magnitudes = [abs(w) for _, w in result.features]
    assert magnitudes == sorted(magnitudes, reverse=True)
