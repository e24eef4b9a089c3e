"""Text classification with local per-word explanations.

Pipeline: load a newsgroup-style corpus, train a small softmax MLP on
bag-of-words features, then explain single predictions by fitting a
kernel-weighted ridge surrogate to the model's behaviour on word-masked
variants of a document.
"""

from .config import AppConfig, parse_config_file, resolve_config
from .corpus import (
    CleanDocument,
    FeatureVector,
    LabeledDataset,
    PreprocessConfig,
    RawDocument,
    Vocabulary,
    build_vocabulary,
    filter_by_length,
    load_corpus,
    load_vocabulary,
    preprocess,
    save_vocabulary,
    split_dataset,
    strip_metadata,
    vectorize,
    vectorize_dataset,
)
from .lime import (
    ExplainConfig,
    Explanation,
    Instance,
    PerturbationBatch,
    SurrogateFit,
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
from .mlp import (
    Metrics,
    MlpModel,
    SearchGrid,
    TrainConfig,
    evaluate,
    forward,
    forward_batch,
    gradient,
    grid_search,
    init_model,
    load_model,
    save_model,
    train,
)
from .report import parse_json, to_html, to_json, to_text
from .rng import SplitMix64
from .stemmer import stem

__version__ = "0.1.0"
