"""Corpus handling: loading, cleaning, vocabulary, splitting, vectorization.

Documents live on disk as one file per message under one directory per
category (the layout of the public 20 Newsgroups distribution). The
pipeline is: strip message metadata, normalize to lowercase letter-only
tokens, drop stopwords and short tokens, stem, then vectorize against a
document-frequency-pruned vocabulary.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    CorpusNotFoundError,
    DatasetTooSmallError,
    EmptyCategoryError,
    EmptyInputError,
)
from .rng import SplitMix64
from .stemmer import stem


def _load_stopwords() -> frozenset[str]:
    text = resources.files("limelight").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


STOPWORDS = _load_stopwords()

_HEADER_LINE = re.compile(r"^[A-Za-z][A-Za-z0-9_.-]*:")
_NON_LETTER = re.compile(r"[^a-z]+")


@dataclass(frozen=True)
class PreprocessConfig:
    """Knobs of the text pipeline; all overridable from the config file/CLI."""

    min_token_len: int = 2
    min_df: int = 5
    max_df_frac: float = 0.5
    min_tokens: int = 10
    max_tokens: int | None = 5000


@dataclass(frozen=True)
class RawDocument:
    id: int
    category: str
    text: str


@dataclass(frozen=True)
class CleanDocument:
    tokens: tuple[str, ...]
    source_id: tuple[str, int]
    label: int


@dataclass(frozen=True)
class Vocabulary:
    words: tuple[str, ...]
    doc_freq: tuple[int, ...]
    word_to_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "word_to_index", {w: i for i, w in enumerate(self.words)}
        )

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    mode: str

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class LabeledDataset:
    documents: tuple[CleanDocument, ...]
    categories: tuple[str, ...]
    split_tag: str


def load_corpus(root_dir, categories) -> list[RawDocument]:
    """Read every document of the requested categories.

    Order is deterministic: categories as given, then filename ascending.
    Files that are not valid UTF-8 are decoded with replacement characters.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise CorpusNotFoundError(f"corpus directory not found: {root}")
    docs: list[RawDocument] = []
    for category in categories:
        cat_dir = root / category
        if not cat_dir.is_dir():
            raise CorpusNotFoundError(f"category directory not found: {cat_dir}")
        files = sorted((p for p in cat_dir.iterdir() if p.is_file()), key=lambda p: p.name)
        if not files:
            raise EmptyCategoryError(f"category directory is empty: {cat_dir}")
        for index, path in enumerate(files):
            text = path.read_bytes().decode("utf-8", errors="replace")
            docs.append(RawDocument(id=index, category=category, text=text))
    return docs


def strip_metadata(raw_text: str) -> str:
    """Drop the leading header block, quoted lines, and the trailing signature.

    The header block is removed only when every line before the first blank
    line looks like a "Name: value" header (continuation lines indented with
    whitespace are allowed). Quoted lines start with ">" or end with
    "writes:" after trimming. The signature is a bare "--" line and
    everything after it.
    """
    lines = raw_text.splitlines(keepends=True)

    first_blank = None
    for i, line in enumerate(lines):
        if line.strip() == "":
            first_blank = i
            break
    if first_blank is not None and first_blank > 0:
        head = lines[:first_blank]
        def header_shaped(idx: int, line: str) -> bool:
            if _HEADER_LINE.match(line):
                return True
            return idx > 0 and line[:1] in (" ", "\t")
        if all(header_shaped(i, line) for i, line in enumerate(head)):
            lines = lines[first_blank + 1 :]

    kept = []
    for line in lines:
        trimmed = line.strip()
        if trimmed.startswith(">") or trimmed.endswith("writes:"):
            continue
        kept.append(line)

    body = []
    for line in kept:
        if line.strip() == "--":
            break
        body.append(line)
    return "".join(body)


def preprocess(text: str, config: PreprocessConfig = PreprocessConfig()) -> list[str]:
    """Normalize text to stemmed tokens.

    Lowercase, map every non-letter to a space, split, drop stopwords and
    tokens shorter than ``min_token_len``, then stem what remains.
    """
    spaced = _NON_LETTER.sub(" ", text.lower())
    out = []
    for token in spaced.split():
        if token in STOPWORDS or len(token) < config.min_token_len:
            continue
        out.append(stem(token))
    return out


def build_vocabulary(docs, min_df: int = 5, max_df_frac: float = 0.5) -> Vocabulary:
    """Collect words with min_df <= doc_freq <= max_df_frac * len(docs)."""
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")
    if not 0 < max_df_frac <= 1:
        raise ValueError(f"max_df_frac must be in (0, 1], got {max_df_frac}")
    docs = list(docs)
    if not docs:
        raise EmptyInputError("cannot build a vocabulary from zero documents")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc.tokens))
    ceiling = max_df_frac * len(docs)
    words = sorted(w for w, count in df.items() if min_df <= count <= ceiling)
    return Vocabulary(words=tuple(words), doc_freq=tuple(df[w] for w in words))


def filter_by_length(docs, min_tokens: int, max_tokens: int | None):
    """Keep documents whose token count lies in [min_tokens, max_tokens].

    ``max_tokens=None`` means unbounded above. Order is preserved.
    """
    if min_tokens < 0:
        raise ValueError("min_tokens must be >= 0")
    if max_tokens is not None and max_tokens < min_tokens:
        raise ValueError("max_tokens must be >= min_tokens")
    return [
        doc
        for doc in docs
        if len(doc.tokens) >= min_tokens
        and (max_tokens is None or len(doc.tokens) <= max_tokens)
    ]


def split_dataset(
    dataset: LabeledDataset, train_frac: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Shuffle with the seeded PRNG, then cut at floor(train_frac * N)."""
    if not 0 < train_frac < 1:
        raise ValueError(f"train_frac must be in (0, 1), got {train_frac}")
    docs = list(dataset.documents)
    if len(docs) < 2:
        raise DatasetTooSmallError("need at least 2 documents to split")
    SplitMix64(seed).shuffle(docs)
    n_train = math.floor(train_frac * len(docs))
    train = LabeledDataset(tuple(docs[:n_train]), dataset.categories, "train")
    test = LabeledDataset(tuple(docs[n_train:]), dataset.categories, "test")
    return train, test


def vectorize(tokens, vocab: Vocabulary, mode: str = "counts") -> FeatureVector:
    """Bag-of-words vector over the vocabulary.

    counts mode: per-word occurrence counts. tf mode: counts divided by the
    total number of in-vocabulary tokens (all-zero when that total is zero).
    Out-of-vocabulary tokens are ignored.
    """
    if mode not in ("counts", "tf"):
        raise ValueError(f"unknown vectorization mode: {mode!r}")
    if len(vocab) == 0:
        raise EmptyInputError("vocabulary is empty")
    values = np.zeros(len(vocab))
    total = 0
    for token in tokens:
        index = vocab.word_to_index.get(token)
        if index is not None:
            values[index] += 1.0
            total += 1
    if mode == "tf" and total > 0:
        values /= float(total)
    return FeatureVector(values=values, mode=mode)


def vectorize_dataset(docs, vocab: Vocabulary, mode: str = "counts") -> np.ndarray:
    """Stack vectorize() over documents into an (N, |vocab|) matrix."""
    docs = list(docs)
    matrix = np.zeros((len(docs), len(vocab)))
    for i, doc in enumerate(docs):
        matrix[i] = vectorize(doc.tokens, vocab, mode).values
    return matrix


def save_vocabulary(vocab: Vocabulary, path) -> None:
    """Write "word<TAB>doc_freq" lines in lexicographic word order."""
    with open(path, "w", encoding="utf-8") as fh:
        for word, count in zip(vocab.words, vocab.doc_freq):
            fh.write(f"{word}\t{count}\n")


def load_vocabulary(path) -> Vocabulary:
    words = []
    freqs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            word, _, count = line.partition("\t")
            words.append(word)
            freqs.append(int(count))
    return Vocabulary(words=tuple(words), doc_freq=tuple(freqs))
