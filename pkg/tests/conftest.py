"""Shared fixtures: synthetic corpora and session-scoped trained artifacts."""

from __future__ import annotations

import re
from pathlib import Path

import pytest

from limelight import cli
from limelight.corpus import load_vocabulary
from limelight.mlp import load_model
from limelight.rng import SplitMix64

SPACE_WORDS = [
    "orbit", "rocket", "launch", "mars", "moon", "engine", "fuel", "comet",
    "galaxy", "telescope", "shuttle", "astronaut", "mission", "gravity",
    "lunar", "solar", "probe", "satellite", "cosmic", "stars",
]
RELIGION_WORDS = [
    "god", "church", "faith", "bible", "pray", "christ", "soul", "spirit",
    "gospel", "holy", "priest", "scripture", "heaven", "belief", "worship",
    "sacred", "prophet", "grace", "temple", "eternal",
]
FILLER_WORDS = [
    "people", "time", "world", "question", "answer", "point", "think",
    "write", "read", "know", "good", "make", "year", "day", "thing",
    "idea", "place", "work", "word", "fact",
]

MINI_CATEGORIES = ("sci.space", "talk.religion.misc")


def _pick(rng: SplitMix64, pool: list[str]) -> str:
    return pool[rng.randbelow(len(pool))]


def write_mini_corpus(root: Path, docs_per_category: int = 100, seed: int = 7) -> None:
    """Two learnable categories with header/quote/signature noise."""
    rng = SplitMix64(seed)
    pools = {MINI_CATEGORIES[0]: SPACE_WORDS, MINI_CATEGORIES[1]: RELIGION_WORDS}
    for category, pool in pools.items():
        other = RELIGION_WORDS if pool is SPACE_WORDS else SPACE_WORDS
        cat_dir = root / category
        cat_dir.mkdir(parents=True, exist_ok=True)
        for i in range(docs_per_category):
            words = []
            for _ in range(14 + rng.randbelow(12)):
                source = pool if rng.uniform() >= 0.1 else other
                words.append(_pick(rng, source))
            for _ in range(8 + rng.randbelow(8)):
                words.append(_pick(rng, FILLER_WORDS))
            rng.shuffle(words)
            half = len(words) // 2
            lines = [
                f"From: user{i}@example.com",
                f"Subject: note {i}",
                "",
                " ".join(words[:half]),
            ]
            if rng.uniform() < 0.3:
                lines.append("somebody writes:")
                lines.append("> earlier remarks that should vanish")
            lines.append(" ".join(words[half:]))
            lines.append("--")
            lines.append("a signature line")
            (cat_dir / f"{10000 + i}").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_bulk_corpus(root: Path, docs_per_category: int = 10000, seed: int = 11) -> None:
    """20,000 tiny documents for split-arithmetic checks."""
    rng = SplitMix64(seed)
    pools = {MINI_CATEGORIES[0]: SPACE_WORDS[:12], MINI_CATEGORIES[1]: RELIGION_WORDS[:12]}
    for category, pool in pools.items():
        cat_dir = root / category
        cat_dir.mkdir(parents=True, exist_ok=True)
        for i in range(docs_per_category):
            words = [_pick(rng, pool) for _ in range(14)]
            text = f"From: bulk{i}@example.com\n\n{' '.join(words)}\n"
            (cat_dir / str(i)).write_text(text, encoding="utf-8")


@pytest.fixture(scope="session")
def mini_corpus_dir(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("mini_corpus")
    write_mini_corpus(root)
    return root


@pytest.fixture(scope="session")
def trained_mini(mini_corpus_dir, tmp_path_factory):
    """Grid-searched model over the mini corpus, trained once via the CLI."""
    out_dir = tmp_path_factory.mktemp("mini_out")
    argv = [
        "train",
        "--corpus-root", str(mini_corpus_dir),
        "--categories", ",".join(MINI_CATEGORIES),
        "--output-dir", str(out_dir),
        "--seed", "42",
        "--grid",
        "--grid-lr", "0.5,0.1",
        "--grid-batch", "16",
        "--grid-epochs", "15",
        "--grid-hidden", "24",
    ]
    code = cli.main(argv)
    assert code == 0
    model_path = out_dir / "model.txt"
    vocab_path = out_dir / "vocabulary.tsv"
    return {
        "corpus_root": mini_corpus_dir,
        "output_dir": out_dir,
        "model_path": model_path,
        "vocab_path": vocab_path,
        "metrics_path": out_dir / "metrics.json",
        "model": load_model(model_path),
        "vocab": load_vocabulary(vocab_path),
        "common_flags": [
            "--corpus-root", str(mini_corpus_dir),
            "--categories", ",".join(MINI_CATEGORIES),
            "--output-dir", str(out_dir),
            "--seed", "42",
        ],
    }


def split_sizes_from_stdout(stdout: str) -> tuple[int, int]:
    match = re.search(r"Split: train=(\d+) test=(\d+)", stdout)
    assert match is not None, f"no split line in output:\n{stdout}"
    return int(match.group(1)), int(match.group(2))
