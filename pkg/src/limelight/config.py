"""Application configuration: defaults, flat key=value files, CLI overrides.

Precedence is defaults < config file < command-line flags. The resolved
AppConfig is fully concrete before any subcommand runs.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class AppConfig:
    corpus_root: str = "corpus"
    categories: tuple[str, ...] = ("alt.atheism", "soc.religion.christian")
    output_dir: str = "out"
    seed: int = 42
    # preprocessing
    min_token_len: int = 2
    min_df: int = 5
    max_df_frac: float = 0.5
    min_tokens: int = 10
    max_tokens: int = 5000  # 0 means unbounded
    # training
    train_frac: float = 0.8
    learning_rate: float = 0.1
    batch_size: int = 32
    epochs: int = 20
    hidden_dim: int = 64
    use_grid: bool = False
    grid_learning_rates: tuple[float, ...] = (0.5, 0.1, 0.05)
    grid_batch_sizes: tuple[int, ...] = (16, 32)
    grid_epochs: tuple[int, ...] = (20,)
    grid_hidden_dims: tuple[int, ...] = (64,)
    # explanation
    num_samples: int = 1000
    kernel_width: float = 0.25
    alpha: float = 1.0
    num_features: int = 6


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_str_list(text: str) -> tuple[str, ...]:
    items = tuple(part.strip() for part in text.split(",") if part.strip())
    if not items:
        raise ConfigError(f"empty list: {text!r}")
    return items


def parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in parse_str_list(text))


def parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in parse_str_list(text))


_CONVERTERS = {
    "corpus_root": str,
    "categories": parse_str_list,
    "output_dir": str,
    "seed": int,
    "min_token_len": int,
    "min_df": int,
    "max_df_frac": float,
    "min_tokens": int,
    "max_tokens": int,
    "train_frac": float,
    "learning_rate": float,
    "batch_size": int,
    "epochs": int,
    "hidden_dim": int,
    "use_grid": parse_bool,
    "grid_learning_rates": parse_float_list,
    "grid_batch_sizes": parse_int_list,
    "grid_epochs": parse_int_list,
    "grid_hidden_dims": parse_int_list,
    "num_samples": int,
    "kernel_width": float,
    "alpha": float,
    "num_features": int,
}


def parse_config_file(path) -> dict:
    """Read "key = value" lines; blank lines and #-comments are skipped."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw_lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key = key.strip()
        value = value.strip()
        if key not in _CONVERTERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONVERTERS[key](value)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def resolve_config(file_values: dict | None = None, cli_values: dict | None = None) -> AppConfig:
    """Merge defaults, file values, and CLI overrides into a concrete config."""
    merged = {}
    for field_def in dataclasses.fields(AppConfig):
        name = field_def.name
        if cli_values is not None and cli_values.get(name) is not None:
            merged[name] = cli_values[name]
        elif file_values is not None and name in file_values:
            merged[name] = file_values[name]
    try:
        return AppConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
