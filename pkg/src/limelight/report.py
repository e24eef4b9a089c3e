"""Render an Explanation as plain text, canonical JSON, or standalone HTML.

All three renderers are pure functions: the same explanation always
produces the same bytes. Displayed numbers are rounded half-away-from-zero
to a fixed number of places; JSON keeps full precision via shortest
round-trip float formatting.
"""

from __future__ import annotations

import html
import json
from decimal import ROUND_HALF_UP, Decimal

from . import palette
from .lime import ExplainConfig, Explanation


def fmt_decimal(value: float, places: int = 4) -> str:
    """Fixed-point string, ties rounded away from zero; never renders -0."""
    quantum = Decimal(1).scaleb(-places)
    rounded = Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP)
    if rounded == 0:
        rounded = abs(rounded)
    return f"{rounded:.{places}f}"


def _fmt_signed(value: float, places: int = 4) -> str:
    text = fmt_decimal(value, places)
    return text if text.startswith("-") else "+" + text


def to_text(explanation: Explanation) -> str:
    """Header with class probabilities, then one "<word>  <weight>" line per feature."""
    split, index = explanation.document_ref
    lines = [
        f"Document: {split} #{index}",
        f"Explained class: {explanation.explained_class}",
        "Class probabilities: "
        + " ".join(
            f"{name}={fmt_decimal(p)}"
            for name, p in zip(explanation.categories, explanation.class_probs)
        ),
        f"Intercept: {_fmt_signed(explanation.intercept)}",
        f"Weighted R2: {fmt_decimal(explanation.weighted_r2)}",
        f"Features ({len(explanation.features)}):",
    ]
    for word, weight in explanation.features:
        lines.append(f"{word}  {_fmt_signed(weight)}")
    return "\n".join(lines) + "\n"


def to_json(explanation: Explanation) -> str:
    """Canonical JSON: fixed key order, shortest-round-trip floats, no padding."""
    payload = {
        "document_ref": [explanation.document_ref[0], explanation.document_ref[1]],
        "categories": list(explanation.categories),
        "class_probs": list(explanation.class_probs),
        "explained_class": explanation.explained_class,
        "intercept": explanation.intercept,
        "weighted_r2": explanation.weighted_r2,
        "features": [[word, weight] for word, weight in explanation.features],
        "config": {
            "num_samples": explanation.config.num_samples,
            "kernel_width": explanation.config.kernel_width,
            "alpha": explanation.config.alpha,
            "num_features": explanation.config.num_features,
            "seed": explanation.config.seed,
        },
    }
    return json.dumps(payload, separators=(",", ":"))


def parse_json(text: str) -> Explanation:
    """Inverse of to_json (warnings are not serialized and come back empty)."""
    data = json.loads(text)
    config = ExplainConfig(
        num_samples=data["config"]["num_samples"],
        kernel_width=data["config"]["kernel_width"],
        alpha=data["config"]["alpha"],
        num_features=data["config"]["num_features"],
        seed=data["config"]["seed"],
    )
    return Explanation(
        document_ref=(data["document_ref"][0], data["document_ref"][1]),
        categories=tuple(data["categories"]),
        class_probs=tuple(data["class_probs"]),
        explained_class=data["explained_class"],
        intercept=data["intercept"],
        weighted_r2=data["weighted_r2"],
        features=tuple((word, weight) for word, weight in data["features"]),
        config=config,
    )


def _esc(text: str) -> str:
    return html.escape(str(text), quote=True)


def _bar_row(label: str, value_text: str, width_pct: str, color: str) -> str:
    return (
        '<div class="bar-row"><span class="bar-label">'
        + _esc(label)
        + '</span><span class="bar-track"><span class="bar" style="width:'
        + width_pct
        + "%;background-color:"
        + color
        + '"></span></span><span class="bar-value">'
        + value_text
        + "</span></div>"
    )


_CSS = """body { font-family: sans-serif; margin: 2em auto; max-width: 56em; color: #202124; }
h1 { font-size: 1.4em; } h2 { font-size: 1.1em; margin-top: 1.6em; }
.meta { color: #5f6368; }
.bar-row { margin: 0.25em 0; }
.bar-label { display: inline-block; width: 11em; vertical-align: middle; }
.bar-track { display: inline-block; width: 22em; height: 0.9em; background: #f1f3f4; vertical-align: middle; }
.bar { display: inline-block; height: 100%; vertical-align: top; }
.bar-value { margin-left: 0.6em; font-family: monospace; }
.doc { line-height: 1.9; border: 1px solid #dadce0; border-radius: 4px; padding: 1em; margin-top: 0.5em; }
.hl { padding: 0.1em 0.2em; border-radius: 3px; }"""


def to_html(explanation: Explanation, original_tokens) -> str:
    """Standalone page: probability bars, weight bars, highlighted document."""
    split, index = explanation.document_ref
    title = f"Explanation: {split} #{index}"

    prob_rows = []
    for name, prob in zip(explanation.categories, explanation.class_probs):
        color = (
            palette.POSITIVE_HEX
            if name == explanation.explained_class
            else palette.NEUTRAL_HEX
        )
        prob_rows.append(_bar_row(name, fmt_decimal(prob), fmt_decimal(prob * 100.0, 1), color))

    max_weight = max((abs(w) for _, w in explanation.features), default=0.0)
    weight_rows = []
    weight_by_word = {}
    for word, weight in explanation.features:
        share = abs(weight) / max_weight if max_weight > 0 else 0.0
        color = palette.POSITIVE_HEX if weight >= 0 else palette.NEGATIVE_HEX
        weight_rows.append(_bar_row(word, _fmt_signed(weight), fmt_decimal(share * 100.0, 1), color))
        weight_by_word[word] = (weight, share)

    rendered_tokens = []
    for token in original_tokens:
        if token in weight_by_word:
            weight, share = weight_by_word[token]
            rgb = palette.POSITIVE_RGB if weight >= 0 else palette.NEGATIVE_RGB
            style = (
                f"background-color:rgba({rgb[0]},{rgb[1]},{rgb[2]},{fmt_decimal(share, 3)})"
            )
            rendered_tokens.append(f'<span class="hl" style="{style}">{_esc(token)}</span>')
        else:
            rendered_tokens.append(_esc(token))

    parts = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{_esc(title)}</title>",
        "<style>",
        _CSS,
        "</style>",
        "</head>",
        "<body>",
        f"<h1>{_esc(title)}</h1>",
        '<p class="meta">Explained class: <strong>'
        + _esc(explanation.explained_class)
        + "</strong> &middot; Intercept: "
        + _fmt_signed(explanation.intercept)
        + " &middot; Weighted R&#178;: "
        + fmt_decimal(explanation.weighted_r2)
        + "</p>",
        "<h2>Class probabilities</h2>",
        *prob_rows,
        f"<h2>Feature weights ({len(explanation.features)})</h2>",
        *weight_rows,
        "<h2>Document</h2>",
        '<div class="doc">' + " ".join(rendered_tokens) + "</div>",
        "</body>",
        "</html>",
    ]
    return "\n".join(parts) + "\n"
