"""Number-aware tokenization and the normalized text form used across the toolkit.

Normalized text is the single-space-joined token sequence: punctuation stands
alone, numerals (including decimals and comma-grouped integers) stay whole,
words keep internal apostrophes and hyphens. Normalization is idempotent and
detokenization (" ".join) is lossless on normalized input.
"""

from __future__ import annotations

import re
from fractions import Fraction

NUMBER_PATTERN = r"\d+(?:,\d{3})+(?:\.\d+)?|\d+\.\d+|\.\d+|\d+"
_NUMBER_RE = re.compile(rf"^(?:{NUMBER_PATTERN})$")
_TOKEN_RE = re.compile(
    rf"(?:{NUMBER_PATTERN})"
    r"|[A-Za-z]+(?:['’-][A-Za-z]+)*"
    r"|['’][A-Za-z]+"  # detached clitics: 's 'll 've
    r"|\S"
)

SENTENCE_TERMINATORS = {".", "?", "!"}


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def normalize(text: str) -> str:
    return " ".join(tokenize(text))


def is_number_token(token: str) -> bool:
    return bool(_NUMBER_RE.match(token))


def number_value(token: str) -> Fraction:
    return Fraction(token.replace(",", ""))


def split_sentences(tokens: list[str]) -> list[list[str]]:
    """Group tokens into sentences, breaking after . ? or !"""
    sentences: list[list[str]] = []
    current: list[str] = []
    for tok in tokens:
        current.append(tok)
        if tok in SENTENCE_TERMINATORS:
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


def sentence_strings(text: str) -> list[str]:
    return [" ".join(s) for s in split_sentences(tokenize(text))]
