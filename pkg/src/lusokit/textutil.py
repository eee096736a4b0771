"""Shared text measurement helpers.

A "word" throughout the toolkit is a maximal run of non-whitespace
Unicode characters; every module that counts words goes through these
helpers so counts agree everywhere.
"""

from __future__ import annotations


def words(text: str) -> list[str]:
    return text.split()


def word_count(text: str) -> int:
    return len(text.split())


def char_ngrams(text: str, n: int) -> list[str]:
    if n <= 0:
        raise ValueError(f"n-gram size must be positive, got {n}")
    return [text[i : i + n] for i in range(len(text) - n + 1)]


def normalize_whitespace(text: str) -> str:
    """Collapse any whitespace runs to single spaces and trim the ends."""
    return " ".join(text.split())
