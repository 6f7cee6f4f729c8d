"""Shared text normalization for both similarity pipelines.

Tokenization lowercases and splits on whitespace/punctuation boundaries,
dropping tokens without a letter. Filtering removes stopwords, applies the
Porter stemmer, and can optionally restrict tokens to a tagged allowlist
(nouns and adjectives, say) driven by a plain word-to-tag lexicon.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .porter import stem

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased letter-bearing tokens, in text order."""
    return [
        tok
        for tok in _TOKEN_RE.findall(text.lower())
        if any(ch.isalpha() for ch in tok)
    ]


def _parse_stopword_lines(lines) -> set[str]:
    words = set()
    for line in lines:
        entry = line.split("#", 1)[0].strip()
        if entry:
            words.add(entry)
    return words


def load_stopwords(path: str | Path) -> set[str]:
    """One word per line, UTF-8, '#' starts a comment."""
    return _parse_stopword_lines(
        Path(path).read_text(encoding="utf-8").splitlines()
    )


def default_stopwords() -> set[str]:
    text = resources.files("streamorg").joinpath("data/stopwords.txt").read_text("utf-8")
    return _parse_stopword_lines(text.splitlines())


def load_tag_lexicon(path: str | Path) -> dict[str, str]:
    """UTF-8 TSV: word<TAB>tag. Later rows win on duplicates."""
    lexicon: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        word, sep, tag = line.partition("\t")
        word, tag = word.strip(), tag.strip()
        if not sep or not word or not tag:
            raise ConfigError(f"{path}: line {lineno}: expected word<TAB>tag")
        lexicon[word] = tag
    return lexicon


@dataclass
class FilterConfig:
    """Token filtering settings shared by both pipelines.

    `keep_tags` requires `tag_lexicon`; words missing from the lexicon are
    kept (fail-open), so an incomplete lexicon never silently drops text.
    """

    stopwords: set[str] = field(default_factory=default_stopwords)
    stemming: bool = True
    keep_tags: set[str] | None = None
    tag_lexicon: dict[str, str] | None = None

    def __post_init__(self):
        if self.keep_tags is not None and self.tag_lexicon is None:
            raise ConfigError("keep_tags is set but no tag lexicon was provided")


def apply_filters(tokens: list[str], config: FilterConfig) -> list[str]:
    """Stopword removal, then stemming, then the optional tag allowlist."""
    out = [t for t in tokens if t not in config.stopwords]
    if config.stemming:
        out = [stem(t) for t in out]
    if config.keep_tags is not None:
        lexicon = config.tag_lexicon or {}
        out = [t for t in out if lexicon.get(t) is None or lexicon[t] in config.keep_tags]
    return out
