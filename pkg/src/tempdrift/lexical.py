"""Tokenization and TF-IDF vectors for word-level drift metrics.

Tokens are maximal runs of Unicode alphanumeric characters (``str.isalnum``
per character), optionally lowercased. Term frequency is the relative
frequency of a token within a document; inverse document frequency is
``ln(|D| / df(t))`` over the collection that defined the vocabulary, so idf
is never negative and never divides by zero.

Floating-point accumulation orders are fixed (documents in list order,
coordinates in vocabulary order) so identical inputs produce identical bytes
regardless of scheduling. The ``*_tokens`` variants operate on pre-tokenized
documents; callers that measure many overlapping samples cache token lists
once and reuse them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Set

from .corpus import Document
from .errors import DataError


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    min_token_len: int = 1

    def __post_init__(self):
        if self.min_token_len < 1:
            raise DataError("min_token_len must be >= 1")


def tokenize(text: str, config: TokenizerConfig = TokenizerConfig()) -> List[str]:
    """Split `text` on maximal runs of non-alphanumeric characters."""
    tokens: List[str] = []
    current: List[str] = []
    for ch in text:
        if ch.isalnum():
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    if config.lowercase:
        tokens = [t.lower() for t in tokens]
    if config.min_token_len > 1:
        tokens = [t for t in tokens if len(t) >= config.min_token_len]
    return tokens


def token_type_set(docs: Sequence[Document],
                   config: TokenizerConfig = TokenizerConfig()) -> Set[str]:
    """Union of distinct tokens across all documents."""
    types: Set[str] = set()
    for doc in docs:
        types.update(tokenize(doc.text, config))
    return types


@dataclass
class TfIdfStats:
    """Document frequencies plus the vocabulary fixing vector coordinates.

    The vocabulary is sorted lexicographically; its position is the canonical
    coordinate index used by every TfIdfVector built from these stats.
    """

    collection_size: int
    doc_freq: Dict[str, int]
    vocabulary: List[str] = field(init=False)
    index: Dict[str, int] = field(init=False)

    def __post_init__(self):
        if self.collection_size < 1:
            raise DataError("collection must contain at least one document")
        for token, df in self.doc_freq.items():
            if not 1 <= df <= self.collection_size:
                raise DataError(f"doc_freq[{token!r}]={df} outside 1..{self.collection_size}")
        self.vocabulary = sorted(self.doc_freq)
        self.index = {t: i for i, t in enumerate(self.vocabulary)}

    def idf(self, token: str) -> float:
        return math.log(self.collection_size / self.doc_freq[token])


@dataclass
class TfIdfVector:
    """Sparse vector over a TfIdfStats vocabulary: coordinate index -> weight."""

    weights: Dict[int, float]

    def __post_init__(self):
        for idx, w in self.weights.items():
            if not math.isfinite(w):
                raise DataError(f"non-finite TF-IDF weight at coordinate {idx}")

    def is_zero(self) -> bool:
        return all(w == 0.0 for w in self.weights.values())

    def norm(self) -> float:
        acc = 0.0
        for idx in sorted(self.weights):
            acc += self.weights[idx] * self.weights[idx]
        return math.sqrt(acc)


def dot(a: TfIdfVector, b: TfIdfVector) -> float:
    """Dot product accumulated in vocabulary coordinate order."""
    acc = 0.0
    for idx in sorted(set(a.weights) & set(b.weights)):
        acc += a.weights[idx] * b.weights[idx]
    return acc


def build_tfidf_stats_tokens(token_lists: Sequence[Sequence[str]]) -> TfIdfStats:
    """Document frequencies over pre-tokenized documents."""
    if not token_lists:
        raise DataError("cannot build TF-IDF stats over an empty collection")
    doc_freq: Dict[str, int] = {}
    for tokens in token_lists:
        for token in set(tokens):
            doc_freq[token] = doc_freq.get(token, 0) + 1
    return TfIdfStats(collection_size=len(token_lists), doc_freq=doc_freq)


def tfidf_vector_tokens(tokens: Sequence[str], stats: TfIdfStats) -> TfIdfVector:
    """tf(t,d) * idf(t,D) per in-vocabulary token; others are ignored."""
    counts: Dict[str, int] = {}
    for token in tokens:
        counts[token] = counts.get(token, 0) + 1
    total = len(tokens)
    weights: Dict[int, float] = {}
    if total == 0:
        return TfIdfVector(weights)
    for token in sorted(counts):
        idx = stats.index.get(token)
        if idx is None:
            continue
        weights[idx] = (counts[token] / total) * stats.idf(token)
    return TfIdfVector(weights)


def domain_avg_tfidf_tokens(token_lists: Sequence[Sequence[str]],
                            stats: TfIdfStats) -> TfIdfVector:
    """Coordinate-wise mean of per-document vectors, in document order."""
    if not token_lists:
        raise DataError("cannot average an empty document list")
    acc: Dict[int, float] = {}
    for tokens in token_lists:
        vec = tfidf_vector_tokens(tokens, stats)
        for idx in sorted(vec.weights):
            acc[idx] = acc.get(idx, 0.0) + vec.weights[idx]
    n = len(token_lists)
    return TfIdfVector({idx: acc[idx] / n for idx in sorted(acc)})


def build_tfidf_stats(docs: Sequence[Document],
                      config: TokenizerConfig = TokenizerConfig()) -> TfIdfStats:
    """Count, per token, the number of documents containing it."""
    if not docs:
        raise DataError("cannot build TF-IDF stats over an empty collection")
    return build_tfidf_stats_tokens([tokenize(d.text, config) for d in docs])


def tfidf_vector(doc: Document, stats: TfIdfStats,
                 config: TokenizerConfig = TokenizerConfig()) -> TfIdfVector:
    return tfidf_vector_tokens(tokenize(doc.text, config), stats)


def domain_avg_tfidf(docs: Sequence[Document], stats: TfIdfStats,
                     config: TokenizerConfig = TokenizerConfig()) -> TfIdfVector:
    if not docs:
        raise DataError("cannot average an empty document list")
    return domain_avg_tfidf_tokens([tokenize(d.text, config) for d in docs], stats)
