"""Word-level and semantic-level drift measurements between temporal domains.

Word level: Jaccard similarity between token type sets, and cosine similarity
between domain-average TF-IDF vectors built over the union of the two
compared document sets (a shared coordinate space is required for the cosine
to be well defined).

Semantic level: cosine / Euclidean / Manhattan between domain-average
embeddings. Embeddings are produced out of process and consumed from a TDEB
binary file or an embedding JSONL file; the core stays free of ML runtimes.

TDEB layout (little-endian): magic ``TDEB`` | u32 version=1 | u32 dim |
u64 record count | per record: u16 id byte-length, UTF-8 id, dim * f32.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Set, Union

import numpy as np

from .corpus import Corpus, Document
from .errors import DataError, DegenerateDataError
from .lexical import (
    TokenizerConfig,
    build_tfidf_stats,
    build_tfidf_stats_tokens,
    domain_avg_tfidf,
    domain_avg_tfidf_tokens,
    dot,
    token_type_set,
    tokenize,
)

WORD_FAMILIES = ("jaccard", "tfidf_cosine")
EMBEDDING_MEASURES = ("cosine", "euclidean", "manhattan")


@dataclass(frozen=True)
class MetricSpec:
    """One drift metric: a word-level family or an embedding measure."""

    family: str
    encoder_id: Optional[str] = None
    measure: Optional[str] = None

    def __post_init__(self):
        if self.family in WORD_FAMILIES:
            if self.encoder_id is not None or self.measure is not None:
                raise DataError(f"{self.family} takes no encoder or measure")
        elif self.family == "embedding":
            if not self.encoder_id:
                raise DataError("embedding metric requires an encoder_id")
            if self.measure not in EMBEDDING_MEASURES:
                raise DataError(f"unknown embedding measure {self.measure!r}")
        else:
            raise DataError(f"unknown metric family {self.family!r}")

    @property
    def kind(self) -> str:
        """'similarity' or 'distance', forced by the family/measure."""
        if self.family in WORD_FAMILIES or self.measure == "cosine":
            return "similarity"
        return "distance"

    def canonical(self) -> str:
        if self.family == "embedding":
            return f"embedding/{self.encoder_id}/{self.measure}"
        return self.family

    def slug(self) -> str:
        """Filesystem-safe name for report files."""
        return self.canonical().replace("/", "_")

    @staticmethod
    def from_string(text: str) -> "MetricSpec":
        parts = text.split("/")
        if len(parts) == 1:
            return MetricSpec(family=parts[0])
        if len(parts) == 3 and parts[0] == "embedding":
            return MetricSpec(family="embedding", encoder_id=parts[1], measure=parts[2])
        raise DataError(f"cannot parse metric {text!r} "
                        "(expected 'jaccard', 'tfidf_cosine' or 'embedding/<enc>/<measure>')")


@dataclass
class EmbeddingTable:
    encoder_id: str
    dim: int
    entries: Dict[str, np.ndarray]

    def __post_init__(self):
        if self.dim < 1:
            raise DataError("embedding dim must be >= 1")

    def vector(self, doc_id: str) -> np.ndarray:
        try:
            return self.entries[doc_id]
        except KeyError:
            raise DataError(f"document id {doc_id!r} missing from embedding table "
                            f"{self.encoder_id!r}") from None


@dataclass(frozen=True)
class DriftMeasurement:
    source_label: str
    target_label: str
    metric: MetricSpec
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DataError("drift value must be finite")
        if self.metric.family == "jaccard" and not 0.0 <= self.value <= 1.0:
            raise DataError(f"jaccard value {self.value} outside [0,1]")
        if self.metric.kind == "similarity" and not -1.0 - 1e-9 <= self.value <= 1.0 + 1e-9:
            raise DataError(f"cosine value {self.value} outside [-1,1]")
        if self.metric.kind == "distance" and self.value < 0.0:
            raise DataError(f"distance value {self.value} is negative")


def jaccard_similarity(set_a: Set[str], set_b: Set[str]) -> float:
    """|A intersect B| / |A union B|."""
    union = len(set_a | set_b)
    if union == 0:
        raise DegenerateDataError("jaccard undefined for two empty sets")
    return len(set_a & set_b) / union


def tfidf_cosine_similarity(docs_a: Sequence[Document], docs_b: Sequence[Document],
                            config: TokenizerConfig = TokenizerConfig()) -> float:
    """Cosine between the two domain-average TF-IDF vectors.

    The vocabulary and idf are built over docs_a + docs_b so both averages
    live in one coordinate space.
    """
    if not docs_a or not docs_b:
        raise DataError("tfidf cosine needs two nonempty document lists")
    stats = build_tfidf_stats(list(docs_a) + list(docs_b), config)
    va = domain_avg_tfidf(docs_a, stats, config)
    vb = domain_avg_tfidf(docs_b, stats, config)
    norm_a = va.norm()
    norm_b = vb.norm()
    if norm_a == 0.0:
        raise DegenerateDataError("first domain-average TF-IDF vector is zero")
    if norm_b == 0.0:
        raise DegenerateDataError("second domain-average TF-IDF vector is zero")
    return dot(va, vb) / (norm_a * norm_b)


TDEB_MAGIC = b"TDEB"
TDEB_VERSION = 1


def save_embedding_table(table: EmbeddingTable, path: Union[str, Path]) -> None:
    """Write a table in the TDEB binary format (ids in insertion order)."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(TDEB_MAGIC)
        fh.write(struct.pack("<IIQ", TDEB_VERSION, table.dim, len(table.entries)))
        for doc_id, vec in table.entries.items():
            if len(vec) != table.dim:
                raise DataError(f"vector for {doc_id!r} has length {len(vec)}, expected {table.dim}")
            id_bytes = doc_id.encode("utf-8")
            fh.write(struct.pack("<H", len(id_bytes)))
            fh.write(id_bytes)
            fh.write(np.asarray(vec, dtype="<f4").tobytes())


def load_embedding_table(path: Union[str, Path],
                         encoder_id: Optional[str] = None) -> EmbeddingTable:
    """Read TDEB or embedding-JSONL (sniffed by the 4-byte magic).

    For TDEB the encoder id comes from the caller (defaulting to the file
    stem); for JSONL it comes from the header line, and a caller-supplied id
    must agree with it.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"embedding file not found: {path}")
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == TDEB_MAGIC:
        return _load_tdeb(path, encoder_id or path.stem)
    return _load_embedding_jsonl(path, encoder_id)


def _load_tdeb(path: Path, encoder_id: str) -> EmbeddingTable:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != TDEB_MAGIC:
        raise DataError(f"{path.name}: bad magic {data[:4]!r}")
    if len(data) < 20:
        raise DataError(f"{path.name}: truncated header")
    version, dim, count = struct.unpack_from("<IIQ", data, 4)
    if version != TDEB_VERSION:
        raise DataError(f"{path.name}: unsupported TDEB version {version}")
    if dim < 1:
        raise DataError(f"{path.name}: dim must be >= 1, got {dim}")
    entries: Dict[str, np.ndarray] = {}
    offset = 20
    for k in range(count):
        if offset + 2 > len(data):
            raise DataError(f"{path.name}: truncated at record {k}")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        rec_len = id_len + 4 * dim
        if offset + rec_len > len(data):
            raise DataError(f"{path.name}: truncated at record {k}")
        doc_id = data[offset:offset + id_len].decode("utf-8")
        offset += id_len
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).astype(np.float64)
        offset += 4 * dim
        if doc_id in entries:
            raise DataError(f"{path.name}: duplicate id {doc_id!r} at record {k}")
        if not np.all(np.isfinite(vec)):
            raise DataError(f"{path.name}: non-finite component in record {k} ({doc_id!r})")
        entries[doc_id] = vec
    if offset != len(data):
        raise DataError(f"{path.name}: {len(data) - offset} trailing bytes after last record")
    return EmbeddingTable(encoder_id=encoder_id, dim=dim, entries=entries)


def _load_embedding_jsonl(path: Path, encoder_id: Optional[str]) -> EmbeddingTable:
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise DataError(f"{path.name}: not TDEB and no JSONL header line") from exc
        if not isinstance(header, dict) or "encoder_id" not in header or "dim" not in header:
            raise DataError(f"{path.name}: header line must carry encoder_id and dim")
        file_encoder = header["encoder_id"]
        dim = int(header["dim"])
        if encoder_id is not None and encoder_id != file_encoder:
            raise DataError(f"{path.name}: header encoder {file_encoder!r} does not match "
                            f"requested {encoder_id!r}")
        entries: Dict[str, np.ndarray] = {}
        for k, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            doc_id = rec.get("id")
            vector = rec.get("vector")
            if not isinstance(doc_id, str) or not isinstance(vector, list):
                raise DataError(f"{path.name}: record {k} needs string id and vector array")
            if len(vector) != dim:
                raise DataError(f"{path.name}: record {k} ({doc_id!r}) has dim "
                                f"{len(vector)}, header says {dim}")
            if doc_id in entries:
                raise DataError(f"{path.name}: duplicate id {doc_id!r} at record {k}")
            vec = np.asarray(vector, dtype=np.float64)
            if not np.all(np.isfinite(vec)):
                raise DataError(f"{path.name}: non-finite component in record {k} ({doc_id!r})")
            entries[doc_id] = vec
    return EmbeddingTable(encoder_id=file_encoder, dim=dim, entries=entries)


def domain_avg_embedding(doc_ids: Sequence[str], table: EmbeddingTable) -> np.ndarray:
    """Coordinate-wise mean of the ids' vectors, accumulated in list order."""
    if not doc_ids:
        raise DataError("cannot average an empty id list")
    acc = np.zeros(table.dim, dtype=np.float64)
    for doc_id in doc_ids:
        acc += table.vector(doc_id)
    return acc / len(doc_ids)


def vector_similarity(u: np.ndarray, v: np.ndarray, measure: str) -> float:
    """cosine -> u.v/(|u||v|); euclidean -> L2 of u-v; manhattan -> L1 of u-v."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DataError(f"vector length mismatch: {u.shape} vs {v.shape}")
    if measure == "cosine":
        nu = float(np.linalg.norm(u))
        nv = float(np.linalg.norm(v))
        if nu == 0.0 or nv == 0.0:
            raise DegenerateDataError("cosine undefined for a zero vector")
        return float(np.dot(u, v) / (nu * nv))
    if measure == "euclidean":
        return float(np.linalg.norm(u - v))
    if measure == "manhattan":
        return float(np.sum(np.abs(u - v)))
    raise DataError(f"unknown measure {measure!r}")


def measure_drift(docs_a: Sequence[Document], docs_b: Sequence[Document],
                  metric: MetricSpec,
                  table: Optional[EmbeddingTable] = None,
                  config: TokenizerConfig = TokenizerConfig(),
                  source_label: str = "A", target_label: str = "B") -> DriftMeasurement:
    """Dispatch one metric over two document sets."""
    if metric.family == "embedding":
        if table is None:
            raise DataError(f"metric {metric.canonical()} requires an embedding table")
        if table.encoder_id != metric.encoder_id:
            raise DataError(f"embedding table encoder {table.encoder_id!r} does not match "
                            f"metric encoder {metric.encoder_id!r}")
        avg_a = domain_avg_embedding([d.id for d in docs_a], table)
        avg_b = domain_avg_embedding([d.id for d in docs_b], table)
        value = vector_similarity(avg_a, avg_b, metric.measure)
    else:
        if table is not None:
            raise DataError(f"metric {metric.canonical()} takes no embedding table")
        if metric.family == "jaccard":
            value = jaccard_similarity(token_type_set(docs_a, config),
                                       token_type_set(docs_b, config))
        else:
            value = tfidf_cosine_similarity(docs_a, docs_b, config)
    return DriftMeasurement(source_label=source_label, target_label=target_label,
                            metric=metric, value=value)


class DriftContext:
    """Corpus + tokenizer + embedding tables, with per-document token caches.

    Observation protocols evaluate the same documents hundreds of times in
    overlapping samples; tokenizing once per document keeps that affordable.
    Results are identical to the uncached Document-based entry points because
    the same token-level functions run underneath.
    """

    def __init__(self, corpus: Corpus, config: TokenizerConfig = TokenizerConfig(),
                 tables: Optional[Dict[str, EmbeddingTable]] = None):
        self.corpus = corpus
        self.config = config
        self.tables = dict(tables or {})
        self._tokens: Dict[str, list] = {}
        self._token_sets: Dict[str, frozenset] = {}

    def tokens(self, doc_id: str) -> list:
        cached = self._tokens.get(doc_id)
        if cached is None:
            cached = tokenize(self.corpus[doc_id].text, self.config)
            self._tokens[doc_id] = cached
        return cached

    def token_set(self, doc_id: str) -> frozenset:
        cached = self._token_sets.get(doc_id)
        if cached is None:
            cached = frozenset(self.tokens(doc_id))
            self._token_sets[doc_id] = cached
        return cached

    def table_for(self, metric: MetricSpec) -> EmbeddingTable:
        table = self.tables.get(metric.encoder_id)
        if table is None:
            raise DataError(f"no embedding table loaded for encoder {metric.encoder_id!r}")
        return table

    def measure_ids(self, ids_a: Sequence[str], ids_b: Sequence[str], metric: MetricSpec,
                    source_label: str, target_label: str) -> DriftMeasurement:
        """measure_drift over document ids, reusing the token caches."""
        if metric.family == "jaccard":
            set_a: Set[str] = set()
            for i in ids_a:
                set_a |= self.token_set(i)
            set_b: Set[str] = set()
            for i in ids_b:
                set_b |= self.token_set(i)
            value = jaccard_similarity(set_a, set_b)
        elif metric.family == "tfidf_cosine":
            tokens_a = [self.tokens(i) for i in ids_a]
            tokens_b = [self.tokens(i) for i in ids_b]
            if not tokens_a or not tokens_b:
                raise DataError("tfidf cosine needs two nonempty document lists")
            stats = build_tfidf_stats_tokens(tokens_a + tokens_b)
            va = domain_avg_tfidf_tokens(tokens_a, stats)
            vb = domain_avg_tfidf_tokens(tokens_b, stats)
            norm_a = va.norm()
            norm_b = vb.norm()
            if norm_a == 0.0:
                raise DegenerateDataError("first domain-average TF-IDF vector is zero")
            if norm_b == 0.0:
                raise DegenerateDataError("second domain-average TF-IDF vector is zero")
            value = dot(va, vb) / (norm_a * norm_b)
        else:
            table = self.table_for(metric)
            avg_a = domain_avg_embedding(ids_a, table)
            avg_b = domain_avg_embedding(ids_b, table)
            value = vector_similarity(avg_a, avg_b, metric.measure)
        return DriftMeasurement(source_label=source_label, target_label=target_label,
                                metric=metric, value=value)
