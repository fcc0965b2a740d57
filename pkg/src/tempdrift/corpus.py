"""Time-stamped corpus ingestion and temporal-domain bookkeeping.

A corpus is a flat list of documents, each carrying a date and/or an explicit
domain label. Documents are grouped into ordered temporal domains, optionally
downsampled so all domains share the smallest size, and split into train/test
manifests. All sampling is seeded through :mod:`tempdrift.rng`, so repeated
runs are byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import DataError
from .rng import SplitMix64, derive_seed, fisher_yates, sample_without_replacement


@dataclass(frozen=True)
class Document:
    """One text unit. `payload` is opaque (gold labels etc.) and never parsed."""

    id: str
    text: str
    timestamp: Optional[date] = None
    domain_label: Optional[str] = None
    payload: Optional[str] = None

    def __post_init__(self):
        if not self.id:
            raise DataError("document id must be a nonempty string")
        if self.timestamp is None and self.domain_label is None:
            raise DataError(f"document {self.id!r} has neither timestamp nor domain label")


class Corpus:
    """Immutable collection of documents with unique ids."""

    def __init__(self, documents: Iterable[Document]):
        self._docs = tuple(documents)
        by_id: dict[str, Document] = {}
        for doc in self._docs:
            if doc.id in by_id:
                raise DataError(f"duplicate document id {doc.id!r}")
            by_id[doc.id] = doc
        self._by_id = by_id

    @property
    def documents(self) -> tuple[Document, ...]:
        return self._docs

    def __len__(self) -> int:
        return len(self._docs)

    def __getitem__(self, doc_id: str) -> Document:
        try:
            return self._by_id[doc_id]
        except KeyError:
            raise DataError(f"unknown document id {doc_id!r}") from None

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def get_all(self, doc_ids: Sequence[str]) -> list[Document]:
        return [self[i] for i in doc_ids]


@dataclass(frozen=True)
class DateRange:
    """Closed calendar interval [start, end]."""

    label: str
    start: date
    end: date

    def __post_init__(self):
        if self.end < self.start:
            raise DataError(f"date range {self.label!r}: end precedes start")

    def contains(self, day: date) -> bool:
        return self.start <= day <= self.end


@dataclass
class TemporalDomain:
    """An ordered time bucket T_i holding document ids."""

    label: str
    ordinal: int
    doc_ids: list[str]
    date_range: Optional[DateRange] = None

    def __post_init__(self):
        if self.ordinal < 1:
            raise DataError(f"domain {self.label!r}: ordinal must be >= 1")
        if not self.doc_ids:
            raise DataError(f"domain {self.label!r} is empty")

    def __len__(self) -> int:
        return len(self.doc_ids)


@dataclass(frozen=True)
class SplitManifest:
    """Train/test membership for one domain. Id lists are kept sorted."""

    domain_label: str
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    seed: int
    test_fraction: float

    def to_json(self) -> str:
        payload = {
            "domain": self.domain_label,
            "seed": self.seed,
            "test_fraction": self.test_fraction,
            "train_ids": list(self.train_ids),
            "test_ids": list(self.test_ids),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json(text: str) -> "SplitManifest":
        raw = json.loads(text)
        return SplitManifest(
            domain_label=raw["domain"],
            train_ids=tuple(raw["train_ids"]),
            test_ids=tuple(raw["test_ids"]),
            seed=raw["seed"],
            test_fraction=raw["test_fraction"],
        )


@dataclass
class SegmentationResult:
    """Domains in ordinal order plus the ids that matched no bucket."""

    domains: list[TemporalDomain]
    skipped_ids: list[str] = field(default_factory=list)


def _parse_date(value: str, where: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise DataError(f"{where}: bad date {value!r} (expected YYYY-MM-DD)") from exc


def _record_to_document(rec: Mapping[str, object], where: str) -> Document:
    doc_id = rec.get("id")
    text = rec.get("text")
    if not isinstance(doc_id, str) or not doc_id:
        raise DataError(f"{where}: missing or empty 'id'")
    if not isinstance(text, str):
        raise DataError(f"{where}: missing 'text'")
    ts = rec.get("timestamp") or None
    label = rec.get("domain") or None
    payload = rec.get("payload") or None
    timestamp = _parse_date(ts, where) if isinstance(ts, str) else None
    if timestamp is None and label is None:
        raise DataError(f"{where}: document {doc_id!r} needs 'timestamp' or 'domain'")
    return Document(id=doc_id, text=text, timestamp=timestamp,
                    domain_label=label, payload=payload)


def load_corpus(path: Union[str, Path], format: str = "jsonl") -> Corpus:
    """Load a corpus from JSONL or CSV (see README for the schemas)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus file not found: {path}")
    if format == "jsonl":
        docs = _load_jsonl(path)
    elif format == "csv":
        docs = _load_csv(path)
    else:
        raise DataError(f"unknown corpus format {format!r} (expected jsonl or csv)")
    return Corpus(docs)


def _load_jsonl(path: Path) -> list[Document]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path.name}:{lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: malformed JSON ({exc.msg})") from exc
            if not isinstance(rec, dict):
                raise DataError(f"{where}: expected a JSON object")
            docs.append(_record_to_document(rec, where))
    return docs


_CSV_HEADER = ["id", "text", "timestamp", "domain", "payload"]


def _load_csv(path: Path) -> list[Document]:
    docs = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path.name}: empty CSV") from None
        if header != _CSV_HEADER:
            raise DataError(
                f"{path.name}: bad header {header!r}, expected {_CSV_HEADER!r}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(_CSV_HEADER):
                raise DataError(f"{path.name}:{lineno}: expected {len(_CSV_HEADER)} fields")
            rec = dict(zip(_CSV_HEADER, row))
            docs.append(_record_to_document(rec, f"{path.name}:{lineno}"))
    return docs


def segment_domains(
    corpus: Corpus,
    strategy: Union[Mapping[str, int], Sequence[DateRange]],
    strict_assignment: bool = False,
) -> SegmentationResult:
    """Group documents into temporal domains.

    `strategy` is either a mapping label -> ordinal (explicit-labels mode) or a
    time-ordered sequence of disjoint DateRanges. Documents matching no bucket
    are skipped and reported, or rejected when `strict_assignment` is set.
    """
    if isinstance(strategy, Mapping):
        return _segment_by_labels(corpus, strategy, strict_assignment)
    return _segment_by_ranges(corpus, list(strategy), strict_assignment)


def _segment_by_labels(corpus, label_map, strict) -> SegmentationResult:
    ordinals = sorted(label_map.values())
    if ordinals != list(range(1, len(label_map) + 1)):
        raise DataError(f"label ordinals must be 1..K without gaps, got {ordinals}")
    buckets: dict[str, list[str]] = {label: [] for label in label_map}
    skipped = []
    for doc in corpus.documents:
        label = doc.domain_label
        if label in buckets:
            buckets[label].append(doc.id)
        elif strict:
            raise DataError(f"document {doc.id!r}: unknown domain label {label!r}")
        else:
            skipped.append(doc.id)
    domains = []
    for label, ordinal in sorted(label_map.items(), key=lambda kv: kv[1]):
        if not buckets[label]:
            raise DataError(f"domain {label!r} received no documents")
        domains.append(TemporalDomain(label=label, ordinal=ordinal, doc_ids=buckets[label]))
    return SegmentationResult(domains=domains, skipped_ids=skipped)


def _segment_by_ranges(corpus, ranges, strict) -> SegmentationResult:
    if not ranges:
        raise DataError("no date ranges supplied")
    for earlier, later in zip(ranges, ranges[1:]):
        if later.start <= earlier.end:
            raise DataError(
                f"date ranges {earlier.label!r} and {later.label!r} overlap or are out of order")
    buckets: dict[str, list[str]] = {r.label: [] for r in ranges}
    skipped = []
    for doc in corpus.documents:
        hit = None
        if doc.timestamp is not None:
            for rng in ranges:
                if rng.contains(doc.timestamp):
                    hit = rng.label
                    break
        if hit is not None:
            buckets[hit].append(doc.id)
        elif strict:
            raise DataError(f"document {doc.id!r} matches no date range")
        else:
            skipped.append(doc.id)
    domains = []
    for ordinal, rng in enumerate(ranges, start=1):
        if not buckets[rng.label]:
            raise DataError(f"domain {rng.label!r} received no documents")
        domains.append(TemporalDomain(
            label=rng.label, ordinal=ordinal, doc_ids=buckets[rng.label], date_range=rng))
    return SegmentationResult(domains=domains, skipped_ids=skipped)


def equalize_domains(domains: Sequence[TemporalDomain], seed: int) -> list[TemporalDomain]:
    """Downsample every domain to the smallest domain's size.

    Membership is drawn uniformly without replacement per domain (seed context
    "equalize/<label>"); surviving documents keep their original relative
    order, so already-equal domains come back unchanged.
    """
    if not domains:
        raise DataError("no domains to equalize")
    target = min(len(d) for d in domains)
    out = []
    for dom in domains:
        if len(dom) == target:
            out.append(TemporalDomain(dom.label, dom.ordinal, list(dom.doc_ids), dom.date_range))
            continue
        rng = SplitMix64(derive_seed(seed, f"equalize/{dom.label}"))
        keep = set(sample_without_replacement(dom.doc_ids, target, rng))
        kept_ids = [i for i in dom.doc_ids if i in keep]
        out.append(TemporalDomain(dom.label, dom.ordinal, kept_ids, dom.date_range))
    return out


def split_train_test(domain: TemporalDomain, test_fraction: float, seed: int) -> SplitManifest:
    """Shuffle-then-prefix split; the test side takes floor(fraction * n) docs."""
    if not 0.0 < test_fraction < 1.0:
        raise DataError(f"test_fraction must be in (0,1), got {test_fraction}")
    n = len(domain)
    if n < 2:
        raise DataError(f"domain {domain.label!r} too small to split ({n} docs)")
    n_test = int(test_fraction * n)
    if n_test == 0 or n_test == n:
        raise DataError(
            f"domain {domain.label!r}: fraction {test_fraction} leaves an empty split")
    shuffled = fisher_yates(domain.doc_ids, SplitMix64(seed))
    test_ids = tuple(sorted(shuffled[:n_test]))
    train_ids = tuple(sorted(shuffled[n_test:]))
    return SplitManifest(domain_label=domain.label, train_ids=train_ids,
                         test_ids=test_ids, seed=seed, test_fraction=test_fraction)


def sample_subset(domain: TemporalDomain, count: int, seed: int) -> list[str]:
    """`count` distinct ids drawn uniformly without replacement (shuffle order)."""
    if not 0 < count <= len(domain):
        raise DataError(
            f"sample count {count} out of range for domain {domain.label!r} ({len(domain)} docs)")
    return sample_without_replacement(domain.doc_ids, count, SplitMix64(seed))
