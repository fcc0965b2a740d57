"""Synthetic corpora, embeddings, and score grids for demos and testing.

Real inputs for this toolkit (clinical corpora, encoder embeddings, model
scores) are produced elsewhere; these generators build structurally faithful
stand-ins: four temporal domains whose vocabularies slide over time (adjacent
domains overlap more than distant ones), hash-derived pseudo-embeddings that
track token overlap, and a performance grid whose deltas follow a chosen
linear function of measured similarity plus Gaussian noise. Everything is
seeded through tempdrift.rng, so fixture bytes are reproducible.
"""

from __future__ import annotations

import csv
import json
import math
from datetime import date, timedelta
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from .drift import EmbeddingTable, save_embedding_table
from .rng import SplitMix64, derive_seed, fnv1a64


def _token(index: int) -> str:
    return f"tok{index:04d}"


def gaussian(rng: SplitMix64) -> float:
    """Standard normal via Box-Muller on two uniform draws."""
    u1 = (rng.next_u64() >> 11) / float(1 << 53)
    u2 = (rng.next_u64() >> 11) / float(1 << 53)
    u1 = max(u1, 1e-300)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def make_toy_corpus(n_domains: int = 4, docs_per_domain: int = 200,
                    vocab_size: int = 2000, window: int = 900, tokens_per_doc: int = 30,
                    seed: int = 0) -> List[dict]:
    """Corpus records with sliding-window vocabularies across domains.

    Domain i draws its tokens from a window of the global vocabulary starting
    at i * step, so lexical overlap decays with temporal distance. Within a
    window, token indices follow a heavy-tailed (squared-uniform) law: like a
    real corpus, each domain has common tokens plus rare ones whose presence
    fluctuates between samples, keeping half-sampling observations nondegenerate.
    Each record carries both a timestamp (three-year intervals from 2008) and
    an explicit domain label, so either segmentation strategy applies.
    """
    if n_domains < 2:
        raise ValueError("need at least 2 domains")
    step = (vocab_size - window) // (n_domains - 1)
    records = []
    for d in range(n_domains):
        label = f"T{d + 1}"
        start_year = 2008 + 3 * d
        range_start = date(start_year, 1, 1)
        range_days = (date(start_year + 2, 12, 31) - range_start).days
        rng = SplitMix64(derive_seed(seed, f"toy/domain/{label}"))
        lo = d * step
        for k in range(docs_per_domain):
            tokens = []
            for _ in range(tokens_per_doc):
                u = (rng.next_u64() >> 11) / float(1 << 53)
                tokens.append(_token(lo + min(int(window * u * u), window - 1)))
            day = range_start + timedelta(days=rng.next_below(range_days + 1))
            records.append({
                "id": f"{label.lower()}-{k:04d}",
                "text": " ".join(tokens),
                "timestamp": day.isoformat(),
                "domain": label,
            })
    return records


def write_corpus_jsonl(records: Sequence[dict], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def hashed_embedding(tokens: Sequence[str], dim: int = 16) -> np.ndarray:
    """Deterministic pseudo-embedding: mean of per-token hash directions.

    Documents sharing tokens get nearby vectors, so semantic-level metrics on
    these embeddings track lexical overlap the way a real encoder's would.
    """
    acc = np.zeros(dim, dtype=np.float64)
    if not tokens:
        return acc
    for token in tokens:
        trng = SplitMix64(fnv1a64(token))
        direction = np.array([(trng.next_u64() >> 11) / float(1 << 53) * 2.0 - 1.0
                              for _ in range(dim)])
        acc += direction
    acc /= len(tokens)
    norm = np.linalg.norm(acc)
    return acc / norm if norm > 0 else acc


def _toy_token_direction(token: str, dim: int, vocab_scale: int = 2000) -> np.ndarray:
    """Toy-encoder direction: a smooth position on an arc (from the token's
    vocabulary index) plus hash jitter, so domain averages drift gradually as
    the vocabulary window slides instead of jumping once overlap hits zero."""
    trng = SplitMix64(fnv1a64(token))
    vec = np.array([(trng.next_u64() >> 11) / float(1 << 53) * 2.0 - 1.0
                    for _ in range(dim)]) * 0.6
    if token.startswith("tok"):
        try:
            angle = (int(token[3:]) / vocab_scale) * (math.pi / 2.0)
        except ValueError:
            return vec
        vec[0] += math.cos(angle)
        vec[1] += math.sin(angle)
    return vec


def write_toy_embeddings(records: Sequence[dict], path: Union[str, Path],
                         encoder_id: str = "toyenc", dim: int = 16) -> None:
    entries = {}
    for rec in records:
        tokens = rec["text"].split()
        acc = np.zeros(dim, dtype=np.float64)
        for token in tokens:
            acc += _toy_token_direction(token, dim)
        acc /= max(len(tokens), 1)
        norm = np.linalg.norm(acc)
        entries[rec["id"]] = acc / norm if norm > 0 else acc
    save_embedding_table(EmbeddingTable(encoder_id=encoder_id, dim=dim, entries=entries), path)


def write_perf_csv(path: Union[str, Path], similarities: Dict[Tuple[str, str], float],
                   labels: Sequence[str], slope: float = 0.5, noise_sd: float = 0.02,
                   base: float = 0.8, run_spread: float = 0.004, runs: int = 5,
                   dataset: str = "toy", perf_metric: str = "F1", seed: int = 0) -> None:
    """Score grid whose deltas are slope * sim(i,j) - offset + Gaussian noise.

    `similarities` maps unordered pairs to drift values; the offset centers
    deltas near zero so higher similarity means milder degradation. Runs are
    symmetric around the cell mean, so cell means are exact by construction.
    """
    sims = list(similarities.values())
    offset = slope * (max(sims) + min(sims)) / 2.0 + 0.05

    def cell_runs(mean: float) -> List[float]:
        return [mean + run_spread * k for k in range(-(runs // 2), runs - runs // 2)]

    rows = []
    for j in labels:
        for run_index, score in enumerate(cell_runs(base), start=1):
            rows.append([dataset, perf_metric, j, j, run_index, repr(score)])
    for i in labels:
        for j in labels:
            if i == j:
                continue
            sim = similarities.get((i, j), similarities.get((j, i)))
            if sim is None:
                raise ValueError(f"no similarity for pair {i}-{j}")
            rng = SplitMix64(derive_seed(seed, f"toy/perf/{i}/{j}"))
            delta = slope * sim - offset + noise_sd * gaussian(rng)
            for run_index, score in enumerate(cell_runs(base + delta), start=1):
                rows.append([dataset, perf_metric, i, j, run_index, repr(score)])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "perf_metric", "train_domain", "test_domain",
                         "run_index", "score"])
        writer.writerows(rows)


def toy_date_ranges(n_domains: int = 4) -> List[dict]:
    return [{"label": f"T{d + 1}",
             "start": f"{2008 + 3 * d}-01-01",
             "end": f"{2010 + 3 * d}-12-31"} for d in range(n_domains)]


def build_toy_fixture(directory: Union[str, Path], seed: int = 0,
                      docs_per_domain: int = 200, with_perf: bool = True) -> Path:
    """Write corpus.jsonl, vectors.tdeb, perf.csv, and config.json; return the
    config path. The perf grid's similarities come from TF-IDF cosine over the
    generated domains, measured with the library itself."""
    from .corpus import Corpus, Document
    from .drift import DriftContext, MetricSpec

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    records = make_toy_corpus(docs_per_domain=docs_per_domain, seed=seed)
    write_corpus_jsonl(records, directory / "corpus.jsonl")
    write_toy_embeddings(records, directory / "vectors.tdeb")

    labels = sorted({rec["domain"] for rec in records})
    config = {
        "corpus_path": "corpus.jsonl",
        "corpus_format": "jsonl",
        "segmentation": {"strategy": "date_ranges", "ranges": toy_date_ranges(len(labels))},
        "master_seed": seed,
        "metrics": ["jaccard", "tfidf_cosine", "embedding/toyenc/cosine",
                    "embedding/toyenc/euclidean", "embedding/toyenc/manhattan"],
        "embedding_paths": {"toyenc": "vectors.tdeb"},
        "output_dir": "out",
    }
    if with_perf:
        docs = [Document(id=r["id"], text=r["text"], domain_label=r["domain"])
                for r in records]
        ctx = DriftContext(Corpus(docs))
        by_label: Dict[str, List[str]] = {}
        for rec in records:
            by_label.setdefault(rec["domain"], []).append(rec["id"])
        sims = {}
        for a in labels:
            for b in labels:
                if a < b:
                    m = ctx.measure_ids(by_label[a], by_label[b],
                                        MetricSpec(family="tfidf_cosine"), a, b)
                    sims[(a, b)] = m.value
        write_perf_csv(directory / "perf.csv", sims, labels, seed=seed)
        config["performance_path"] = "perf.csv"

    config_path = directory / "config.json"
    config_path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")
    return config_path
