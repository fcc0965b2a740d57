"""Walkthrough: loading a corpus, segmenting it into temporal domains,
equalizing domain sizes, and producing train/test split manifests.

Run:  python demos/01_corpus_and_domains.py
"""

import tempfile
from datetime import date
from pathlib import Path

from tempdrift import DateRange, equalize_domains, load_corpus, segment_domains, split_train_test
from tempdrift.rng import derive_seed
from tempdrift.synth import make_toy_corpus, write_corpus_jsonl

MASTER_SEED = 42

workdir = Path(tempfile.mkdtemp(prefix="tempdrift_demo_"))

# A synthetic corpus: four 3-year intervals, vocabulary sliding over time.
records = make_toy_corpus(docs_per_domain=50, seed=MASTER_SEED)
corpus_path = workdir / "corpus.jsonl"
write_corpus_jsonl(records, corpus_path)
print(f"wrote {len(records)} documents to {corpus_path}")

corpus = load_corpus(corpus_path, "jsonl")
print(f"loaded {len(corpus)} documents; first: {corpus.documents[0].id} "
      f"({corpus.documents[0].timestamp})")

# Segment by date ranges (the corpus also carries labels; either strategy works).
ranges = [DateRange(f"T{k + 1}", date(2008 + 3 * k, 1, 1), date(2010 + 3 * k, 12, 31))
          for k in range(4)]
result = segment_domains(corpus, ranges)
print("\nsegmentation:")
for domain in result.domains:
    print(f"  {domain.label} (ordinal {domain.ordinal}): {len(domain)} docs, "
          f"{domain.date_range.start}..{domain.date_range.end}")
print(f"  skipped: {len(result.skipped_ids)} docs")

# Equalize: every domain downsampled to the smallest size, seeded and reproducible.
equalized = equalize_domains(result.domains, MASTER_SEED)
print("\nequalized sizes:", [len(d) for d in equalized])

# 20% held-out test split per domain, seeded per domain label.
print("\nsplit manifests (20% test):")
for domain in equalized:
    manifest = split_train_test(domain, 0.2, derive_seed(MASTER_SEED, f"split/{domain.label}"))
    print(f"  {domain.label}: {len(manifest.train_ids)} train / {len(manifest.test_ids)} test")
    (workdir / f"split_{domain.label}.json").write_text(manifest.to_json())

print(f"\nartifacts in {workdir}")
