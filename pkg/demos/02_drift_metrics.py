"""Walkthrough: word-level and semantic-level drift between two domains.

Covers Jaccard similarity over token type sets, cosine similarity between
domain-average TF-IDF vectors, and cosine/Euclidean/Manhattan between
domain-average embeddings read from a TDEB file.

Run:  python demos/02_drift_metrics.py
"""

import tempfile
from pathlib import Path

from tempdrift import (
    MetricSpec,
    jaccard_similarity,
    load_embedding_table,
    measure_drift,
    tfidf_cosine_similarity,
    token_type_set,
)
from tempdrift.corpus import Document
from tempdrift.synth import make_toy_corpus, write_toy_embeddings

workdir = Path(tempfile.mkdtemp(prefix="tempdrift_demo_"))

records = make_toy_corpus(docs_per_domain=40, seed=7)
by_label = {}
for rec in records:
    doc = Document(id=rec["id"], text=rec["text"], domain_label=rec["domain"])
    by_label.setdefault(rec["domain"], []).append(doc)

t1, t2, t4 = by_label["T1"], by_label["T2"], by_label["T4"]

# Word level: token sets and TF-IDF vectors.
print("token type counts:", {k: len(token_type_set(v)) for k, v in sorted(by_label.items())})
print(f"\njaccard  T1-T2: {jaccard_similarity(token_type_set(t1), token_type_set(t2)):.4f}")
print(f"jaccard  T1-T4: {jaccard_similarity(token_type_set(t1), token_type_set(t4)):.4f}")
print(f"tfidf    T1-T2: {tfidf_cosine_similarity(t1, t2):.4f}")
print(f"tfidf    T1-T4: {tfidf_cosine_similarity(t1, t4):.4f}")
print("adjacent intervals overlap more than distant ones.")

# Semantic level: embeddings arrive out of process in the TDEB binary format.
tdeb_path = workdir / "vectors.tdeb"
write_toy_embeddings(records, tdeb_path, encoder_id="toyenc", dim=16)
table = load_embedding_table(tdeb_path, encoder_id="toyenc")
print(f"\nloaded {len(table.entries)} vectors of dim {table.dim} from {tdeb_path.name}")

for measure in ("cosine", "euclidean", "manhattan"):
    spec = MetricSpec("embedding", "toyenc", measure)
    near = measure_drift(t1, t2, spec, table, source_label="T1", target_label="T2")
    far = measure_drift(t1, t4, spec, table, source_label="T1", target_label="T4")
    print(f"{measure:>10}: T1-T2 {near.value: .4f}   T1-T4 {far.value: .4f}   ({spec.kind})")
