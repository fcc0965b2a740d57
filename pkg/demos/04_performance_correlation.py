"""Walkthrough: ingesting model scores, computing performance changes, and
correlating them with drift measurements.

Scores come from an external evaluation harness as a CSV grid of
(dataset, metric, train_domain, test_domain, run) rows. The performance change
for an ordered pair (i, j) is mean(p_ij) - mean(p_jj); a negative delta means
the model degrades when trained on T_i and deployed on T_j.

Run:  python demos/04_performance_correlation.py
"""

import tempfile
from pathlib import Path

from tempdrift import (
    Corpus,
    MetricSpec,
    build_correlation_table,
    change_significance,
    load_performance,
    performance_change,
    render_correlation_markdown,
)
from tempdrift.corpus import Document
from tempdrift.drift import DriftContext, DriftMeasurement
from tempdrift.synth import make_toy_corpus, write_perf_csv

workdir = Path(tempfile.mkdtemp(prefix="tempdrift_demo_"))
labels = ["T1", "T2", "T3", "T4"]

# Measure drift between all unordered domain pairs.
records = make_toy_corpus(docs_per_domain=60, seed=9)
docs = [Document(id=r["id"], text=r["text"], domain_label=r["domain"]) for r in records]
ctx = DriftContext(Corpus(docs))
ids = {}
for rec in records:
    ids.setdefault(rec["domain"], []).append(rec["id"])
metric = MetricSpec("tfidf_cosine")
drift = []
sims = {}
for a in range(len(labels)):
    for b in range(a + 1, len(labels)):
        i, j = labels[a], labels[b]
        m = ctx.measure_ids(ids[i], ids[j], metric, i, j)
        drift.append(m)
        sims[(i, j)] = m.value
        print(f"drift {i}-{j}: {m.value:.4f}")

# A synthetic score grid whose deltas follow the measured similarities.
perf_path = workdir / "perf.csv"
write_perf_csv(perf_path, sims, labels, seed=9)
ledger = load_performance(perf_path)
print(f"\nloaded {len(ledger.records)} score rows "
      f"({len(ledger.cross_cells())} cross-domain cells, 5 runs each)")

changes = []
print("\nperformance changes (delta = cross mean - in-domain mean):")
for dataset, perf_metric, i, j in ledger.cross_cells():
    change = performance_change(ledger, dataset, perf_metric, i, j)
    test = change_significance(ledger, dataset, perf_metric, i, j)
    star = "*" if test.significant else ""
    print(f"  {i}->{j}: {change.delta:+.4f}{star}")
    changes.append(change)

# The correlation table pairs the symmetric drift value with both ordered deltas.
grid = build_correlation_table(drift, changes)
cell = grid.cell(metric, "F1")
print(f"\nPearson r = {cell.r:.3f} (p = {cell.p_value:.2e}, n = {cell.n}) -> "
      f"rendered as {cell.rendered()!r}")

md_path = workdir / "correlations.md"
render_correlation_markdown(grid, md_path)
print(f"\n{md_path}:\n{md_path.read_text()}")

# Distance metrics correlate with the opposite sign.
dist_metric = MetricSpec("embedding", "negated", "euclidean")
dist = [DriftMeasurement(m.source_label, m.target_label, dist_metric, 1.0 - m.value)
        for m in drift]
grid2 = build_correlation_table(drift + dist, changes)
print(f"similarity r = {grid2.cell(metric, 'F1').r:+.3f}   "
      f"negated-distance r = {grid2.cell(dist_metric, 'F1').r:+.3f}")
