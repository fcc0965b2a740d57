"""Correlation between drift measurements and performance changes.

Each grid cell pairs one drift metric with one performance-metric column and
holds the Pearson r over all ordered cross-domain pairs: the symmetric drift
value for {i, j} is paired with both ordered deltas (i->j and j->i). When the
drift input carries ordered values (observation means), the ordered value is
used directly. In-domain pairs are excluded; their delta is identically zero
and would manufacture correlation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .drift import DriftMeasurement, MetricSpec
from .errors import DataError
from .perf import PerformanceChange
from .stats import pearson_correlation

_MEASURE_ORDER = {"cosine": 0, "euclidean": 1, "manhattan": 2}


def stars_for(p: float) -> str:
    """'**' below 0.001, '*' below 0.05, otherwise no star."""
    if not 0.0 <= p <= 1.0:
        raise DataError(f"p-value {p} outside [0,1]")
    if p < 0.001:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def annotate_significance(r: float, p: float) -> str:
    """Render r in the leading-period style with the star suffix, e.g. '.68*'."""
    text = f"{r:.2f}"
    if text.startswith("0."):
        text = text[1:]
    elif text.startswith("-0."):
        text = "-" + text[2:]
    return text + stars_for(p)


def display_name(metric: MetricSpec) -> str:
    """Human-readable row label: 'Jaccard Similarity', 'SBERT-Cosine', ..."""
    if metric.family == "jaccard":
        return "Jaccard Similarity"
    if metric.family == "tfidf_cosine":
        return "TF-IDF-Cosine"
    return f"{metric.encoder_id}-{metric.measure.capitalize()}"


def table_row_order(metrics: Sequence[MetricSpec]) -> List[MetricSpec]:
    """Word-level metrics first, then embedding metrics grouped by encoder
    (encoders in first-appearance order, measures cosine/euclidean/manhattan)."""
    word = [m for m in metrics if m.family == "jaccard"]
    word += [m for m in metrics if m.family == "tfidf_cosine"]
    encoders: List[str] = []
    for m in metrics:
        if m.family == "embedding" and m.encoder_id not in encoders:
            encoders.append(m.encoder_id)
    embedding: List[MetricSpec] = []
    for enc in encoders:
        group = [m for m in metrics if m.family == "embedding" and m.encoder_id == enc]
        embedding.extend(sorted(group, key=lambda m: _MEASURE_ORDER[m.measure]))
    return word + embedding


@dataclass(frozen=True)
class CorrelationCell:
    drift_metric: MetricSpec
    perf_metric: str
    r: float
    p_value: float
    n: int
    stars: str

    def rendered(self) -> str:
        return annotate_significance(self.r, self.p_value)


@dataclass
class CorrelationGrid:
    rows: List[MetricSpec]
    columns: List[str]
    cells: Dict[Tuple[str, str], CorrelationCell]  # (metric canonical, column)

    def cell(self, metric: MetricSpec, column: str) -> CorrelationCell:
        try:
            return self.cells[(metric.canonical(), column)]
        except KeyError:
            raise DataError(f"no correlation cell for {metric.canonical()!r} x {column!r}") from None


def _column_label(dataset: str, perf_metric: str, single_dataset: bool) -> str:
    return perf_metric if single_dataset else f"{dataset}/{perf_metric}"


def build_correlation_table(drift: Sequence[DriftMeasurement],
                            changes: Sequence[PerformanceChange]) -> CorrelationGrid:
    """Pearson grid over every (drift metric, performance column) pair."""
    if not drift:
        raise DataError("no drift measurements supplied")
    if not changes:
        raise DataError("no performance changes supplied")

    by_key: Dict[Tuple[str, str, str], float] = {}
    metrics: List[MetricSpec] = []
    seen = set()
    for m in drift:
        by_key[(m.metric.canonical(), m.source_label, m.target_label)] = m.value
        if m.metric.canonical() not in seen:
            seen.add(m.metric.canonical())
            metrics.append(m.metric)

    def lookup(metric: MetricSpec, i: str, j: str) -> float:
        value = by_key.get((metric.canonical(), i, j))
        if value is None:
            value = by_key.get((metric.canonical(), j, i))
        if value is None:
            raise DataError(f"missing drift value for pair {i}-{j} "
                            f"under metric {metric.canonical()!r}")
        return value

    grouped: Dict[Tuple[str, str], List[PerformanceChange]] = {}
    for change in changes:
        grouped.setdefault((change.dataset, change.perf_metric), []).append(change)
    single_dataset = len({d for d, _ in grouped}) == 1

    rows = table_row_order(metrics)
    columns = [_column_label(d, p, single_dataset) for d, p in sorted(grouped)]
    cells: Dict[Tuple[str, str], CorrelationCell] = {}
    for (dataset, perf_metric), group in sorted(grouped.items()):
        column = _column_label(dataset, perf_metric, single_dataset)
        ordered = sorted(group, key=lambda c: (c.source_label, c.target_label))
        if len(ordered) < 3:
            raise DataError(f"column {column!r} has only {len(ordered)} pairs; need >= 3")
        for metric in rows:
            xs = [lookup(metric, c.source_label, c.target_label) for c in ordered]
            ys = [c.delta for c in ordered]
            r, p = pearson_correlation(xs, ys)
            cells[(metric.canonical(), column)] = CorrelationCell(
                drift_metric=metric, perf_metric=column,
                r=r, p_value=p, n=len(ordered), stars=stars_for(p))
    return CorrelationGrid(rows=rows, columns=columns, cells=cells)
