"""Ingestion of externally produced model scores and performance changes.

Scores are never computed here: the evaluation harness that trained and
scored the models writes one CSV row per (dataset, perf_metric, train_domain,
test_domain, run_index). This module validates the grid, computes performance
changes delta = mean(cross runs) - mean(in-domain runs), and tests their
significance. Negative delta means degradation when moving across time.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .errors import DataError, DegenerateDataError
from .stats import TestResult, welch_t_test

CellKey = Tuple[str, str, str, str]  # dataset, perf_metric, train_domain, test_domain

_CSV_HEADER = ["dataset", "perf_metric", "train_domain", "test_domain", "run_index", "score"]


@dataclass(frozen=True)
class PerformanceRecord:
    dataset: str
    perf_metric: str
    train_domain: str
    test_domain: str
    run_index: int
    score: float

    def __post_init__(self):
        if self.run_index < 1:
            raise DataError("run_index must be >= 1")
        if not math.isfinite(self.score):
            raise DataError("score must be finite")


@dataclass(frozen=True)
class PerformanceChange:
    dataset: str
    perf_metric: str
    source_label: str
    target_label: str
    delta: float
    test: Optional[TestResult] = None

    def __post_init__(self):
        if self.source_label == self.target_label:
            raise DataError("performance change is defined for i != j only")
        if not math.isfinite(self.delta):
            raise DataError("delta must be finite")


class PerformanceLedger:
    """Immutable grid of scores indexed by (dataset, metric, train, test)."""

    def __init__(self, records: List[PerformanceRecord]):
        cells: Dict[CellKey, Dict[int, float]] = {}
        for rec in records:
            key = (rec.dataset, rec.perf_metric, rec.train_domain, rec.test_domain)
            runs = cells.setdefault(key, {})
            if rec.run_index in runs:
                raise DataError(f"duplicate record {key + (rec.run_index,)}")
            runs[rec.run_index] = rec.score
        self._records = tuple(records)
        self._cells = cells

    @property
    def records(self) -> tuple:
        return self._records

    def cell_runs(self, dataset: str, perf_metric: str, train: str, test: str) -> List[float]:
        """Scores for one cell, in run_index order."""
        key = (dataset, perf_metric, train, test)
        runs = self._cells.get(key)
        if runs is None:
            raise DataError(f"missing performance cell {key}")
        return [runs[i] for i in sorted(runs)]

    def has_cell(self, dataset: str, perf_metric: str, train: str, test: str) -> bool:
        return (dataset, perf_metric, train, test) in self._cells

    def cross_cells(self) -> List[CellKey]:
        """All (dataset, metric, i, j) keys with i != j, in canonical order."""
        return sorted(k for k in self._cells if k[2] != k[3])

    def datasets(self) -> List[str]:
        return sorted({k[0] for k in self._cells})

    def perf_metrics(self, dataset: str) -> List[str]:
        return sorted({k[1] for k in self._cells if k[0] == dataset})

    def domain_labels(self, dataset: str, perf_metric: str) -> List[str]:
        labels = {k[2] for k in self._cells if k[:2] == (dataset, perf_metric)}
        labels |= {k[3] for k in self._cells if k[:2] == (dataset, perf_metric)}
        return sorted(labels)

    def validate(self, strict: bool = False) -> None:
        """Check in-domain coverage and run-count balance."""
        counts = {key: len(runs) for key, runs in self._cells.items()}
        for dataset, metric, i, j in self.cross_cells():
            if (dataset, metric, j, j) not in self._cells:
                raise DataError(f"cell ({dataset}, {metric}, {i}, {j}) present but "
                                f"in-domain cell ({j}, {j}) is missing")
            n_cross = counts[(dataset, metric, i, j)]
            n_in = counts[(dataset, metric, j, j)]
            if n_cross != n_in:
                msg = (f"run counts differ for ({dataset}, {metric}): "
                       f"{i}->{j} has {n_cross}, {j}->{j} has {n_in}")
                if strict:
                    raise DataError(msg)
                warnings.warn(msg, stacklevel=2)

    def to_csv(self, path: Union[str, Path]) -> None:
        """Canonical re-serialization: rows sorted by key, scores via repr."""
        rows = sorted(
            (r.dataset, r.perf_metric, r.train_domain, r.test_domain, r.run_index, r.score)
            for r in self._records)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_HEADER)
            for row in rows:
                writer.writerow([*row[:5], repr(row[5])])


def load_performance(path: Union[str, Path], strict: bool = False) -> PerformanceLedger:
    path = Path(path)
    if not path.exists():
        raise DataError(f"performance file not found: {path}")
    records: List[PerformanceRecord] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path.name}: empty CSV") from None
        if header != _CSV_HEADER:
            raise DataError(f"{path.name}: bad header {header!r}, expected {_CSV_HEADER!r}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(_CSV_HEADER):
                raise DataError(f"{path.name}:{lineno}: expected {len(_CSV_HEADER)} fields")
            try:
                rec = PerformanceRecord(
                    dataset=row[0], perf_metric=row[1], train_domain=row[2],
                    test_domain=row[3], run_index=int(row[4]), score=float(row[5]))
            except ValueError as exc:
                raise DataError(f"{path.name}:{lineno}: {exc}") from exc
            records.append(rec)
    ledger = PerformanceLedger(records)
    ledger.validate(strict=strict)
    return ledger


def performance_change(ledger: PerformanceLedger, dataset: str, perf_metric: str,
                       i: str, j: str) -> PerformanceChange:
    """delta = mean(p_ij runs) - mean(p_jj runs)."""
    if i == j:
        raise DataError("performance change needs i != j")
    cross = ledger.cell_runs(dataset, perf_metric, i, j)
    indom = ledger.cell_runs(dataset, perf_metric, j, j)
    delta = sum(cross) / len(cross) - sum(indom) / len(indom)
    return PerformanceChange(dataset=dataset, perf_metric=perf_metric,
                             source_label=i, target_label=j, delta=delta)


def change_significance(ledger: PerformanceLedger, dataset: str, perf_metric: str,
                        i: str, j: str, equal_variance: bool = False) -> TestResult:
    """Welch test of the cross runs against the in-domain runs.

    Deterministic harnesses can produce identical runs in both cells; zero
    variance with unequal means is reported as p = 0 with the zero_variance
    flag instead of erroring.
    """
    cross = ledger.cell_runs(dataset, perf_metric, i, j)
    indom = ledger.cell_runs(dataset, perf_metric, j, j)
    if len(cross) < 2 or len(indom) < 2:
        raise DataError(f"cells ({dataset}, {perf_metric}, {i}->{j}) need >= 2 runs")
    mean_cross = sum(cross) / len(cross)
    mean_in = sum(indom) / len(indom)
    var_cross = sum((x - mean_cross) ** 2 for x in cross)
    var_in = sum((x - mean_in) ** 2 for x in indom)
    if var_cross == 0.0 and var_in == 0.0:
        if mean_cross == mean_in:
            raise DegenerateDataError(
                f"all runs identical in both cells ({dataset}, {perf_metric}, {i}->{j})")
        t = math.inf if mean_cross > mean_in else -math.inf
        return TestResult(statistic=t, df=float(len(cross) + len(indom) - 2),
                          p_value=0.0, significant=True, zero_variance=True)
    return welch_t_test(cross, indom, equal_variance=equal_variance)
