import math

import pytest

from tempdrift.errors import DataError, DegenerateDataError
from tempdrift.perf import (
    PerformanceLedger,
    PerformanceRecord,
    change_significance,
    load_performance,
    performance_change,
)

LABELS = ["T1", "T2", "T3", "T4"]


def rec(dataset, metric, i, j, run, score):
    return PerformanceRecord(dataset=dataset, perf_metric=metric, train_domain=i,
                             test_domain=j, run_index=run, score=score)


def full_grid_rows(runs=5, dataset="mimic", metric="F1"):
    rows = []
    for i in LABELS:
        for j in LABELS:
            for r in range(1, runs + 1):
                score = 0.8 - 0.02 * abs(LABELS.index(i) - LABELS.index(j)) + 0.001 * r
                rows.append(f"{dataset},{metric},{i},{j},{r},{score}")
    return rows


def write_csv(path, rows):
    header = "dataset,perf_metric,train_domain,test_domain,run_index,score"
    path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")


class TestLoadPerformance:
    def test_full_grid(self, tmp_path):
        path = tmp_path / "perf.csv"
        write_csv(path, full_grid_rows())
        ledger = load_performance(path)
        assert len(ledger.records) == 4 * 4 * 5
        assert len(ledger.cross_cells()) == 12
        assert ledger.datasets() == ["mimic"]
        assert all(len(ledger.cell_runs("mimic", "F1", i, j)) == 5
                   for _, _, i, j in ledger.cross_cells())

    def test_missing_in_domain_cell(self, tmp_path):
        rows = [r for r in full_grid_rows() if not r.startswith("mimic,F1,T3,T3")]
        path = tmp_path / "perf.csv"
        write_csv(path, rows)
        with pytest.raises(DataError, match=r"\(T3, T3\) is missing"):
            load_performance(path)

    def test_unequal_run_counts_warn_then_error(self, tmp_path):
        rows = full_grid_rows() + ["mimic,F1,T1,T2,6,0.9"]
        path = tmp_path / "perf.csv"
        write_csv(path, rows)
        with pytest.warns(UserWarning, match="run counts differ"):
            load_performance(path)
        with pytest.raises(DataError, match="run counts differ"):
            load_performance(path, strict=True)

    def test_duplicate_key(self, tmp_path):
        rows = full_grid_rows() + ["mimic,F1,T1,T2,1,0.5"]
        path = tmp_path / "perf.csv"
        write_csv(path, rows)
        with pytest.raises(DataError, match="duplicate record"):
            load_performance(path)

    def test_bad_header_and_types(self, tmp_path):
        path = tmp_path / "perf.csv"
        path.write_text("nope\n", encoding="utf-8")
        with pytest.raises(DataError, match="bad header"):
            load_performance(path)
        write_csv(path, ["mimic,F1,T1,T1,one,0.5"])
        with pytest.raises(DataError, match="perf.csv:2"):
            load_performance(path)

    def test_round_trip_is_lossless(self, tmp_path):
        path = tmp_path / "perf.csv"
        write_csv(path, full_grid_rows())
        ledger = load_performance(path)
        out = tmp_path / "echo.csv"
        ledger.to_csv(out)
        again = load_performance(out)
        assert set(ledger.records) == set(again.records)
        out2 = tmp_path / "echo2.csv"
        again.to_csv(out2)
        assert out.read_bytes() == out2.read_bytes()


class TestPerformanceChange:
    def ledger(self):
        records = []
        for run, score in enumerate([0.70, 0.72, 0.71, 0.69, 0.73], start=1):
            records.append(rec("d", "F1", "T1", "T3", run, score))
        for run, score in enumerate([0.80, 0.79, 0.81, 0.80, 0.80], start=1):
            records.append(rec("d", "F1", "T3", "T3", run, score))
        return PerformanceLedger(records)

    def test_hand_means(self):
        change = performance_change(self.ledger(), "d", "F1", "T1", "T3")
        assert change.delta == pytest.approx(-0.09, abs=1e-12)

    def test_identical_cells_zero_delta(self):
        records = [rec("d", "F1", "T1", "T2", r, 0.5) for r in range(1, 4)]
        records += [rec("d", "F1", "T2", "T2", r, 0.5) for r in range(1, 4)]
        change = performance_change(PerformanceLedger(records), "d", "F1", "T1", "T2")
        assert change.delta == 0.0

    def test_positive_delta_means_improvement(self):
        records = [rec("d", "F1", "T1", "T2", r, 0.9) for r in range(1, 3)]
        records += [rec("d", "F1", "T2", "T2", r, 0.5) for r in range(1, 3)]
        change = performance_change(PerformanceLedger(records), "d", "F1", "T1", "T2")
        assert change.delta > 0

    def test_sign_convention(self):
        ledger = self.ledger()
        cross = ledger.cell_runs("d", "F1", "T1", "T3")
        indom = ledger.cell_runs("d", "F1", "T3", "T3")
        delta = performance_change(ledger, "d", "F1", "T1", "T3").delta
        assert delta == -(sum(indom) / 5 - sum(cross) / 5)

    def test_missing_cell_and_diagonal(self):
        ledger = self.ledger()
        with pytest.raises(DataError, match="missing performance cell"):
            performance_change(ledger, "d", "F1", "T2", "T3")
        with pytest.raises(DataError, match="i != j"):
            performance_change(ledger, "d", "F1", "T3", "T3")


class TestChangeSignificance:
    def test_identical_runs_not_significant(self):
        records = [rec("d", "F1", "T1", "T2", r, s)
                   for r, s in enumerate([0.5, 0.6, 0.7], start=1)]
        records += [rec("d", "F1", "T2", "T2", r, s)
                    for r, s in enumerate([0.5, 0.6, 0.7], start=1)]
        res = change_significance(PerformanceLedger(records), "d", "F1", "T1", "T2")
        assert res.statistic == 0.0 and res.p_value == 1.0 and not res.significant

    def test_zero_variance_unequal_means(self):
        records = [rec("d", "F1", "T1", "T2", r, 0.1) for r in range(1, 6)]
        records += [rec("d", "F1", "T2", "T2", r, 0.9) for r in range(1, 6)]
        res = change_significance(PerformanceLedger(records), "d", "F1", "T1", "T2")
        assert res.zero_variance and res.p_value == 0.0 and res.significant
        assert res.statistic == -math.inf and res.df == 8.0

    def test_zero_variance_equal_means_degenerate(self):
        records = [rec("d", "F1", "T1", "T2", r, 0.4) for r in range(1, 6)]
        records += [rec("d", "F1", "T2", "T2", r, 0.4) for r in range(1, 6)]
        with pytest.raises(DegenerateDataError, match="identical"):
            change_significance(PerformanceLedger(records), "d", "F1", "T1", "T2")

    def test_clearly_separated_noisy_runs(self):
        cross = [0.095, 0.102, 0.099, 0.105, 0.101]
        indom = [0.905, 0.895, 0.9, 0.91, 0.892]
        records = [rec("d", "F1", "T1", "T2", r, s) for r, s in enumerate(cross, start=1)]
        records += [rec("d", "F1", "T2", "T2", r, s) for r, s in enumerate(indom, start=1)]
        res = change_significance(PerformanceLedger(records), "d", "F1", "T1", "T2")
        assert res.significant and res.p_value < 0.05

    def test_symmetric_under_swap(self):
        a = [0.1, 0.2, 0.3, 0.25, 0.18]
        b = [0.4, 0.35, 0.5, 0.42, 0.39]
        records = [rec("d", "F1", "T1", "T2", r, s) for r, s in enumerate(a, start=1)]
        records += [rec("d", "F1", "T2", "T2", r, s) for r, s in enumerate(b, start=1)]
        records += [rec("d", "F1", "T2", "T1", r, s) for r, s in enumerate(b, start=1)]
        records += [rec("d", "F1", "T1", "T1", r, s) for r, s in enumerate(a, start=1)]
        ledger = PerformanceLedger(records)
        fwd = change_significance(ledger, "d", "F1", "T1", "T2")
        rev = change_significance(ledger, "d", "F1", "T2", "T1")
        assert fwd.p_value == rev.p_value
        assert fwd.statistic == -rev.statistic

    def test_needs_two_runs(self):
        records = [rec("d", "F1", "T1", "T2", 1, 0.5),
                   rec("d", "F1", "T2", "T2", 1, 0.6)]
        with pytest.raises(DataError, match=">= 2 runs"):
            change_significance(PerformanceLedger(records), "d", "F1", "T1", "T2")
