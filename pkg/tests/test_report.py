import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from tempdrift.correlation import CorrelationCell, CorrelationGrid, stars_for
from tempdrift.drift import MetricSpec
from tempdrift.errors import DataError
from tempdrift.report import (
    MatrixView,
    read_matrix_csv,
    render_correlation_markdown,
    render_heatmap_svg,
    write_correlation_csv,
    write_matrix_csv,
)

LABELS = ["T1", "T2", "T3", "T4"]


def sim_view(values=None, mask=None):
    if values is None:
        values = np.eye(4) * 0.5 + 0.5 - 0.05 * np.arange(16).reshape(4, 4) / 16
        values = (values + values.T) / 2
    return MatrixView(row_labels=LABELS, col_labels=list(LABELS),
                      values=np.asarray(values), value_kind="similarity", mask=mask)


class TestHeatmapSvg:
    def test_well_formed_xml_and_deterministic(self, tmp_path):
        view = sim_view()
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        render_heatmap_svg(view, p1)
        render_heatmap_svg(view, p2)
        assert p1.read_bytes() == p2.read_bytes()
        root = ET.parse(p1).getroot()
        assert root.tag.endswith("svg")

    def test_constant_matrix_single_color(self, tmp_path):
        view = MatrixView(LABELS, list(LABELS), np.full((4, 4), 0.7), "similarity")
        path = tmp_path / "c.svg"
        render_heatmap_svg(view, path)
        fills = set(re.findall(r'<rect[^>]*fill="(#\w{6})"', path.read_text()))
        assert len(fills) == 1

    def test_diagonal_darkest_for_identity_similarity(self, tmp_path):
        values = np.full((4, 4), 0.2)
        np.fill_diagonal(values, 1.0)
        view = MatrixView(LABELS, list(LABELS), values, "similarity")
        path = tmp_path / "d.svg"
        render_heatmap_svg(view, path)
        rects = re.findall(r'<rect[^>]*fill="(#\w{6})"', path.read_text())
        grid = np.array([int(c[1:], 16) for c in rects]).reshape(4, 4)
        # darker color = numerically smaller hex triple; diagonal darkest
        off_diag_min = min(grid[i, j] for i in range(4) for j in range(4) if i != j)
        assert all(grid[i, i] < off_diag_min for i in range(4))

    def test_cell_values_printed_and_symmetric(self, tmp_path):
        view = sim_view()
        path = tmp_path / "s.svg"
        render_heatmap_svg(view, path)
        text = path.read_text()
        for i in range(4):
            for j in range(4):
                assert f"{view.values[i, j]:.3f}" in text

    def test_star_glyphs_on_mask(self, tmp_path):
        mask = np.zeros((4, 4), dtype=bool)
        mask[0, 1] = True
        view = sim_view(mask=mask)
        path = tmp_path / "m.svg"
        render_heatmap_svg(view, path)
        assert f"{view.values[0, 1]:.3f}*" in path.read_text()

    def test_non_finite_rejected(self, tmp_path):
        values = np.ones((4, 4))
        values[1, 1] = np.nan
        view = MatrixView(LABELS, list(LABELS), values, "similarity")
        with pytest.raises(DataError, match="finite"):
            render_heatmap_svg(view, tmp_path / "x.svg")


class TestMatrixCsv:
    def test_round_trip_bit_equal(self, tmp_path):
        rng = np.random.default_rng(7)
        values = rng.standard_normal((4, 4)) * 1e-3 + 1 / 3
        view = MatrixView(LABELS, list(LABELS), values, "delta")
        path = tmp_path / "m.csv"
        write_matrix_csv(view, path)
        back = read_matrix_csv(path)
        assert back.row_labels == LABELS and back.col_labels == LABELS
        assert np.array_equal(back.values, values)

    def test_header_layout(self, tmp_path):
        view = sim_view()
        path = tmp_path / "m.csv"
        write_matrix_csv(view, path)
        assert path.read_text().splitlines()[0] == ",T1,T2,T3,T4"

    def test_stars_companion_emitted(self, tmp_path):
        mask = np.zeros((4, 4), dtype=bool)
        mask[2, 3] = True
        view = MatrixView(LABELS, list(LABELS), np.ones((4, 4)), "delta", mask=mask)
        write_matrix_csv(view, tmp_path / "deltas_F1.csv")
        stars = (tmp_path / "deltas_F1_stars.csv").read_text().splitlines()
        assert stars[0] == ",T1,T2,T3,T4"
        assert stars[3].split(",")[4] == "true"

    def test_shape_validation(self):
        with pytest.raises(DataError):
            MatrixView(LABELS, LABELS, np.ones((3, 4)), "delta")
        with pytest.raises(DataError):
            MatrixView(LABELS, LABELS, np.ones((4, 4)), "volume")


def small_grid():
    rows = [MetricSpec("jaccard"), MetricSpec("embedding", "USE", "euclidean")]
    columns = ["F1", "Precision"]
    cells = {}
    data = {("jaccard", "F1"): (0.68, 0.03), ("jaccard", "Precision"): (0.36, 0.2),
            ("embedding/USE/euclidean", "F1"): (-0.74, 0.03),
            ("embedding/USE/euclidean", "Precision"): (-0.79, 0.0005)}
    for metric in rows:
        for column in columns:
            r, p = data[(metric.canonical(), column)]
            cells[(metric.canonical(), column)] = CorrelationCell(
                drift_metric=metric, perf_metric=column, r=r, p_value=p, n=12,
                stars=stars_for(p))
    return CorrelationGrid(rows=rows, columns=columns, cells=cells)


class TestCorrelationRendering:
    def test_markdown_layout(self, tmp_path):
        path = tmp_path / "corr.md"
        render_correlation_markdown(small_grid(), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "| Metrics | F1 | Precision |"
        assert lines[2] == "| Jaccard Similarity | .68* | .36 |"
        assert lines[3] == "| USE-Euclidean | -.74* | -.79** |"

    def test_empty_columns_error(self, tmp_path):
        grid = CorrelationGrid(rows=[MetricSpec("jaccard")], columns=[], cells={})
        with pytest.raises(DataError, match="nothing to render"):
            render_correlation_markdown(grid, tmp_path / "x.md")

    def test_csv_round_trip_values(self, tmp_path):
        path = tmp_path / "corr.csv"
        write_correlation_csv(small_grid(), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "drift_family,encoder_id,measure,perf_metric,r,p,n,stars"
        assert len(lines) == 5
        assert "jaccard,,,F1,0.68,0.03,12,*" in lines[1]
