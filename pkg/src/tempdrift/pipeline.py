"""Configuration and staged pipeline orchestration.

The pipeline runs as composable stages (ingest, segment, drift, perf,
correlate, report); every stage reads its inputs from files written by the
previous stage and writes plain CSV/JSON, so running stages individually is
byte-identical to ``run_pipeline`` by construction, and any stage can be
swapped for external tooling.

Determinism: outputs are a pure function of (config, input files, master
seed). Timestamps appear only in run_summary.json. Worker-thread count never
changes results because every observation carries its own derived seed.
"""

from __future__ import annotations

import csv
import hashlib
import json
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .corpus import (
    Corpus,
    DateRange,
    SplitManifest,
    TemporalDomain,
    equalize_domains,
    load_corpus,
    segment_domains,
    split_train_test,
)
from .correlation import CorrelationCell, CorrelationGrid, build_correlation_table
from .drift import DriftContext, DriftMeasurement, EmbeddingTable, MetricSpec, load_embedding_table
from .errors import ConfigError, DataError, TempdriftError
from .lexical import TokenizerConfig
from .perf import PerformanceChange, change_significance, load_performance, performance_change
from .report import (
    MatrixView,
    render_correlation_markdown,
    render_heatmap_svg,
    write_correlation_csv,
    write_matrix_csv,
)
from .rng import derive_seed
from .stats import (
    ObservationSet,
    cross_domain_observations,
    drift_significance,
    in_domain_observations,
)

STAGES = ("ingest", "segment", "drift", "perf", "correlate", "report")

MAX_SEED = (1 << 64) - 1


@dataclass
class RunConfig:
    corpus_path: str
    segmentation: Union[Dict[str, int], List[DateRange]]
    master_seed: int
    metrics: List[MetricSpec]
    corpus_format: str = "jsonl"
    test_fraction: float = 0.2
    equalize: bool = True
    drift_split: str = "all"
    embedding_paths: Dict[str, str] = field(default_factory=dict)
    observations_k: int = 15
    performance_path: Optional[str] = None
    correlate_with: str = "one_shot"
    strict_assignment: bool = False
    output_dir: str = "out"
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    threads: int = 1

    def __post_init__(self):
        if not 0 <= self.master_seed <= MAX_SEED:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if not self.metrics:
            raise ConfigError("metrics list must not be empty")
        if self.observations_k < 2:
            raise ConfigError("observations_k must be >= 2")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must be in (0,1)")
        if self.drift_split not in ("all", "train"):
            raise ConfigError(f"drift_split must be all|train, got {self.drift_split!r}")
        if self.correlate_with not in ("one_shot", "obs_mean"):
            raise ConfigError(f"correlate_with must be one_shot|obs_mean, "
                              f"got {self.correlate_with!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        for metric in self.metrics:
            if metric.family == "embedding" and metric.encoder_id not in self.embedding_paths:
                raise ConfigError(f"metric {metric.canonical()!r} has no "
                                  f"embedding_paths entry for {metric.encoder_id!r}")

    def canonical_dict(self) -> dict:
        """Resolved config for hashing; excludes output_dir and threads, which
        must not affect the produced bytes."""
        if isinstance(self.segmentation, dict):
            seg = {"strategy": "labels", "labels": dict(sorted(self.segmentation.items()))}
        else:
            seg = {"strategy": "date_ranges",
                   "ranges": [{"label": r.label, "start": r.start.isoformat(),
                               "end": r.end.isoformat()} for r in self.segmentation]}
        return {
            "corpus_path": self.corpus_path,
            "corpus_format": self.corpus_format,
            "segmentation": seg,
            "master_seed": self.master_seed,
            "test_fraction": self.test_fraction,
            "equalize": self.equalize,
            "drift_split": self.drift_split,
            "metrics": [m.canonical() for m in self.metrics],
            "embedding_paths": dict(sorted(self.embedding_paths.items())),
            "observations_k": self.observations_k,
            "performance_path": self.performance_path,
            "correlate_with": self.correlate_with,
            "strict_assignment": self.strict_assignment,
            "tokenizer": {"lowercase": self.tokenizer.lowercase,
                          "min_token_len": self.tokenizer.min_token_len},
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def _require(raw: dict, key: str):
    if key not in raw:
        raise ConfigError(f"config is missing required field {key!r}")
    return raw[key]


def _parse_segmentation(raw) -> Union[Dict[str, int], List[DateRange]]:
    if not isinstance(raw, dict) or "strategy" not in raw:
        raise ConfigError("segmentation must be an object with a 'strategy' field")
    strategy = raw["strategy"]
    if strategy == "labels":
        labels = raw.get("labels")
        if not isinstance(labels, dict) or not labels:
            raise ConfigError("labels segmentation needs a nonempty 'labels' map")
        return {str(k): int(v) for k, v in labels.items()}
    if strategy == "date_ranges":
        ranges = raw.get("ranges")
        if not isinstance(ranges, list) or not ranges:
            raise ConfigError("date_ranges segmentation needs a nonempty 'ranges' list")
        out = []
        for i, r in enumerate(ranges):
            try:
                out.append(DateRange(label=str(r["label"]),
                                     start=_iso_date(r["start"]),
                                     end=_iso_date(r["end"])))
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"range {i}: needs label, start, end") from exc
            except DataError as exc:
                raise ConfigError(f"range {i}: {exc}") from exc
        return out
    raise ConfigError(f"unknown segmentation strategy {strategy!r}")


def _iso_date(value):
    from datetime import date
    try:
        return date.fromisoformat(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad date {value!r} (expected YYYY-MM-DD)") from exc


def _parse_metric(raw) -> MetricSpec:
    try:
        if isinstance(raw, str):
            return MetricSpec.from_string(raw)
        if isinstance(raw, dict):
            return MetricSpec(family=raw.get("family"), encoder_id=raw.get("encoder_id"),
                              measure=raw.get("measure"))
    except DataError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"cannot parse metric {raw!r}")


def load_config(path: Union[str, Path], overrides: Optional[dict] = None) -> RunConfig:
    """Parse and validate a JSON config file; flag overrides win over fields."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path.name}: malformed JSON ({exc.msg})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path.name}: top level must be a JSON object")
    raw = dict(raw)
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})

    corpus_path = str(_require(raw, "corpus_path"))
    corpus_format = raw.get("corpus_format")
    if corpus_format is None:
        corpus_format = "csv" if corpus_path.endswith(".csv") else "jsonl"
    if corpus_format not in ("jsonl", "csv"):
        raise ConfigError(f"corpus_format must be jsonl|csv, got {corpus_format!r}")
    segmentation = _parse_segmentation(_require(raw, "segmentation"))
    master_seed = _require(raw, "master_seed")
    if not isinstance(master_seed, int):
        raise ConfigError("master_seed must be an integer")
    metrics = [_parse_metric(m) for m in _require(raw, "metrics")]
    tok_raw = raw.get("tokenizer", {})
    tokenizer = TokenizerConfig(lowercase=bool(tok_raw.get("lowercase", True)),
                                min_token_len=int(tok_raw.get("min_token_len", 1)))
    try:
        config = RunConfig(
            corpus_path=corpus_path,
            corpus_format=corpus_format,
            segmentation=segmentation,
            master_seed=master_seed,
            metrics=metrics,
            test_fraction=float(raw.get("test_fraction", 0.2)),
            equalize=bool(raw.get("equalize", True)),
            drift_split=str(raw.get("drift_split", "all")),
            embedding_paths={str(k): str(v)
                             for k, v in raw.get("embedding_paths", {}).items()},
            observations_k=int(raw.get("observations_k", 15)),
            performance_path=(str(raw["performance_path"])
                              if raw.get("performance_path") else None),
            correlate_with=str(raw.get("correlate_with", "one_shot")),
            strict_assignment=bool(raw.get("strict_assignment", False)),
            output_dir=str(raw.get("output_dir", "out")),
            tokenizer=tokenizer,
            threads=int(raw.get("threads", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc

    base = path.parent
    config.corpus_path = str(_resolve(base, config.corpus_path))
    config.embedding_paths = {k: str(_resolve(base, v))
                              for k, v in config.embedding_paths.items()}
    if config.performance_path:
        config.performance_path = str(_resolve(base, config.performance_path))

    if not Path(config.corpus_path).exists():
        raise ConfigError(f"corpus_path does not exist: {config.corpus_path}")
    for enc, p in config.embedding_paths.items():
        if not Path(p).exists():
            raise ConfigError(f"embedding_paths[{enc!r}] does not exist: {p}")
    if config.performance_path and not Path(config.performance_path).exists():
        raise ConfigError(f"performance_path does not exist: {config.performance_path}")
    return config


def _resolve(base: Path, p: str) -> Path:
    path = Path(p)
    return path if path.is_absolute() else base / path


# --------------------------------------------------------------------------
# Stage plumbing
# --------------------------------------------------------------------------

def _out(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _safe_name(label: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in label)


def _fmt(value: float) -> str:
    return repr(float(value))


def stage_ingest(config: RunConfig) -> Corpus:
    corpus = load_corpus(config.corpus_path, config.corpus_format)
    _write_json(_out(config) / "ingest_summary.json", {
        "corpus_path": config.corpus_path,
        "corpus_format": config.corpus_format,
        "documents": len(corpus),
    })
    return corpus


def stage_segment(config: RunConfig) -> None:
    corpus = load_corpus(config.corpus_path, config.corpus_format)
    result = segment_domains(corpus, config.segmentation, config.strict_assignment)
    original_sizes = {d.label: len(d) for d in result.domains}
    domains = result.domains
    if config.equalize:
        domains = equalize_domains(domains, config.master_seed)
    out = _out(config)
    payload = {
        "equalized": config.equalize,
        "original_sizes": original_sizes,
        "skipped_ids": sorted(result.skipped_ids),
        "domains": [{
            "label": d.label,
            "ordinal": d.ordinal,
            "doc_ids": list(d.doc_ids),
            "date_range": ({"label": d.date_range.label,
                            "start": d.date_range.start.isoformat(),
                            "end": d.date_range.end.isoformat()}
                           if d.date_range else None),
        } for d in domains],
    }
    _write_json(out / "domains.json", payload)
    manifest_dir = out / "manifests"
    manifest_dir.mkdir(exist_ok=True)
    for domain in domains:
        seed = derive_seed(config.master_seed, f"split/{domain.label}")
        manifest = split_train_test(domain, config.test_fraction, seed)
        (manifest_dir / f"split_{_safe_name(domain.label)}.json").write_text(
            manifest.to_json(), encoding="utf-8")


def read_domains(config: RunConfig) -> List[TemporalDomain]:
    path = _out(config) / "domains.json"
    if not path.exists():
        raise DataError(f"{path} not found; run the segment stage first")
    raw = json.loads(path.read_text(encoding="utf-8"))
    domains = []
    for d in raw["domains"]:
        date_range = None
        if d.get("date_range"):
            r = d["date_range"]
            date_range = DateRange(label=r["label"], start=_iso_date(r["start"]),
                                   end=_iso_date(r["end"]))
        domains.append(TemporalDomain(label=d["label"], ordinal=d["ordinal"],
                                      doc_ids=list(d["doc_ids"]), date_range=date_range))
    return sorted(domains, key=lambda d: d.ordinal)


def read_manifest(config: RunConfig, label: str) -> SplitManifest:
    path = _out(config) / "manifests" / f"split_{_safe_name(label)}.json"
    if not path.exists():
        raise DataError(f"{path} not found; run the segment stage first")
    return SplitManifest.from_json(path.read_text(encoding="utf-8"))


def _drift_domains(config: RunConfig) -> List[TemporalDomain]:
    """Domains as measured: the full equalized domain, or its train side."""
    domains = read_domains(config)
    if config.drift_split == "all":
        return domains
    filtered = []
    for domain in domains:
        train = set(read_manifest(config, domain.label).train_ids)
        kept = [i for i in domain.doc_ids if i in train]
        filtered.append(TemporalDomain(label=domain.label, ordinal=domain.ordinal,
                                       doc_ids=kept, date_range=domain.date_range))
    return filtered


def _load_tables(config: RunConfig) -> Dict[str, EmbeddingTable]:
    return {enc: load_embedding_table(path, encoder_id=enc)
            for enc, path in sorted(config.embedding_paths.items())}


def _map_tasks(config: RunConfig, fn, tasks: list) -> list:
    if config.threads == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(fn, tasks))


def stage_drift(config: RunConfig) -> None:
    corpus = load_corpus(config.corpus_path, config.corpus_format)
    domains = _drift_domains(config)
    ctx = DriftContext(corpus, config.tokenizer, _load_tables(config))
    out = _out(config)

    unordered = [(a, b) for i, a in enumerate(domains) for b in domains[i + 1:]]
    oneshot_tasks = [(metric, a, b) for metric in config.metrics for a, b in unordered]

    def run_oneshot(task):
        metric, dom_a, dom_b = task
        return ctx.measure_ids(dom_a.doc_ids, dom_b.doc_ids, metric, dom_a.label, dom_b.label)

    measurements = _map_tasks(config, run_oneshot, oneshot_tasks)
    with open(out / "drift_oneshot.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "metric_family", "encoder_id",
                         "measure", "kind", "value"])
        for m in measurements:
            writer.writerow([m.source_label, m.target_label, m.metric.family,
                             m.metric.encoder_id or "", m.metric.measure or "",
                             m.metric.kind, _fmt(m.value)])

    ordered = [(a, b) for a in domains for b in domains if a.label != b.label]
    cross_tasks = [(metric, a, b) for metric in config.metrics for a, b in ordered]
    indom_tasks = [(metric, d) for metric in config.metrics for d in domains]

    def run_cross(task):
        metric, dom_a, dom_b = task
        return cross_domain_observations(dom_a, dom_b, metric, ctx,
                                         k=config.observations_k,
                                         master_seed=config.master_seed)

    def run_indom(task):
        metric, dom = task
        return in_domain_observations(dom, metric, ctx,
                                      k=config.observations_k,
                                      master_seed=config.master_seed)

    cross_sets: List[ObservationSet] = _map_tasks(config, run_cross, cross_tasks)
    indom_sets: List[ObservationSet] = _map_tasks(config, run_indom, indom_tasks)

    with open(out / "observations.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "metric", "mode", "obs_index", "value"])
        for obs in cross_sets + indom_sets:
            for n, value in enumerate(obs.values, start=1):
                writer.writerow([obs.pair[0], obs.pair[1], obs.metric.canonical(),
                                 obs.mode, n, _fmt(value)])

    indom_by_key = {(s.metric.canonical(), s.pair[1]): s for s in indom_sets}
    with open(out / "drift_tests.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "metric", "t", "df", "p", "significant"])
        for cross in cross_sets:
            indom = indom_by_key[(cross.metric.canonical(), cross.pair[1])]
            test = drift_significance(cross, indom)
            writer.writerow([cross.pair[0], cross.pair[1], cross.metric.canonical(),
                             _fmt(test.statistic), _fmt(test.df), _fmt(test.p_value),
                             "true" if test.significant else "false"])


def stage_perf(config: RunConfig) -> None:
    if not config.performance_path:
        return
    ledger = load_performance(config.performance_path, strict=config.strict_assignment)
    out = _out(config)
    with open(out / "perf_changes.csv", "w", encoding="utf-8", newline="") as fh, \
            open(out / "perf_run_deltas.csv", "w", encoding="utf-8", newline="") as fh_runs:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "perf_metric", "source", "target", "delta",
                         "t", "df", "p", "significant", "zero_variance"])
        run_writer = csv.writer(fh_runs)
        run_writer.writerow(["dataset", "perf_metric", "source", "target",
                             "run_index", "cross_score", "delta_vs_in_mean"])
        for dataset, perf_metric, i, j in ledger.cross_cells():
            change = performance_change(ledger, dataset, perf_metric, i, j)
            test = change_significance(ledger, dataset, perf_metric, i, j)
            writer.writerow([dataset, perf_metric, i, j, _fmt(change.delta),
                             _fmt(test.statistic), _fmt(test.df), _fmt(test.p_value),
                             "true" if test.significant else "false",
                             "true" if test.zero_variance else "false"])
            indom_runs = ledger.cell_runs(dataset, perf_metric, j, j)
            in_mean = sum(indom_runs) / len(indom_runs)
            for run_index, score in enumerate(ledger.cell_runs(dataset, perf_metric, i, j),
                                              start=1):
                run_writer.writerow([dataset, perf_metric, i, j, run_index,
                                     _fmt(score), _fmt(score - in_mean)])


def read_drift_oneshot(config: RunConfig) -> List[DriftMeasurement]:
    path = _out(config) / "drift_oneshot.csv"
    if not path.exists():
        raise DataError(f"{path} not found; run the drift stage first")
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            metric = MetricSpec(family=row["metric_family"],
                                encoder_id=row["encoder_id"] or None,
                                measure=row["measure"] or None)
            out.append(DriftMeasurement(source_label=row["source"],
                                        target_label=row["target"],
                                        metric=metric, value=float(row["value"])))
    return out


def read_observation_means(config: RunConfig) -> List[DriftMeasurement]:
    """Cross-domain observation means per ordered pair, as drift values."""
    path = _out(config) / "observations.csv"
    if not path.exists():
        raise DataError(f"{path} not found; run the drift stage first")
    grouped: Dict[Tuple[str, str, str], List[float]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            if row["mode"] != "cross_domain":
                continue
            key = (row["metric"], row["source"], row["target"])
            grouped.setdefault(key, []).append(float(row["value"]))
    out = []
    for (canonical, source, target), values in sorted(grouped.items()):
        out.append(DriftMeasurement(source_label=source, target_label=target,
                                    metric=MetricSpec.from_string(canonical),
                                    value=sum(values) / len(values)))
    return out


def read_perf_changes(config: RunConfig) -> List[PerformanceChange]:
    path = _out(config) / "perf_changes.csv"
    if not path.exists():
        raise DataError(f"{path} not found; run the perf stage first")
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            out.append(PerformanceChange(dataset=row["dataset"],
                                         perf_metric=row["perf_metric"],
                                         source_label=row["source"],
                                         target_label=row["target"],
                                         delta=float(row["delta"])))
    return out


def stage_correlate(config: RunConfig) -> None:
    if not config.performance_path:
        return
    if config.correlate_with == "one_shot":
        drift = read_drift_oneshot(config)
    else:
        drift = read_observation_means(config)
    changes = read_perf_changes(config)
    grid = build_correlation_table(drift, changes)
    write_correlation_csv(grid, _out(config) / "correlations.csv")


def read_correlation_grid(config: RunConfig) -> CorrelationGrid:
    path = _out(config) / "correlations.csv"
    if not path.exists():
        raise DataError(f"{path} not found; run the correlate stage first")
    rows: List[MetricSpec] = []
    columns: List[str] = []
    cells: Dict[Tuple[str, str], CorrelationCell] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            metric = MetricSpec(family=row["drift_family"],
                                encoder_id=row["encoder_id"] or None,
                                measure=row["measure"] or None)
            if metric.canonical() not in [m.canonical() for m in rows]:
                rows.append(metric)
            if row["perf_metric"] not in columns:
                columns.append(row["perf_metric"])
            cells[(metric.canonical(), row["perf_metric"])] = CorrelationCell(
                drift_metric=metric, perf_metric=row["perf_metric"],
                r=float(row["r"]), p_value=float(row["p"]),
                n=int(row["n"]), stars=row["stars"])
    return CorrelationGrid(rows=rows, columns=columns, cells=cells)


def _drift_matrix(domains: List[TemporalDomain], metric: MetricSpec,
                  measurements: List[DriftMeasurement],
                  tests: Dict[Tuple[str, str, str], bool]) -> MatrixView:
    labels = [d.label for d in domains]
    pos = {label: i for i, label in enumerate(labels)}
    k = len(labels)
    values = np.zeros((k, k), dtype=np.float64)
    diagonal = 1.0 if metric.kind == "similarity" else 0.0
    np.fill_diagonal(values, diagonal)
    mask = np.zeros((k, k), dtype=bool)
    for m in measurements:
        if m.metric.canonical() != metric.canonical():
            continue
        i, j = pos[m.source_label], pos[m.target_label]
        values[i, j] = m.value
        values[j, i] = m.value
    for (canonical, source, target), significant in tests.items():
        if canonical == metric.canonical() and source in pos and target in pos:
            mask[pos[source], pos[target]] = significant
    return MatrixView(row_labels=labels, col_labels=list(labels), values=values,
                      value_kind=metric.kind, mask=mask)


def _read_drift_tests(config: RunConfig) -> Dict[Tuple[str, str, str], bool]:
    path = _out(config) / "drift_tests.csv"
    if not path.exists():
        raise DataError(f"{path} not found; run the drift stage first")
    tests = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            tests[(row["metric"], row["source"], row["target"])] = row["significant"] == "true"
    return tests


def stage_report(config: RunConfig) -> None:
    out = _out(config)
    report_dir = out / "report"
    report_dir.mkdir(exist_ok=True)
    domains = read_domains(config)
    measurements = read_drift_oneshot(config)
    tests = _read_drift_tests(config)
    for metric in config.metrics:
        view = _drift_matrix(domains, metric, measurements, tests)
        render_heatmap_svg(view, report_dir / f"heatmap_{metric.slug()}.svg")
        write_matrix_csv(view, report_dir / f"matrix_{metric.slug()}.csv")

    if config.performance_path:
        changes = read_perf_changes(config)
        sig: Dict[Tuple[str, str, str, str], bool] = {}
        with open(out / "perf_changes.csv", encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                key = (row["dataset"], row["perf_metric"], row["source"], row["target"])
                sig[key] = row["significant"] == "true"
        grouped: Dict[Tuple[str, str], List[PerformanceChange]] = {}
        for change in changes:
            grouped.setdefault((change.dataset, change.perf_metric), []).append(change)
        single = len({d for d, _ in grouped}) == 1
        domain_order = [d.label for d in domains]
        for (dataset, perf_metric), group in sorted(grouped.items()):
            labels = sorted({c.source_label for c in group} | {c.target_label for c in group})
            if set(labels) <= set(domain_order):
                labels = [l for l in domain_order if l in set(labels)]
            pos = {label: i for i, label in enumerate(labels)}
            k = len(labels)
            values = np.zeros((k, k), dtype=np.float64)
            mask = np.zeros((k, k), dtype=bool)
            for c in group:
                i, j = pos[c.source_label], pos[c.target_label]
                values[i, j] = c.delta
                mask[i, j] = sig[(dataset, perf_metric, c.source_label, c.target_label)]
            view = MatrixView(row_labels=labels, col_labels=list(labels),
                              values=values, value_kind="delta", mask=mask)
            stem = _safe_name(perf_metric if single else f"{dataset}_{perf_metric}")
            write_matrix_csv(view, report_dir / f"deltas_{stem}.csv")
            render_heatmap_svg(view, report_dir / f"heatmap_deltas_{stem}.svg")

        if (out / "correlations.csv").exists():
            grid = read_correlation_grid(config)
            render_correlation_markdown(grid, report_dir / "correlations.md")
            shutil.copyfile(out / "correlations.csv", report_dir / "correlations.csv")


def _inventory(out: Path) -> Dict[str, str]:
    files = {}
    for path in sorted(out.rglob("*")):
        if path.is_dir() or path.name in ("run_summary.json", "run.partial"):
            continue
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        files[path.relative_to(out).as_posix()] = digest
    return files


def write_run_summary(config: RunConfig) -> None:
    out = _out(config)
    _write_json(out / "run_summary.json", {
        "seed": config.master_seed,
        "config_hash": config.config_hash(),
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "files": _inventory(out),
    })


_STAGE_FUNCS = {
    "ingest": stage_ingest,
    "segment": stage_segment,
    "drift": stage_drift,
    "perf": stage_perf,
    "correlate": stage_correlate,
    "report": stage_report,
}


def run_stage(config: RunConfig, stage: str) -> None:
    """Run one stage with the partial-marker protocol and a fresh summary."""
    if stage not in _STAGE_FUNCS:
        raise ConfigError(f"unknown stage {stage!r}")
    out = _out(config)
    marker = out / "run.partial"
    marker.write_text(stage + "\n", encoding="utf-8")
    try:
        _STAGE_FUNCS[stage](config)
    except TempdriftError as exc:
        raise type(exc)(f"[{stage}] {exc}") from exc
    marker.unlink(missing_ok=True)
    write_run_summary(config)


def run_pipeline(config: RunConfig) -> None:
    """Full run: every stage in order, skipping perf stages without scores."""
    for stage in STAGES:
        if stage in ("perf", "correlate") and not config.performance_path:
            continue
        run_stage(config, stage)
