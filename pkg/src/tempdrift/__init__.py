"""tempdrift: temporal drift measurement for time-stamped text corpora.

The library segments a corpus into temporal domains, measures word-level and
semantic-level drift between them, tests drift and model-performance changes
for significance with a half-sampling protocol, and correlates the two. See
the demos/ directory for narrative walkthroughs of each capability and the
`tempdrift` CLI for the batch pipeline.
"""

from .corpus import (
    Corpus,
    DateRange,
    Document,
    SegmentationResult,
    SplitManifest,
    TemporalDomain,
    equalize_domains,
    load_corpus,
    sample_subset,
    segment_domains,
    split_train_test,
)
from .correlation import (
    CorrelationCell,
    CorrelationGrid,
    annotate_significance,
    build_correlation_table,
    stars_for,
)
from .drift import (
    DriftContext,
    DriftMeasurement,
    EmbeddingTable,
    MetricSpec,
    domain_avg_embedding,
    jaccard_similarity,
    load_embedding_table,
    measure_drift,
    save_embedding_table,
    tfidf_cosine_similarity,
    vector_similarity,
)
from .errors import ConfigError, DataError, DegenerateDataError, TempdriftError
from .lexical import (
    TfIdfStats,
    TfIdfVector,
    TokenizerConfig,
    build_tfidf_stats,
    domain_avg_tfidf,
    tfidf_vector,
    token_type_set,
    tokenize,
)
from .perf import (
    PerformanceChange,
    PerformanceLedger,
    PerformanceRecord,
    change_significance,
    load_performance,
    performance_change,
)
from .pipeline import RunConfig, load_config, run_pipeline, run_stage
from .report import MatrixView, render_correlation_markdown, render_heatmap_svg, write_matrix_csv
from .stats import (
    ObservationSet,
    TestResult,
    cross_domain_observations,
    drift_significance,
    in_domain_observations,
    pearson_correlation,
    student_t_cdf,
    welch_t_test,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "Corpus", "CorrelationCell", "CorrelationGrid", "DataError",
    "DateRange", "DegenerateDataError", "Document", "DriftContext",
    "DriftMeasurement", "EmbeddingTable", "MatrixView", "MetricSpec",
    "ObservationSet", "PerformanceChange", "PerformanceLedger",
    "PerformanceRecord", "RunConfig", "SegmentationResult", "SplitManifest",
    "TempdriftError", "TemporalDomain", "TestResult", "TfIdfStats",
    "TfIdfVector", "TokenizerConfig", "annotate_significance",
    "build_correlation_table", "build_tfidf_stats", "change_significance",
    "cross_domain_observations", "domain_avg_embedding", "domain_avg_tfidf",
    "drift_significance", "equalize_domains", "in_domain_observations",
    "jaccard_similarity", "load_config", "load_corpus", "load_embedding_table",
    "load_performance", "measure_drift", "pearson_correlation",
    "performance_change", "render_correlation_markdown", "render_heatmap_svg",
    "run_pipeline", "run_stage", "sample_subset", "save_embedding_table",
    "segment_domains", "split_train_test", "stars_for", "student_t_cdf",
    "tfidf_cosine_similarity", "tfidf_vector", "token_type_set", "tokenize",
    "vector_similarity", "welch_t_test", "write_matrix_csv",
]
