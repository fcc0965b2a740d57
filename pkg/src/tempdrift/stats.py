"""Hypothesis testing, correlation, and the half-sampling observation protocol.

The two-sample test defaults to Welch's unequal-variance form with
Welch-Satterthwaite degrees of freedom; Student's pooled form is available
via ``equal_variance=True``. P-values come from an exact Student-t CDF built
on the regularized incomplete beta function evaluated with a modified Lentz
continued fraction (sample sizes here are 5 and 15, far too small for normal
approximations).

Observation protocol: for a cross-domain pair (T_i, T_j), each of the k
observations samples half of T_i and half of T_j and measures the drift
metric between the halves; the in-domain baseline for T_j splits a shuffle of
T_j into two disjoint half-sized parts. Per-observation seeds derive from
``obs/<mode>/<source>/<target>/<metric>/<n>``, so value lists are identical
across runs and across any parallel schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .corpus import TemporalDomain
from .drift import DriftContext, MetricSpec
from .errors import DataError, DegenerateDataError, TempdriftError
from .rng import SplitMix64, derive_seed, fisher_yates, sample_without_replacement

SIGNIFICANCE_LEVEL = 0.05


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: float
    p_value: float
    significant: bool
    zero_variance: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise DataError(f"p-value {self.p_value} outside [0,1]")
        if not self.df > 0:
            raise DataError(f"degrees of freedom must be positive, got {self.df}")
        if self.significant != (self.p_value < SIGNIFICANCE_LEVEL):
            raise DataError("significant flag inconsistent with p-value")


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    eps = 1e-16
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 500):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise DegenerateDataError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise DataError("incomplete beta requires positive parameters")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log(1.0 - x))
    front = math.exp(ln_front)
    # The continued fraction converges fast only below the distribution mean;
    # use the reflection I_x(a,b) = 1 - I_{1-x}(b,a) on the other side.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_cdf(t: float, df: float) -> float:
    """CDF of Student's t with `df` degrees of freedom."""
    if df <= 0:
        raise DataError(f"degrees of freedom must be positive, got {df}")
    if not math.isfinite(t):
        raise DataError("t must be finite")
    if t == 0.0:
        return 0.5
    x = df / (t * t + df)
    tail = 0.5 * regularized_incomplete_beta(x, df / 2.0, 0.5)  # P(T > |t|)
    return 1.0 - tail if t > 0 else tail


def two_tailed_p(t: float, df: float) -> float:
    return 2.0 * (1.0 - student_t_cdf(abs(t), df))


def _mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs)


def _sample_variance(xs: Sequence[float], mean: float) -> float:
    return sum((x - mean) ** 2 for x in xs) / (len(xs) - 1)


def welch_t_test(xs: Sequence[float], ys: Sequence[float],
                 equal_variance: bool = False) -> TestResult:
    """Two-tailed two-sample t-test (Welch by default, pooled on request)."""
    if len(xs) < 2 or len(ys) < 2:
        raise DataError("both samples need at least 2 values")
    nx, ny = len(xs), len(ys)
    mx, my = _mean(xs), _mean(ys)
    vx, vy = _sample_variance(xs, mx), _sample_variance(ys, my)
    if vx == 0.0 and vy == 0.0:
        raise DegenerateDataError("both samples have zero variance")
    if equal_variance:
        pooled = ((nx - 1) * vx + (ny - 1) * vy) / (nx + ny - 2)
        t = (mx - my) / math.sqrt(pooled * (1.0 / nx + 1.0 / ny))
        df = float(nx + ny - 2)
    else:
        se_x = vx / nx
        se_y = vy / ny
        t = (mx - my) / math.sqrt(se_x + se_y)
        df = (se_x + se_y) ** 2 / (se_x ** 2 / (nx - 1) + se_y ** 2 / (ny - 1))
    p = two_tailed_p(t, df)
    return TestResult(statistic=t, df=df, p_value=p, significant=p < SIGNIFICANCE_LEVEL)


def pearson_correlation(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """Pearson r plus its two-tailed p-value (t transform with df = n-2)."""
    n = len(xs)
    if n != len(ys):
        raise DataError("samples must have equal length")
    if n < 3:
        raise DataError("pearson correlation needs at least 3 pairs")
    mx, my = _mean(xs), _mean(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateDataError("pearson correlation undefined for a constant sample")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0  # limit of the t transform
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return r, two_tailed_p(t, n - 2)


@dataclass(frozen=True)
class ObservationSet:
    pair: Tuple[str, str]
    metric: MetricSpec
    values: Tuple[float, ...]
    seeds: Tuple[int, ...]
    mode: str  # cross_domain | in_domain

    def __post_init__(self):
        if len(self.values) != len(self.seeds):
            raise DataError("values and seeds must align")
        if len(self.values) < 2:
            raise DataError("an observation set needs k >= 2")
        if self.mode not in ("cross_domain", "in_domain"):
            raise DataError(f"unknown observation mode {self.mode!r}")
        for v in self.values:
            if not math.isfinite(v):
                raise DataError("observation values must be finite")

    @property
    def mean(self) -> float:
        return _mean(self.values)


def _observation_seed(master_seed: int, mode: str, source: str, target: str,
                      metric: MetricSpec, n: int) -> int:
    return derive_seed(master_seed, f"obs/{mode}/{source}/{target}/{metric.canonical()}/{n}")


def cross_domain_observations(domain_i: TemporalDomain, domain_j: TemporalDomain,
                              metric: MetricSpec, ctx: DriftContext,
                              k: int = 15, master_seed: int = 0) -> ObservationSet:
    """k drift values between half-samples of T_i and T_j."""
    if len(domain_i) < 2 or len(domain_j) < 2:
        raise DataError("cross-domain observations need >= 2 docs per domain")
    if k < 2:
        raise DataError("k must be >= 2")
    half_i = len(domain_i) // 2
    half_j = len(domain_j) // 2
    values: List[float] = []
    seeds: List[int] = []
    for n in range(1, k + 1):
        seed = _observation_seed(master_seed, "cross_domain",
                                 domain_i.label, domain_j.label, metric, n)
        rng = SplitMix64(seed)
        ids_a = sample_without_replacement(domain_i.doc_ids, half_i, rng)
        ids_b = sample_without_replacement(domain_j.doc_ids, half_j, rng)
        try:
            m = ctx.measure_ids(ids_a, ids_b, metric, domain_i.label, domain_j.label)
        except TempdriftError as exc:
            raise type(exc)(f"observation {n} for {domain_i.label}-{domain_j.label} "
                            f"[{metric.canonical()}]: {exc}") from exc
        values.append(m.value)
        seeds.append(seed)
    return ObservationSet(pair=(domain_i.label, domain_j.label), metric=metric,
                          values=tuple(values), seeds=tuple(seeds), mode="cross_domain")


def in_domain_observations(domain_j: TemporalDomain, metric: MetricSpec, ctx: DriftContext,
                           k: int = 15, master_seed: int = 0) -> ObservationSet:
    """k drift values between two disjoint half-sized parts of T_j.

    When |T_j| is odd both halves still take floor(|T_j|/2) documents and one
    document sits out of that observation, keeping the halves size-matched.
    """
    if len(domain_j) < 2:
        raise DataError("in-domain observations need >= 2 docs")
    if k < 2:
        raise DataError("k must be >= 2")
    half = len(domain_j) // 2
    values: List[float] = []
    seeds: List[int] = []
    for n in range(1, k + 1):
        seed = _observation_seed(master_seed, "in_domain",
                                 domain_j.label, domain_j.label, metric, n)
        shuffled = fisher_yates(domain_j.doc_ids, SplitMix64(seed))
        ids_a = shuffled[:half]
        ids_b = shuffled[half:2 * half]
        try:
            m = ctx.measure_ids(ids_a, ids_b, metric, domain_j.label, domain_j.label)
        except TempdriftError as exc:
            raise type(exc)(f"observation {n} for {domain_j.label}-{domain_j.label} "
                            f"[{metric.canonical()}]: {exc}") from exc
        values.append(m.value)
        seeds.append(seed)
    return ObservationSet(pair=(domain_j.label, domain_j.label), metric=metric,
                          values=tuple(values), seeds=tuple(seeds), mode="in_domain")


def drift_significance(cross: ObservationSet, indom: ObservationSet,
                       equal_variance: bool = False) -> TestResult:
    """Two-tailed test of the cross-domain observations against the baseline."""
    if cross.mode != "cross_domain" or indom.mode != "in_domain":
        raise DataError("drift_significance expects (cross_domain, in_domain) sets")
    if cross.metric.canonical() != indom.metric.canonical():
        raise DataError(f"metric mismatch: {cross.metric.canonical()} "
                        f"vs {indom.metric.canonical()}")
    if cross.pair[1] != indom.pair[1]:
        raise DataError(f"target label mismatch: {cross.pair[1]!r} vs {indom.pair[1]!r}")
    return welch_t_test(list(cross.values), list(indom.values), equal_variance=equal_variance)
