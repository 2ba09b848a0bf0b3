"""Hypothesis-test battery for the validation campaigns.

Implemented here: Anderson-Darling normality (composite, small-sample
corrected), two-variance one-sided tests (Bonett 2006 and classical
mean-centered Levene, Brown-Forsythe behind a flag), one-way ANOVA,
Games-Howell pairwise comparison (raw data or summary statistics), and
Fisher's LSD. t/F/normal quantiles come from scipy.special; the studentized
range comes from the quadrature in `srange`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import fdtrc, ndtr, ndtri, stdtr, stdtrit

from . import errors, srange


@dataclass(frozen=True)
class SampleGroup:
    label: str
    observations: tuple

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        if not np.all(np.isfinite(obs)):
            raise ValueError("observations must be finite")

    @property
    def n(self) -> int:
        return len(self.observations)

    @property
    def mean(self) -> float:
        return float(np.mean(self.observations))

    @property
    def sd(self) -> float:
        return float(np.std(self.observations, ddof=1))


@dataclass(frozen=True)
class GroupSummary:
    label: str
    mean: float
    sd: float
    n: int


@dataclass(frozen=True)
class NormalityResult:
    a_squared: float
    p_value: float


@dataclass(frozen=True)
class VarianceTestResult:
    method: str
    statistic: float
    p_value: float
    hypothesized_ratio: float = 1.0


@dataclass(frozen=True)
class AnovaResult:
    f_statistic: float
    p_value: float
    ms_error: float
    n_total: int
    n_groups: int
    group_means: tuple


@dataclass(frozen=True)
class PairwiseComparison:
    labels: tuple
    diff: float
    se: float
    t_value: float
    df: float
    ci: tuple
    adjusted_p: float


@dataclass(frozen=True)
class LsdResult:
    lsd: float
    alpha: float
    t_quantile: float
    df: int


# ---------------------------------------------------------------------------
# Anderson-Darling (case 3: mean and variance estimated from the sample)

def anderson_darling(group: SampleGroup) -> NormalityResult:
    n = group.n
    if n < 8:
        raise errors.TooFewObservations("Anderson-Darling needs n >= 8")
    x = np.sort(np.asarray(group.observations, dtype=float))
    mu, sd = x.mean(), x.std(ddof=1)
    z = ndtr((x - mu) / sd)
    z = np.clip(z, 1e-300, 1 - 1e-15)
    i = np.arange(1, n + 1)
    a2 = -n - np.sum((2 * i - 1) * (np.log(z) + np.log1p(-z[::-1]))) / n
    a2_star = a2 * (1.0 + 0.75 / n + 2.25 / n ** 2)
    return NormalityResult(a_squared=float(a2), p_value=_ad_p(a2_star))


def _ad_p(a2s: float) -> float:
    # D'Agostino & Stephens piecewise approximation for the corrected statistic
    if a2s >= 0.6:
        p = math.exp(1.2937 - 5.709 * a2s + 0.0186 * a2s ** 2)
    elif a2s >= 0.34:
        p = math.exp(0.9177 - 4.279 * a2s - 1.38 * a2s ** 2)
    elif a2s >= 0.2:
        p = 1 - math.exp(-8.318 + 42.796 * a2s - 59.938 * a2s ** 2)
    else:
        p = 1 - math.exp(-13.436 + 101.14 * a2s - 223.73 * a2s ** 2)
    return min(max(p, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Two-variance one-sided tests, H1: var1 / var2 > k

def variance_ratio_test(g1: SampleGroup, g2: SampleGroup, k: float = 1.0,
                        method: str = "bonett",
                        center: str = "mean") -> VarianceTestResult:
    if g1.n < 3 or g2.n < 3:
        raise errors.TooFewObservations("variance tests need n >= 3 per group")
    if method == "bonett":
        return _bonett(g1, g2, k)
    if method == "levene":
        return _levene(g1, g2, k, center=center)
    raise ValueError(f"unknown method {method!r}")


def _bonett(g1: SampleGroup, g2: SampleGroup, k: float) -> VarianceTestResult:
    """Bonett (2006): kurtosis-adjusted test on the log variance ratio."""
    x1 = np.asarray(g1.observations, dtype=float)
    x2 = np.asarray(g2.observations, dtype=float)
    n1, n2 = len(x1), len(x2)
    # pooled kurtosis estimate with trimmed means, as in Bonett (2006)
    def trimmed_dev(x):
        n = len(x)
        trim = int(1 + math.floor(n / 2 - math.sqrt(n)))  # per-tail trim count
        m = np.mean(np.sort(x)[trim:n - trim]) if 0 < trim < n // 2 else np.mean(x)
        return x - m
    d1, d2 = trimmed_dev(x1), trimmed_dev(x2)
    s1sq = np.var(x1, ddof=1)
    s2sq = np.var(x2, ddof=1)
    gamma = (n1 + n2) * (np.sum(d1 ** 4) + np.sum(d2 ** 4)) / \
        (np.sum(d1 ** 2) + np.sum(d2 ** 2)) ** 2
    c1 = (n1 - 3) / n1
    c2 = (n2 - 3) / n2
    se = math.sqrt((gamma - c1) / (n1 - 1) + (gamma - c2) / (n2 - 1))
    # small-sample constant from Bonett (2006)
    corr1 = n1 / (n1 - ndtri(1 - 0.05 / 2))
    corr2 = n2 / (n2 - ndtri(1 - 0.05 / 2))
    z = (math.log(corr1 * s1sq) - math.log(corr2 * s2sq) - math.log(k)) / se
    p_one_sided = 1.0 - ndtr(z)
    return VarianceTestResult(method="bonett", statistic=float(z * z),
                              p_value=float(p_one_sided), hypothesized_ratio=k)


def _levene(g1: SampleGroup, g2: SampleGroup, k: float,
            center: str = "mean") -> VarianceTestResult:
    """Classical Levene on absolute deviations; Brown-Forsythe with center='median'.

    One-sided p (H1: var1 > var2) from the signed two-sample pooled t on the
    deviations; W equals t squared for the two-group case.
    """
    if k != 1.0:
        raise ValueError("Levene path supports k = 1 only")
    loc = np.mean if center == "mean" else np.median
    d1 = np.abs(np.asarray(g1.observations, dtype=float) - loc(g1.observations))
    d2 = np.abs(np.asarray(g2.observations, dtype=float) - loc(g2.observations))
    n1, n2 = len(d1), len(d2)
    sp2 = ((n1 - 1) * np.var(d1, ddof=1) + (n2 - 1) * np.var(d2, ddof=1)) / (n1 + n2 - 2)
    if sp2 <= 0:  # all deviations identical: the test carries no information
        t = math.nan if d1.mean() == d2.mean() else math.inf * np.sign(d1.mean() - d2.mean())
    else:
        t = (d1.mean() - d2.mean()) / math.sqrt(sp2 * (1 / n1 + 1 / n2))
    df = n1 + n2 - 2
    p_one_sided = 1.0 - stdtr(df, t)
    return VarianceTestResult(method="levene", statistic=float(t * t),
                              p_value=float(p_one_sided), hypothesized_ratio=k)


# ---------------------------------------------------------------------------
# One-way ANOVA

def one_way_anova(groups) -> AnovaResult:
    if len(groups) < 2:
        raise errors.TooFewGroups("ANOVA needs at least 2 groups")
    arrays = [np.asarray(g.observations, dtype=float) for g in groups]
    if any(len(a) < 2 for a in arrays):
        raise errors.TooFewObservations("ANOVA needs n >= 2 per group")
    all_x = np.concatenate(arrays)
    grand = all_x.mean()
    ss_between = sum(len(a) * (a.mean() - grand) ** 2 for a in arrays)
    ss_within = sum(np.sum((a - a.mean()) ** 2) for a in arrays)
    a_groups = len(arrays)
    n_total = len(all_x)
    df_b = a_groups - 1
    df_w = n_total - a_groups
    ms_b = ss_between / df_b
    ms_e = ss_within / df_w
    f = ms_b / ms_e if ms_e > 0 else (0.0 if ms_b == 0 else math.inf)
    p = float(fdtrc(df_b, df_w, f)) if math.isfinite(f) else 0.0
    return AnovaResult(f_statistic=float(f), p_value=p, ms_error=float(ms_e),
                       n_total=n_total, n_groups=a_groups,
                       group_means=tuple(float(a.mean()) for a in arrays))


# ---------------------------------------------------------------------------
# Games-Howell

def summarize(group: SampleGroup) -> GroupSummary:
    return GroupSummary(label=group.label, mean=group.mean, sd=group.sd, n=group.n)


def games_howell(groups, alpha: float = 0.05) -> list:
    """Pairwise comparisons robust to unequal variances.

    Accepts SampleGroup or GroupSummary instances so published summary rows
    can be reproduced without raw data.
    """
    if len(groups) < 2:
        raise errors.TooFewGroups("Games-Howell needs at least 2 groups")
    summaries = [g if isinstance(g, GroupSummary) else summarize(g) for g in groups]
    a = len(summaries)
    out = []
    for i in range(a):
        for j in range(i + 1, a):
            s1, s2 = summaries[i], summaries[j]
            v1, v2 = s1.sd ** 2 / s1.n, s2.sd ** 2 / s2.n
            se = math.sqrt(v1 + v2)
            diff = s2.mean - s1.mean
            df = (v1 + v2) ** 2 / (v1 ** 2 / (s1.n - 1) + v2 ** 2 / (s2.n - 1))
            t = diff / se if se > 0 else 0.0
            crit = srange.ppf(1 - alpha, a, df) / math.sqrt(2.0)
            half = crit * se
            # adjusted p: studentized range survival of |t| * sqrt(2)
            p_adj = 1.0 - srange.cdf(abs(t) * math.sqrt(2.0), a, df) if se > 0 else 1.0
            out.append(PairwiseComparison(
                labels=(s1.label, s2.label), diff=float(diff), se=float(se),
                t_value=float(t), df=float(df),
                ci=(float(diff - half), float(diff + half)), adjusted_p=float(p_adj)))
    return out


def games_howell_critical_value(a: int, df: float, alpha: float = 0.05) -> float:
    return srange.ppf(1 - alpha, a, df) / math.sqrt(2.0)


def welch_t_critical_value(df: float, alpha: float = 0.05) -> float:
    return float(stdtrit(df, 1 - alpha / 2))


# ---------------------------------------------------------------------------
# Fisher's LSD

def fisher_lsd(ms_e: float, n: int, n_total: int, a: int,
               alpha: float = 0.05) -> LsdResult:
    """LSD = t(alpha/2, N - a) * sqrt(2 * MS_E / n)."""
    df = n_total - a
    if df <= 0:
        raise errors.InvalidDof(f"N - a = {df} must be > 0")
    if ms_e < 0 or n < 1:
        raise ValueError("ms_e >= 0 and n >= 1 required")
    t_q = float(stdtrit(df, 1 - alpha / 2))
    return LsdResult(lsd=t_q * math.sqrt(2.0 * ms_e / n), alpha=alpha,
                     t_quantile=t_q, df=df)


def lsd_compare(mean1: float, mean2: float, lsd: float) -> bool:
    """Two means are significantly different iff |mean1 - mean2| > LSD."""
    return abs(mean1 - mean2) > lsd


# ---------------------------------------------------------------------------
# Report rendering

@dataclass
class StatReport:
    title: str
    sections: list = field(default_factory=list)  # (heading, rows) pairs

    def add(self, heading: str, rows):
        self.sections.append((heading, list(rows)))

    def render(self) -> str:
        lines = [self.title, "=" * len(self.title)]
        for heading, rows in self.sections:
            lines.append("")
            lines.append(heading)
            lines.append("-" * len(heading))
            for row in rows:
                lines.append("  " + "  ".join(str(c) for c in row))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"title": self.title,
                "sections": [{"heading": h, "rows": r} for h, r in self.sections]}
