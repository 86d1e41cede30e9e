"""Summary statistics and the hypothesis tests used to compare schemes."""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from chaosde import special

ALPHA = 0.1


@dataclass(frozen=True)
class StatConfig:
    alpha: float = ALPHA

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


@dataclass(frozen=True)
class SummaryStats:
    min: float
    max: float
    mean: float
    median: float
    std: float
    n: int

    @property
    def std_defined(self) -> bool:
        return self.n >= 2


@dataclass(frozen=True)
class TestOutcome:
    statistic: float
    df: float | tuple
    p_value: float
    reject: bool
    critical: float | None = None
    name: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        if isinstance(self.df, tuple):
            d["df"] = list(self.df)
        return d


def _arr(samples) -> np.ndarray:
    return np.asarray(samples, dtype=float).ravel()


def summary(samples: Sequence[float]) -> SummaryStats:
    """Min/max/mean/median and the n-1 standard deviation (0 for a single value)."""
    x = _arr(samples)
    if x.size == 0:
        raise ValueError("summary of an empty sample")
    std = float(np.std(x, ddof=1)) if x.size >= 2 else 0.0
    return SummaryStats(float(x.min()), float(x.max()), float(x.mean()), float(np.median(x)), std, int(x.size))


def ks_statistic(samples, cdf: Callable) -> float:
    x = np.sort(_arr(samples))
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_one_sample(samples, cdf: Callable, cfg: StatConfig = StatConfig()) -> TestOutcome:
    """One-sample Kolmogorov-Smirnov test against ``cdf`` (asymptotic p-value)."""
    x = _arr(samples)
    if x.size < 1:
        raise ValueError("KS test needs at least one sample")
    d = ks_statistic(x, cdf)
    p = special.kolmogorov_sf(math.sqrt(x.size) * d)
    return TestOutcome(d, float(x.size), p, p < cfg.alpha, name="ks")


def ks_normality(samples, cfg: StatConfig = StatConfig()) -> TestOutcome:
    """KS against a normal with the sample's own mean and standard deviation."""
    x = _arr(samples)
    if x.size < 5:
        raise ValueError("normality check needs at least 5 samples")
    mu, sd = float(x.mean()), float(np.std(x, ddof=1))
    if sd == 0.0:
        raise ValueError("zero-variance sample: fitted normal is degenerate")
    out = ks_one_sample(x, lambda v: special.normal_cdf(v, mu, sd), cfg)
    return TestOutcome(out.statistic, out.df, out.p_value, out.reject, name="ks-normal")


def ks_two_sample(a, b) -> float:
    """Largest gap between the two empirical CDFs."""
    a, b = np.sort(_arr(a)), np.sort(_arr(b))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def f_test_variances(a, b, cfg: StatConfig = StatConfig()) -> TestOutcome:
    """Two-sided F-test of equal variances (larger variance on top)."""
    a, b = _arr(a), _arr(b)
    if a.size < 2 or b.size < 2:
        raise ValueError("F-test needs at least two samples per group")
    va, vb = float(np.var(a, ddof=1)), float(np.var(b, ddof=1))
    if va == 0.0 or vb == 0.0:
        raise ValueError("F-test undefined for a zero-variance sample")
    if va >= vb:
        f, d1, d2 = va / vb, a.size - 1, b.size - 1
    else:
        f, d1, d2 = vb / va, b.size - 1, a.size - 1
    p = min(1.0, 2.0 * special.f_sf(f, d1, d2))
    crit = special.f_ppf_upper(cfg.alpha / 2.0, d1, d2)
    return TestOutcome(f, (d1, d2), p, p < cfg.alpha, crit, name="f-test")


def anova_oneway(groups: Sequence, cfg: StatConfig = StatConfig()) -> TestOutcome:
    gs = [_arr(g) for g in groups]
    if len(gs) < 2 or any(g.size < 2 for g in gs):
        raise ValueError("ANOVA needs >= 2 groups with >= 2 values each")
    k = len(gs)
    N = sum(g.size for g in gs)
    grand = np.concatenate(gs).mean()
    ssb = sum(g.size * (g.mean() - grand) ** 2 for g in gs)
    ssw = sum(float(np.sum((g - g.mean()) ** 2)) for g in gs)
    d1, d2 = k - 1, N - k
    msb, msw = ssb / d1, ssw / d2
    if msb == 0.0:
        f = 0.0
    elif msw == 0.0:
        f = math.inf
    else:
        f = msb / msw
    p = float(special.f_sf(float(f), d1, d2))
    crit = special.f_ppf_upper(cfg.alpha, d1, d2)
    return TestOutcome(float(f), (d1, d2), p, bool(p < cfg.alpha), crit, name="anova")


def t_test(a, b, sides: str = "two", pooled: bool = True, cfg: StatConfig = StatConfig()) -> TestOutcome:
    """Two-sample t-test.

    ``sides`` is ``"two"``, ``"greater"`` (alternative mean(a) > mean(b)) or
    ``"less"``. ``pooled=False`` gives Welch's test.
    """
    if sides not in ("two", "greater", "less"):
        raise ValueError("sides must be 'two', 'greater' or 'less'")
    a, b = _arr(a), _arr(b)
    na, nb = a.size, b.size
    if na < 2 or nb < 2:
        raise ValueError("t-test needs at least two samples per group")
    va, vb = float(np.var(a, ddof=1)), float(np.var(b, ddof=1))
    diff = float(a.mean() - b.mean())
    if pooled:
        df = na + nb - 2
        sp2 = ((na - 1) * va + (nb - 1) * vb) / df
        se = math.sqrt(sp2 * (1.0 / na + 1.0 / nb))
    else:
        qa, qb = va / na, vb / nb
        se = math.sqrt(qa + qb)
        df = (qa + qb) ** 2 / (qa * qa / (na - 1) + qb * qb / (nb - 1)) if se > 0 else na + nb - 2
    if se == 0.0:
        t = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    else:
        t = diff / se
    if sides == "two":
        p = 1.0 if t == 0.0 else special.t_two_sided(t, df)
    elif sides == "greater":
        p = special.t_sf(t, df) if math.isfinite(t) else (0.0 if t > 0 else 1.0)
    else:
        p = special.t_sf(-t, df) if math.isfinite(t) else (0.0 if t < 0 else 1.0)
    name = ("pooled" if pooled else "welch") + f"-t-{sides}"
    return TestOutcome(t, float(df), float(p), p < cfg.alpha, name=name)


# Five-step comparison of scheme columns.

@dataclass
class Comparison:
    a: str
    b: str
    relation: str  # '>', '<' or '='
    p_value: float
    sided: str  # 'one' or 'two'
    test: str


@dataclass
class StatReport:
    labels: list
    means: dict
    normality: dict = field(default_factory=dict)
    excluded: list = field(default_factory=list)
    notices: list = field(default_factory=list)
    variance_tests: dict = field(default_factory=dict)
    equal_variances: bool | None = None
    branch: str = ""
    anova: TestOutcome | None = None
    comparisons: list = field(default_factory=list)
    greatest: list = field(default_factory=list)
    smallest: list = field(default_factory=list)
    alpha: float = ALPHA

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "labels": self.labels,
            "means": self.means,
            "normality": {k: v.to_dict() for k, v in self.normality.items()},
            "excluded": self.excluded,
            "notices": self.notices,
            "variance_tests": {f"{a} vs {b}": v.to_dict() for (a, b), v in self.variance_tests.items()},
            "equal_variances": self.equal_variances,
            "branch": self.branch,
            "anova": self.anova.to_dict() if self.anova else None,
            "comparisons": [asdict(c) for c in self.comparisons],
            "greatest": self.greatest,
            "smallest": self.smallest,
        }

    def to_markdown(self) -> str:
        lines = [f"### Statistical comparison (alpha = {self.alpha:g})", ""]
        lines.append("| group | mean | KS D | KS p | normal |")
        lines.append("|---|---:|---:|---:|---|")
        for lab in self.labels:
            o = self.normality.get(lab)
            if o is None:
                status = "excluded" if lab in self.excluded else "untested"
                lines.append(f"| {lab} | {self.means[lab]:.3f} | - | - | {status} |")
            else:
                lines.append(f"| {lab} | {self.means[lab]:.3f} | {o.statistic:.4f} | {o.p_value:.3f} | "
                             f"{'no' if o.reject else 'yes'} |")
        lines += ["", "| pair | F | p | equal variances |", "|---|---:|---:|---|"]
        for (a, b), o in self.variance_tests.items():
            lines.append(f"| {a} vs {b} | {o.statistic:.3f} | {o.p_value:.3f} | {'no' if o.reject else 'yes'} |")
        lines.append("")
        lines.append(f"Branch: **{self.branch}**")
        if self.anova is not None:
            a = self.anova
            lines.append(f"ANOVA: F = {a.statistic:.3f}, df = {a.df}, p = {a.p_value:.3f}, "
                         f"F crit. = {a.critical:.3f}")
        if self.comparisons:
            lines += ["", "| comparison | p | test |", "|---|---:|---|"]
            for c in self.comparisons:
                tag = " (t2)" if c.sided == "two" else ""
                lines.append(f"| mean({c.a}) {c.relation} mean({c.b}) | {c.p_value:.3f}{tag} | {c.test} |")
        lines += ["", f"Greatest mean: {', '.join(self.greatest) or '-'}",
                  f"Smallest mean: {', '.join(self.smallest) or '-'}"]
        for n in self.notices:
            lines.append(f"> {n}")
        return "\n".join(lines) + "\n"


def _pairwise(groups: Mapping[str, np.ndarray], pooled: bool, cfg: StatConfig) -> list[Comparison]:
    out = []
    kind = "pooled" if pooled else "welch"
    for a, b in itertools.combinations(groups, 2):
        xa, xb = groups[a], groups[b]
        side = "greater" if xa.mean() >= xb.mean() else "less"
        one = t_test(xa, xb, side, pooled, cfg)
        if one.p_value < cfg.alpha:
            rel = ">" if side == "greater" else "<"
            out.append(Comparison(a, b, rel, one.p_value, "one", f"{kind} t"))
        else:
            two = t_test(xa, xb, "two", pooled, cfg)
            out.append(Comparison(a, b, "=", two.p_value, "two", f"{kind} t"))
    return out


def _extremes(labels: list, comparisons: list[Comparison]) -> tuple[list, list]:
    beaten_up, beaten_down = set(), set()
    for c in comparisons:
        if c.relation == ">":
            beaten_up.add(c.b)
            beaten_down.add(c.a)
        elif c.relation == "<":
            beaten_up.add(c.a)
            beaten_down.add(c.b)
    return [l for l in labels if l not in beaten_up], [l for l in labels if l not in beaten_down]


def stats_pipeline(columns: Mapping[str, Sequence[float]], cfg: StatConfig = StatConfig()) -> StatReport:
    """Normality, variance equality, then ANOVA or Welch t-tests, then ordering t-tests."""
    if len(columns) < 2:
        raise ValueError("the comparison needs at least two groups")
    data = {k: _arr(v) for k, v in columns.items()}
    report = StatReport(labels=list(data), means={k: float(v.mean()) for k, v in data.items()},
                        alpha=cfg.alpha)
    kept = {}
    for lab, x in data.items():
        if x.size < 2 or np.var(x) == 0.0:
            report.excluded.append(lab)
            report.notices.append(f"{lab}: zero variance or too few values; excluded from tests")
            continue
        kept[lab] = x
        if x.size >= 5:
            report.normality[lab] = ks_normality(x, cfg)
            if report.normality[lab].reject:
                report.notices.append(f"{lab}: normality rejected by KS (p={report.normality[lab].p_value:.3f})")
        else:
            report.notices.append(f"{lab}: fewer than 5 values, normality not tested")
    if len(kept) < 2:
        report.branch = "insufficient"
        report.notices.append("fewer than two usable groups; no mean comparison")
        return report

    for a, b in itertools.combinations(kept, 2):
        report.variance_tests[(a, b)] = f_test_variances(kept[a], kept[b], cfg)
    report.equal_variances = not any(o.reject for o in report.variance_tests.values())

    if report.equal_variances:
        report.anova = anova_oneway(list(kept.values()), cfg)
        if report.anova.reject:
            report.branch = "anova -> pooled t"
            report.comparisons = _pairwise(kept, True, cfg)
        else:
            report.branch = "anova"
            report.comparisons = [Comparison(a, b, "=", report.anova.p_value, "two", "anova")
                                  for a, b in itertools.combinations(kept, 2)]
    else:
        report.branch = "welch"
        report.comparisons = _pairwise(kept, False, cfg)
    report.greatest, report.smallest = _extremes(list(kept), report.comparisons)
    return report
