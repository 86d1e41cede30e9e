import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special as ssp
from scipy import stats as sst

from chaosde import special
from chaosde.statistics import (
    StatConfig,
    anova_oneway,
    f_test_variances,
    ks_normality,
    ks_one_sample,
    ks_two_sample,
    stats_pipeline,
    summary,
    t_test,
)

samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=30)


def _standardized(rs, n, sd):
    z = rs.normal(size=n)
    z = (z - z.mean()) / z.std(ddof=1)
    return sd * z


# summary

def test_summary_examples():
    s = summary([1, 2, 3, 4])
    assert (s.mean, s.median) == (2.5, 2.5)
    assert s.std == pytest.approx(math.sqrt(5 / 3))
    c = summary([7.0] * 5)
    assert c.std == 0 and c.min == c.max == c.mean == 7.0
    one = summary([3.5])
    assert one.min == one.max == one.mean == one.median == 3.5
    assert one.std == 0.0 and not one.std_defined
    with pytest.raises(ValueError):
        summary([])


@given(x=samples)
def test_summary_order(x):
    s = summary(x)
    assert s.min <= s.median <= s.max and s.std >= 0


# Kolmogorov-Smirnov

def test_ks_hand_fixture():
    out = ks_one_sample([0.25, 0.5, 0.75], lambda v: np.clip(v, 0, 1))
    assert out.statistic == pytest.approx(0.25)


def test_ks_quantile_construction():
    n = 20
    x = sst.norm.ppf(np.arange(1, n + 1) / (n + 1))
    d = ks_one_sample(x, special.normal_cdf).statistic
    assert d <= 1 / (n + 1) + 1e-12


def test_ks_normality_false_alarm_rate():
    rejects = 0
    for seed in range(100):
        x = np.random.RandomState(seed).normal(size=10**4)
        rejects += ks_normality(x).reject
    assert rejects <= 5


def test_ks_normality_preconditions():
    with pytest.raises(ValueError):
        ks_normality([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        ks_normality([2.0] * 10)


def test_kolmogorov_series_against_scipy():
    for lam in np.linspace(0.2, 3.0, 29):
        assert special.kolmogorov_sf(lam) == pytest.approx(sst.kstwobign.sf(lam), abs=1e-10)


def test_ks_two_sample_examples():
    assert ks_two_sample([1, 2, 3], [1, 2, 3]) == 0.0
    assert ks_two_sample([1, 2], [5, 6]) == 1.0
    assert ks_two_sample([1, 2], [1, 3]) == 0.5
    with pytest.raises(ValueError):
        ks_two_sample([], [1.0])


ints = st.lists(st.integers(-1000, 1000), min_size=1, max_size=30)


@given(a=ints, b=ints)
def test_ks_two_sample_symmetric_and_invariant(a, b):
    d = ks_two_sample(a, b)
    assert d == ks_two_sample(b, a)
    with np.errstate(divide="ignore"):
        ref = sst.ks_2samp(a, b, method="asymp").statistic
    assert d == pytest.approx(ref, abs=1e-12)
    f = lambda v: np.arctan(np.asarray(v) / 100.0) * 3.0 + 1.0  # strictly increasing
    assert ks_two_sample(f(a), f(b)) == pytest.approx(d, abs=1e-12)


# F-test and ANOVA

def test_f_test_examples():
    rs = np.random.RandomState(0)
    a = _standardized(rs, 30, 1.0)
    out = f_test_variances(a, a + 5.0)
    assert out.statistic == pytest.approx(1.0) and out.p_value == pytest.approx(1.0)
    big = _standardized(rs, 30, 2.0)
    out = f_test_variances(a, big)
    assert out.statistic == pytest.approx(4.0)
    assert out.p_value == pytest.approx(2 * sst.f.sf(4.0, 29, 29), abs=1e-10)
    with pytest.raises(ValueError):
        f_test_variances([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        f_test_variances([1.0, 1.0], [1.0, 2.0])


def test_anova_identical_groups():
    out = anova_oneway([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]])
    assert out.statistic == 0.0 and not out.reject
    flat = anova_oneway([[4.0, 4.0], [4.0, 4.0], [4.0, 4.0]])
    assert flat.statistic == 0.0 and flat.p_value == 1.0


def test_anova_three_group_fixture():
    g = [[6.1, 5.9, 6.3, 6.8, 5.7], [7.2, 6.9, 7.5, 7.1, 6.6], [5.5, 6.0, 5.8, 5.2, 6.1, 5.9]]
    out = anova_oneway(g)
    ref = sst.f_oneway(*g)
    assert out.statistic == pytest.approx(ref.statistic, rel=1e-12)
    assert abs(out.p_value - ref.pvalue) < 1e-3
    assert out.critical == pytest.approx(sst.f.isf(0.1, 2, 13), rel=1e-10)
    assert out.reject == (out.statistic > out.critical)


def test_anova_equals_t_squared():
    rs = np.random.RandomState(1)
    for _ in range(100):
        a = rs.normal(0, 1, rs.randint(2, 30))
        b = rs.normal(rs.uniform(-1, 1), 1, rs.randint(2, 30))
        an = anova_oneway([a, b])
        t = t_test(a, b, "two", pooled=True)
        assert an.statistic == pytest.approx(t.statistic ** 2, rel=1e-9)
        assert abs(an.p_value - t.p_value) <= 1e-9


# t-tests

def test_t_examples():
    a = [1.0, 2.0, 3.0]
    out = t_test(a, a)
    assert out.statistic == 0.0 and out.p_value == 1.0
    const = t_test([2.0, 2.0], [2.0, 2.0], pooled=False)
    assert const.statistic == 0.0 and const.p_value == 1.0
    assert special.t_two_sided(2.0, 10) == pytest.approx(0.0734, abs=1e-3)
    assert special.t_sf(2.0, 10) == pytest.approx(0.0367, abs=1e-3)
    with pytest.raises(ValueError):
        t_test([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        t_test(a, a, sides="one")


def test_t_against_scipy():
    rs = np.random.RandomState(2)
    a, b = rs.normal(0, 1, 25), rs.normal(0.4, 2, 31)
    for pooled in (True, False):
        for side, alt in (("two", "two-sided"), ("greater", "greater"), ("less", "less")):
            got = t_test(a, b, side, pooled)
            ref = sst.ttest_ind(a, b, equal_var=pooled, alternative=alt)
            assert got.statistic == pytest.approx(ref.statistic, rel=1e-12)
            assert got.p_value == pytest.approx(ref.pvalue, abs=1e-12)


def test_welch_df_collapses():
    rs = np.random.RandomState(3)
    a = _standardized(rs, 12, 1.5)
    b = _standardized(rs, 12, 1.5) + 1.0
    assert t_test(a, b, pooled=False).df == pytest.approx(t_test(a, b, pooled=True).df, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(a=samples, b=samples)
def test_p_values_in_unit_interval(a, b):
    if np.var(a) == 0 and np.var(b) == 0:
        return
    two = t_test(a, b, "two")
    g = t_test(a, b, "greater")
    l = t_test(a, b, "less")
    for o in (two, g, l):
        assert 0.0 <= o.p_value <= 1.0
        assert o.reject == (o.p_value < 0.1)
    if math.isfinite(two.statistic):
        assert two.p_value == pytest.approx(min(1.0, 2 * min(g.p_value, l.p_value)), abs=1e-12)


# special functions

def test_betainc_closed_forms():
    for x in np.linspace(0, 1, 11):
        assert special.betainc(1, 1, x) == pytest.approx(x, abs=1e-15)
    for a in (0.5, 1.0, 2.5, 7.0, 40.0):
        assert special.betainc(a, a, 0.5) == pytest.approx(0.5, abs=1e-12)
    assert abs(special.betainc(2, 3, 0.3) - 0.3483) <= 1e-10


def test_betainc_grid_against_scipy():
    for a in (0.5, 1.0, 3.0, 12.5, 60.0):
        for b in (0.5, 2.0, 9.0, 45.0):
            for x in (0.01, 0.2, 0.5, 0.77, 0.99):
                assert abs(special.betainc(a, b, x) - ssp.betainc(a, b, x)) <= 1e-10


def test_gammainc_and_erf_against_references():
    a = np.array([0.5, 1.0, 2.5, 10.0, 50.0])
    for x in (0.01, 0.5, 2.0, 9.0, 60.0):
        assert np.max(np.abs(special.gammainc(a, x) - ssp.gammainc(a, x))) <= 1e-10
    for x in np.linspace(-4, 4, 41):
        assert special.erf(x) == pytest.approx(math.erf(x), abs=1e-10)


def test_special_domain_errors():
    with pytest.raises(ValueError):
        special.betainc(0, 1, 0.5)
    with pytest.raises(ValueError):
        special.betainc(1, 1, 1.5)
    with pytest.raises(ValueError):
        special.gammainc(-1.0, 1.0)


def test_f_ppf_round_trip():
    for d1, d2 in ((1, 10), (2, 87), (5, 5)):
        c = special.f_ppf_upper(0.1, d1, d2)
        assert special.f_sf(c, d1, d2) == pytest.approx(0.1, abs=1e-12)


# pipeline

def test_pipeline_identical_groups():
    g = np.random.RandomState(4).normal(size=20)
    rep = stats_pipeline({"A": g, "B": g.copy(), "C": g.copy()})
    assert rep.branch == "anova"
    assert all(c.relation == "=" for c in rep.comparisons)
    assert rep.equal_variances


def test_pipeline_orders_means():
    rs = np.random.RandomState(5)
    base = _standardized(rs, 20, 0.01)
    rep = stats_pipeline({"A": base, "B": rs.permutation(base), "C": base + 10.0})
    assert rep.branch == "anova -> pooled t"
    assert rep.greatest == ["C"]
    assert set(rep.smallest) == {"A", "B"}


def test_pipeline_welch_branch():
    rs = np.random.RandomState(6)
    rep = stats_pipeline({"A": rs.normal(0, 1, 30), "B": rs.normal(0, 20, 30)})
    assert rep.branch == "welch"
    assert rep.comparisons[0].test == "welch t"


def test_pipeline_excludes_constant_column():
    rs = np.random.RandomState(7)
    rep = stats_pipeline({"A": [1.0] * 10, "B": rs.normal(size=10), "C": rs.normal(size=10)})
    assert rep.excluded == ["A"] and rep.notices
    assert "A" not in rep.greatest + rep.smallest
    text = rep.to_markdown()
    assert "excluded" in text
    with pytest.raises(ValueError):
        stats_pipeline({"A": [1.0, 2.0]})


def test_alpha_config():
    with pytest.raises(ValueError):
        StatConfig(1.5)
    assert StatConfig().alpha == 0.1
