import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaosde.chaos_maps import GINGERBREAD, TINKERBELL, MapPoint, iterate
from chaosde.mt19937 import MT19937
from chaosde.normalizers import (
    BELOW_ONE,
    Atan2,
    Bounds,
    BoundsEstimate,
    CenterState,
    Modulo,
    normalize_atan2,
    normalize_bounds,
    normalize_modulo,
    update_center,
)
from chaosde.sources import (
    ChaoticSource,
    EmpiricalDistribution,
    MatchedSource,
    MtSource,
    ScriptedSource,
    SourceSpec,
    build_empirical_distribution,
    is_unit,
    jittered_start,
    make_chaotic,
    rand_index,
    rand_range,
    reference_distribution,
)
from chaosde.statistics import ks_two_sample


# Mersenne Twister against numpy's independent implementation

def test_mt_reference_words():
    mt = MT19937(5489)
    w = mt.words(20000)
    assert w[0] == 3499211612
    assert w[9999] == 4123659995
    ref = np.random.RandomState(5489).randint(0, 2**32, size=20000, dtype=np.uint64)
    assert np.array_equal(w.astype(np.uint64), ref)


@pytest.mark.parametrize("seed", [0, 1, 42, 2**32 - 1])
def test_mt_other_seeds(seed):
    ref = np.random.RandomState(seed).randint(0, 2**32, size=1500, dtype=np.uint64)
    assert np.array_equal(MT19937(seed).words(1500).astype(np.uint64), ref)


def test_mt_unit_conversion():
    assert MtSource(5489).next_unit() == 3499211612 / 2**32
    assert MtSource(5489).next_unit() == pytest.approx(0.8147236919, abs=1e-10)


def test_mt_word_and_block_paths_agree():
    a = MT19937(7)
    b = MT19937(7)
    singles = [a.next_word() for _ in range(1300)]
    assert singles == list(b.words(1300))


# Unit helpers

@pytest.mark.parametrize("u, n, want", [(0.0, 5, 0), (BELOW_ONE, 5, 4), (0.5, 4, 2)])
def test_rand_index(u, n, want):
    assert rand_index(ScriptedSource([u]), n) == want


@pytest.mark.parametrize("u, lo, hi, want", [(0.0, -3.0, 7.0, -3.0), (0.5, -100, 100, 0.0), (0.25, 0, 8, 2.0)])
def test_rand_range(u, lo, hi, want):
    assert rand_range(ScriptedSource([u]), lo, hi) == want


def test_rand_range_rejects_empty():
    with pytest.raises(ValueError):
        rand_range(ScriptedSource([0.1]), 1.0, 1.0)


@given(u=st.floats(0, 1, exclude_max=True), n=st.integers(1, 10**6))
def test_rand_index_in_range(u, n):
    assert 0 <= rand_index(ScriptedSource([u]), n) < n


def test_scripted_source():
    s = ScriptedSource([0.1, 0.2])
    assert s.next_units(2).tolist() == [0.1, 0.2]
    with pytest.raises(IndexError):
        s.next_unit()
    c = ScriptedSource([0.1, 0.2], cycle=True)
    assert c.next_units(5).tolist() == [0.1, 0.2, 0.1, 0.2, 0.1]
    with pytest.raises(ValueError):
        ScriptedSource([1.0])


def test_block_size_never_changes_stream():
    a = MtSource(11)
    b = MtSource(11)
    chunks = [a.next_units(k) for k in (1, 7, 5000, 3, 9000)]
    singles = np.array([b.next_unit() for _ in range(sum(map(len, chunks)))])
    assert np.array_equal(np.concatenate(chunks), singles)


# Chaotic sources

def test_gingerbread_modulo_hand_stream():
    # x stream 6.3, -1.7, -3.6 under |n| mod 1
    src = make_chaotic("gingerbread", "modulo")
    assert src.next_units(3) == pytest.approx([0.3, 0.7, 0.6], abs=1e-12)


def test_gingerbread_bounds_first_output_clamped():
    src = ChaoticSource(GINGERBREAD, Bounds(BoundsEstimate(-3.6, 6.3, 3)))
    assert src.next_unit() == BELOW_ONE


def _reference_stream(kind, scheme, n, start=None):
    start = kind.start if start is None else start
    if scheme == "atan2":
        warm = iterate(kind, start, 1000)
        c = CenterState()
        for p in warm:
            c = update_center(c, p)
        out = []
        for p in iterate(kind, warm[-1], n):
            c = update_center(c, p)
            out.append(normalize_atan2(p, c))
        return np.array(out)
    pts = iterate(kind, start, n)
    xs = np.array([p.x for p in pts])
    if scheme == "modulo":
        return np.array([normalize_modulo(float(x)) for x in xs])
    src = make_chaotic(kind.name, "bounds")
    return np.array([normalize_bounds(float(x), src.normalizer.estimate) for x in xs])


@pytest.mark.parametrize("kind", [GINGERBREAD, TINKERBELL])
@pytest.mark.parametrize("scheme", ["modulo", "bounds", "atan2"])
def test_chaotic_stream_bit_identical_to_reference(kind, scheme):
    start = jittered_start(kind, 99)
    got = make_chaotic(kind.name, scheme, start).next_units(6000)
    assert np.array_equal(got, _reference_stream(kind, scheme, 6000, start))


def test_chaotic_source_state_tracks_map():
    src = ChaoticSource(GINGERBREAD, Modulo())
    src.next_units(2)
    # the map runs a whole block ahead of what has been consumed
    assert src.current == iterate(GINGERBREAD, GINGERBREAD.start, 4096)[-1]
    a = ChaoticSource(TINKERBELL, Atan2())
    assert a.center.count == 1000
    a.next_unit()
    assert a.center.count == 1000 + 4096  # whole block consumed into the center
    assert a.label == "chaos:tinkerbell:atan2"


def test_jittered_start_small():
    for seed in range(20):
        p = jittered_start(TINKERBELL, seed)
        assert abs(p.x - 0.1) <= 1e-3 and abs(p.y + 0.1) <= 1e-3
    assert jittered_start(GINGERBREAD, 5) == jittered_start(GINGERBREAD, 5)
    assert jittered_start(GINGERBREAD, 5) != jittered_start(GINGERBREAD, 6)


# Empirical distribution and matching

def test_interpolation_examples():
    d = EmpiricalDistribution.from_counts([3, 1])
    assert d.cdf.tolist() == [0.0, 0.75, 1.0]
    assert d.invert(0.375) == pytest.approx(0.25)
    assert d.invert(0.0) == 0.0
    assert d.invert(0.75) == pytest.approx(0.5)


def test_constant_source_cdf():
    d = build_empirical_distribution(ScriptedSource([0.25], cycle=True), 10**5, 4)
    assert d.cdf.tolist() == [0.0, 0.0, 1.0, 1.0, 1.0]


def test_build_preconditions():
    with pytest.raises(ValueError):
        build_empirical_distribution(MtSource(), 10**4, 16)
    with pytest.raises(ValueError):
        build_empirical_distribution(MtSource(), 10**5, 1)


def test_uniform_source_gives_flat_cdf():
    n, bins = 10**6, 64
    d = build_empirical_distribution(MtSource(3), n, bins)
    inc = np.diff(d.cdf)
    assert np.max(np.abs(inc - 1 / bins)) <= 5 * np.sqrt(1 / (n * bins))


def test_tinkerbell_modulo_cdf_not_flat():
    d = reference_distribution("tinkerbell", "modulo", 10**6, 64)
    assert np.max(np.abs(np.diff(d.cdf) - 1 / 64)) > 0.01


def test_cdf_monotone_and_anchored():
    d = reference_distribution("gingerbread", "atan2", 10**5, 256)
    assert d.cdf[0] == 0.0 and d.cdf[-1] == 1.0
    assert np.all(np.diff(d.cdf) >= 0)


def test_matched_source_avoids_empty_bins():
    counts = np.zeros(16, dtype=int)
    counts[[2, 3, 9]] = [5, 1, 10]
    d = EmpiricalDistribution.from_counts(counts)
    u = MatchedSource(d, 1).next_units(10**5)
    bins = np.floor(u * 16).astype(int)
    assert set(np.unique(bins)) <= {2, 3, 9}
    assert is_unit(u)


@settings(max_examples=50, deadline=None)
@given(counts=st.lists(st.integers(0, 20), min_size=2, max_size=40).filter(lambda c: sum(c) > 0),
       u=st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=50))
def test_inverse_cdf_property(counts, u):
    d = EmpiricalDistribution.from_counts(counts)
    z = np.atleast_1d(d.invert(np.array(u)))
    assert is_unit(z)
    j = np.floor(z * len(counts)).astype(int)
    assert np.all(np.asarray(counts)[j] > 0)
    assert np.all(np.diff(z[np.argsort(u)]) >= 0)


@pytest.mark.parametrize("m", ["gingerbread", "tinkerbell"])
@pytest.mark.parametrize("scheme", ["modulo", "bounds", "atan2"])
def test_matched_ks_against_chaotic(m, scheme):
    d = reference_distribution(m, scheme)
    a = MatchedSource(d, 2024).next_units(10**5)
    b = make_chaotic(m, scheme).next_units(10**5)
    assert ks_two_sample(a, b) <= 0.02


# Spec strings

@pytest.mark.parametrize("text", ["mt", "chaos:tinkerbell:atan2", "matched:gingerbread:bounds"])
def test_spec_round_trip(text):
    assert str(SourceSpec.parse(text)) == text


@pytest.mark.parametrize("text", ["", "mt:x", "chaos:lorenz:atan2", "chaos:tinkerbell:sine", "foo:a:b"])
def test_spec_rejects(text):
    with pytest.raises(ValueError):
        SourceSpec.parse(text)


def test_sources_replay():
    for make in (lambda: MtSource(9), lambda: make_chaotic("tinkerbell", "atan2", MapPoint(0.1005, -0.1)),
                 lambda: MatchedSource(reference_distribution("tinkerbell", "bounds"), 9)):
        assert np.array_equal(make().next_units(5000), make().next_units(5000))
