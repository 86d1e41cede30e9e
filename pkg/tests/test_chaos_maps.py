import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaosde.chaos_maps import (
    GINGERBREAD,
    TINKERBELL,
    MapEscapeError,
    MapPoint,
    TinkerbellParams,
    get_map,
    gingerbread_step,
    iterate,
    orbit,
    tinkerbell_step,
)

finite = st.floats(-50, 50, allow_nan=False)


def test_default_points_and_params():
    assert GINGERBREAD.start == MapPoint(9.0, 3.7)
    assert TINKERBELL.start == MapPoint(0.1, -0.1)
    q = TinkerbellParams()
    assert (q.a, q.b, q.c, q.d) == (0.9, -0.6013, 2.0, 0.5)


@pytest.mark.parametrize("p, want", [
    ((9.0, 3.7), (6.3, 9.0)),
    ((0.0, 0.0), (1.0, 0.0)),
    ((6.3, 9.0), (-1.7, 6.3)),
])
def test_gingerbread_hand_values(p, want):
    out = gingerbread_step(MapPoint(*p))
    assert out.x == pytest.approx(want[0], abs=1e-12)
    assert out.y == pytest.approx(want[1], abs=1e-12)


def test_tinkerbell_hand_values():
    p = tinkerbell_step(MapPoint(0.1, -0.1))
    assert p.x == pytest.approx(0.15013, abs=1e-14)
    assert p.y == pytest.approx(0.13, abs=1e-14)
    assert tinkerbell_step(MapPoint(0.0, 0.0)) == MapPoint(0.0, 0.0)
    # second step by explicit formula
    x, y = p.x, p.y
    q = tinkerbell_step(p)
    assert q.x == x * x - y * y + 0.9 * x - 0.6013 * y
    assert q.y == 2 * x * y + 2.0 * x + 0.5 * y


def test_iterate_hand_orbit():
    pts = iterate(GINGERBREAD, GINGERBREAD.start, 2)
    assert [(round(p.x, 12), round(p.y, 12)) for p in pts] == [(6.3, 9.0), (-1.7, 6.3)]
    assert iterate(TINKERBELL, TINKERBELL.start, 0) == []


def test_iterate_rejects_negative():
    with pytest.raises(ValueError):
        iterate(GINGERBREAD, GINGERBREAD.start, -1)


@pytest.mark.parametrize("kind", [GINGERBREAD, TINKERBELL])
def test_kernel_bit_identical_to_reference(kind):
    ref = iterate(kind, kind.start, 5000)
    xs, ys = orbit(kind, kind.start, 5000)
    assert np.array_equal(xs, [p.x for p in ref])
    assert np.array_equal(ys, [p.y for p in ref])


@settings(max_examples=30, deadline=None)
@given(n=st.integers(0, 300), m=st.integers(0, 300), kind=st.sampled_from([GINGERBREAD, TINKERBELL]))
def test_composition(n, m, kind):
    whole = iterate(kind, kind.start, n + m)
    head = iterate(kind, kind.start, n)
    last = head[-1] if head else kind.start
    assert whole == head + iterate(kind, last, m)


def test_tinkerbell_bounded_with_jitter():
    rs = np.random.RandomState(3)
    for _ in range(3):
        dx, dy = rs.uniform(-1e-3, 1e-3, 2)
        xs, ys = orbit(TINKERBELL, MapPoint(0.1 + dx, -0.1 + dy), 10**6)
        assert np.all(np.abs(xs) < 2) and np.all(np.abs(ys) < 2)


def test_escape_reports_index():
    with pytest.raises(MapEscapeError) as ei:
        orbit(TINKERBELL, MapPoint(5.0, 5.0), 100)
    ref_idx = None
    try:
        iterate(TINKERBELL, MapPoint(5.0, 5.0), 100)
    except MapEscapeError as e:
        ref_idx = e.index
    assert ei.value.index == ref_idx
    assert ei.value.index >= 0


@given(x=finite, y=finite)
def test_gingerbread_step_matches_formula(x, y):
    p = gingerbread_step(MapPoint(x, y))
    assert p.x == 1.0 - y + abs(x) and p.y == x
    assert p.is_finite()


def test_get_map():
    assert get_map("Tinkerbell") is TINKERBELL
    with pytest.raises(ValueError):
        get_map("henon")


def test_deterministic():
    a = orbit(GINGERBREAD, GINGERBREAD.start, 1000)
    b = orbit(GINGERBREAD, GINGERBREAD.start, 1000)
    assert all(np.array_equal(u, v) for u, v in zip(a, b))
    assert math.isfinite(a[0][-1])
