"""Compiled inner loops for map iteration and the running-center atan2 stream.

Every kernel performs the same IEEE operations, in the same order, as the
pure-Python reference functions in :mod:`chaosde.chaos_maps` and
:mod:`chaosde.normalizers`; the test-suite checks bit equality.
"""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def gingerbread_orbit(x, y, n):
    xs = np.empty(n)
    ys = np.empty(n)
    for k in range(n):
        x, y = 1.0 - y + abs(x), x
        if not (math.isfinite(x) and math.isfinite(y)):
            return xs, ys, k
        xs[k] = x
        ys[k] = y
    return xs, ys, -1


@njit(cache=True)
def tinkerbell_orbit(x, y, a, b, c, d, n):
    xs = np.empty(n)
    ys = np.empty(n)
    for k in range(n):
        x, y = x * x - y * y + a * x + b * y, 2.0 * x * y + c * x + d * y
        if not (math.isfinite(x) and math.isfinite(y)):
            return xs, ys, k
        xs[k] = x
        ys[k] = y
    return xs, ys, -1


@njit(cache=True)
def atan2_stream(xs, ys, mean_x, mean_y, count):
    """Update the running center with each point, then emit its phase angle."""
    n = xs.shape[0]
    out = np.empty(n)
    two_pi = 2.0 * math.pi
    for k in range(n):
        count += 1
        mean_x = mean_x + (xs[k] - mean_x) / count
        mean_y = mean_y + (ys[k] - mean_y) / count
        dx = xs[k] - mean_x
        dy = ys[k] - mean_y
        if dx == 0.0 and dy == 0.0:
            out[k] = 0.0
            continue
        z = (math.atan2(dy, dx) + math.pi) / two_pi
        if z >= 1.0:
            z = 0.0
        out[k] = z
    return out, mean_x, mean_y, count


@njit(cache=True)
def running_center(xs, ys, mean_x, mean_y, count):
    for k in range(xs.shape[0]):
        count += 1
        mean_x = mean_x + (xs[k] - mean_x) / count
        mean_y = mean_y + (ys[k] - mean_y) / count
    return mean_x, mean_y, count
