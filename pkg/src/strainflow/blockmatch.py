"""Naive block-matching baseline: per-pixel ZNCC over a search range."""

import numpy as np
from scipy import ndimage

_VAR_EPS = 1e-12


def _shift_mirror(f, dx, dy):
    """Integer shift with mirror boundary: out(j) = f(j + (dx, dy))."""
    h, w = f.shape
    ys = np.arange(h) + dy
    xs = np.arange(w) + dx
    ys = np.where(ys < 0, -ys, ys)
    ys = np.where(ys > h - 1, 2 * (h - 1) - ys, ys)
    xs = np.where(xs < 0, -xs, xs)
    xs = np.where(xs > w - 1, 2 * (w - 1) - xs, xs)
    return f[np.ix_(ys, xs)]


def block_match_baseline(f1, f2, window=9, search=4):
    """Integer-displacement ZNCC matching with parabolic sub-pixel refinement.

    Ties are broken toward the smaller displacement magnitude; windows
    with (near) zero variance get displacement 0.
    """
    f1 = np.asarray(f1, dtype=np.float64)
    f2 = np.asarray(f2, dtype=np.float64)
    if f1.shape != f2.shape:
        raise ValueError("image dimensions must match")
    if window % 2 != 1 or window > min(f1.shape):
        raise ValueError("window must be odd and <= the smaller image side")
    h, w = f1.shape
    k = 2 * search + 1

    def box(f):
        return ndimage.uniform_filter(f, size=window, mode="mirror")

    m1 = box(f1)
    v1 = box(f1 * f1) - m1 * m1

    scores = np.full((k, k, h, w), -np.inf)
    for dy in range(-search, search + 1):
        for dx in range(-search, search + 1):
            f2s = _shift_mirror(f2, dx, dy)
            m2 = box(f2s)
            v2 = box(f2s * f2s) - m2 * m2
            cov = box(f1 * f2s) - m1 * m2
            denom = np.sqrt(np.maximum(v1, 0.0) * np.maximum(v2, 0.0))
            cc = np.where(denom > _VAR_EPS, cov / np.maximum(denom, _VAR_EPS), -np.inf)
            scores[dy + search, dx + search] = cc

    # visit candidates by increasing magnitude so strict improvement
    # breaks ties toward the smaller displacement
    order = sorted(
        ((dy, dx) for dy in range(-search, search + 1) for dx in range(-search, search + 1)),
        key=lambda d: (d[0] * d[0] + d[1] * d[1], abs(d[0]), abs(d[1])),
    )
    best = np.full((h, w), -np.inf)
    best_dx = np.zeros((h, w), dtype=np.int64)
    best_dy = np.zeros((h, w), dtype=np.int64)
    for dy, dx in order:
        cc = scores[dy + search, dx + search]
        better = cc > best
        best = np.where(better, cc, best)
        best_dx = np.where(better, dx, best_dx)
        best_dy = np.where(better, dy, best_dy)

    u = np.zeros((2, h, w))
    valid = np.isfinite(best)
    u[0] = np.where(valid, best_dx, 0.0)
    u[1] = np.where(valid, best_dy, 0.0)

    # 3-point parabolic refinement along each axis, interior maxima only
    jy, jx = np.mgrid[0:h, 0:w]
    for axis, bd in ((0, best_dx), (1, best_dy)):
        interior = valid & (np.abs(bd) < search)
        iy = best_dy + search
        ix = best_dx + search
        if axis == 0:
            c0 = scores[iy, ix, jy, jx]
            cm = scores[iy, np.clip(ix - 1, 0, k - 1), jy, jx]
            cp = scores[iy, np.clip(ix + 1, 0, k - 1), jy, jx]
        else:
            c0 = scores[iy, ix, jy, jx]
            cm = scores[np.clip(iy - 1, 0, k - 1), ix, jy, jx]
            cp = scores[np.clip(iy + 1, 0, k - 1), ix, jy, jx]
        # flat windows carry -inf scores; keep them out of the arithmetic
        with np.errstate(invalid="ignore"):
            denom = cm - 2.0 * c0 + cp
            # a perfect-correlation peak is already exact; the parabola
            # vertex would only move it off the true integer displacement
            refinable = c0 < 1.0 - 1e-6
            ok = (
                interior & refinable & np.isfinite(cm) & np.isfinite(cp)
                & np.isfinite(denom) & (np.abs(denom) > _VAR_EPS)
            )
            delta = np.where(ok, 0.5 * (cm - cp) / np.where(ok, denom, 1.0), 0.0)
        u[axis] += np.clip(delta, -0.5, 0.5)
    return u
