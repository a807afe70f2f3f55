"""Field containers, boundary handling, sampling and resampling.

Conventions used throughout the package:

* a scalar field is a 2D float64 array of shape ``(H, W)``, indexed
  ``f[y, x]`` with pixel centers at integer coordinates,
* a displacement field is an array of shape ``(2, H, W)`` holding the
  x-component ``u1`` and the y-component ``u2`` in pixels,
* out-of-grid accesses use whole-sample mirror reflection about the
  edge pixel.
"""

import numpy as np
from scipy import ndimage

# 5-tap binomial low-pass used as anti-alias prefilter before resampling.
_BINOMIAL5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def as_field(values):
    """Coerce to a 2D float64 array and validate finiteness."""
    f = np.asarray(values, dtype=np.float64)
    if f.ndim != 2 or f.size == 0:
        raise ValueError("scalar field must be a non-empty 2D array")
    if not np.all(np.isfinite(f)):
        raise ValueError("scalar field contains non-finite values")
    return f


def mirror_index(i, n):
    """Reflect index ``i`` into ``[0, n)`` about the edge samples.

    Whole-sample reflection: -1 -> 1, n -> n-2 (for n >= 2).
    Idempotent for indices already in range.
    """
    if n == 1:
        return np.zeros_like(np.asarray(i))[()] if np.ndim(i) else 0
    period = 2 * n - 2
    m = np.mod(i, period)
    m = np.where(m >= n, period - m, m)
    return m[()] if np.ndim(m) else int(m)


def sample_bilinear(f, x, y):
    """Bilinearly interpolate ``f`` at continuous coordinates ``(x, y)``.

    ``x`` indexes columns and ``y`` rows; out-of-grid neighbors are
    resolved by mirror reflection. Accepts scalars or arrays.
    """
    f = np.asarray(f, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("invalid sample coordinate")
    h, w = f.shape
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = x - x0
    fy = y - y0
    xa = mirror_index(x0, w)
    xb = mirror_index(x0 + 1, w)
    ya = mirror_index(y0, h)
    yb = mirror_index(y0 + 1, h)
    v00 = f[ya, xa]
    v01 = f[ya, xb]
    v10 = f[yb, xa]
    v11 = f[yb, xb]
    top = v00 * (1.0 - fx) + v01 * fx
    bot = v10 * (1.0 - fx) + v11 * fx
    out = top * (1.0 - fy) + bot * fy
    return out[()] if np.ndim(out) else float(out)


def median_filter(f, radius=2):
    """Median over the (2r+1)^2 mirror-extended window around each pixel."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    return ndimage.median_filter(
        np.asarray(f, dtype=np.float64), size=2 * radius + 1, mode="mirror"
    )


def _lowpass_1d(f, axis):
    """Separable binomial prefilter along one axis.

    The boundary is handled by linear extrapolation, which makes the
    filter exact on linear ramps and keeps outputs inside [min, max]
    (for this kernel the edge pixel reduces to the identity).
    """
    f = np.moveaxis(f, axis, 0)
    n = f.shape[0]
    if n < 2:
        return np.moveaxis(f, 0, axis)
    pad = np.empty((n + 4,) + f.shape[1:], dtype=np.float64)
    pad[2:-2] = f
    pad[1] = 2.0 * f[0] - f[1]
    pad[0] = 2.0 * f[0] - f[2] if n > 2 else 2.0 * f[0] - f[1]
    pad[-2] = 2.0 * f[-1] - f[-2]
    pad[-1] = 2.0 * f[-1] - f[-3] if n > 2 else 2.0 * f[-1] - f[-2]
    out = np.zeros_like(f)
    for k, wk in enumerate(_BINOMIAL5):
        out += wk * pad[k : k + n]
    return np.moveaxis(out, 0, axis)


def _resample_bilinear(f, new_w, new_h):
    """Bilinear resampling with endpoint-aligned coordinate mapping."""
    h, w = f.shape
    xs = np.linspace(0.0, w - 1.0, new_w) if new_w > 1 else np.zeros(1)
    ys = np.linspace(0.0, h - 1.0, new_h) if new_h > 1 else np.zeros(1)
    gx, gy = np.meshgrid(xs, ys)
    return sample_bilinear(f, gx, gy)


def downsample(f, factor):
    """Low-pass prefilter then bilinear resampling by ``factor`` in (0, 1)."""
    if not (0.0 < factor < 1.0):
        raise ValueError("downsample factor must lie in (0, 1)")
    f = np.asarray(f, dtype=np.float64)
    h, w = f.shape
    new_w = int(np.ceil(w * factor))
    new_h = int(np.ceil(h * factor))
    if new_w < 1 or new_h < 1:
        raise ValueError("downsampled dimensions must be >= 1")
    g = _lowpass_1d(_lowpass_1d(f, 0), 1)
    return _resample_bilinear(g, new_w, new_h)


def upsample_flow(u, new_w, new_h, value_scale):
    """Resample both flow components to (new_w, new_h) and rescale values."""
    u = np.asarray(u, dtype=np.float64)
    out = np.empty((2, new_h, new_w), dtype=np.float64)
    for k in range(2):
        out[k] = _resample_bilinear(u[k], new_w, new_h) * value_scale
    return out
