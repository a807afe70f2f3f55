"""Synthetic ground-truth displacement fields, image-pair synthesis and
flow error metrics."""

from dataclasses import dataclass

import numpy as np

from .grid import sample_bilinear, _resample_bilinear


@dataclass
class SyntheticSpec:
    kind: str = "piecewise_plus_linear"
    jump_amplitude: float = 1.0
    ramp_slope: float = 0.02
    # bands of constant displacement, in fractions of the width
    bands: tuple = ((0.1, 0.2), (0.3, 0.4), (0.5, 0.6), (0.7, 0.8), (0.9, 0.96))
    # width in pixels of the linear transition for the half/half field
    ramp_width: int = 40
    seed: int = 7

    def __post_init__(self):
        if self.kind not in ("piecewise_plus_linear", "half_jump_half_linear"):
            raise ValueError(f"unknown synthetic kind {self.kind!r}")


def gen_piecewise_plus_linear(w, h, spec):
    """u1 = jump * indicator(vertical bands) + slope * (x - w/2); u2 = 0."""
    if min(w, h) < 8:
        raise ValueError("dims must be >= 8")
    x = np.arange(w, dtype=np.float64)
    band = np.zeros(w, dtype=bool)
    for lo, hi in spec.bands:
        band |= (x >= round(lo * w)) & (x < round(hi * w))
    row = spec.jump_amplitude * band + spec.ramp_slope * (x - w / 2.0)
    u = np.zeros((2, h, w))
    u[0] = row[None, :]
    return u


def jump_columns(w, spec):
    """Column indices of the vertical discontinuity lines."""
    cols = []
    for lo, hi in spec.bands:
        cols.extend([int(round(lo * w)), int(round(hi * w))])
    return sorted(set(cols))


def gen_half_jump_half_linear(w, h, spec):
    """Linear x-transition of u1 in the upper half, a jump in the lower half.

    Both halves share the same plateau values left and right of the
    center column, so the field is continuous at the half-height line but
    is not an additive combination of one global smooth and one global
    non-smooth part.
    """
    if min(w, h) < 8:
        raise ValueError("dims must be >= 8")
    x = np.arange(w, dtype=np.float64)
    x0 = w / 2.0
    half_w = spec.ramp_width / 2.0
    ramp_row = np.clip((x - (x0 - half_w)) / max(spec.ramp_width, 1), 0.0, 1.0)
    ramp_row *= spec.jump_amplitude
    jump_row = spec.jump_amplitude * (x >= x0)
    u = np.zeros((2, h, w))
    u[0, : h // 2, :] = ramp_row[None, :]
    u[0, h // 2 :, :] = jump_row[None, :]
    return u


def value_noise_texture(w, h, seed=7, octaves=4):
    """Deterministic multi-scale value-noise texture in [0, 1].

    Stand-in for a micrograph crop so tests run without external data.
    """
    rng = np.random.default_rng(seed)
    out = np.zeros((h, w))
    amp = 1.0
    cell = 4
    for _ in range(octaves):
        gw = max(2, w // cell)
        gh = max(2, h // cell)
        coarse = rng.random((gh, gw))
        out += amp * _resample_bilinear(coarse, w, h)
        amp *= 0.55
        cell *= 3
    out -= out.min()
    rngmax = out.max()
    if rngmax > 0:
        out /= rngmax
    return out


def warp_generate(base, u_true):
    """Image pair consistent with brightness constancy: f1(x) = f2(x + u(x)).

    The second frame is the base texture itself; the first frame samples
    the base at the displaced positions.
    """
    base = np.asarray(base, dtype=np.float64)
    u_true = np.asarray(u_true, dtype=np.float64)
    h, w = base.shape
    gy, gx = np.mgrid[0:h, 0:w].astype(np.float64)
    f1 = sample_bilinear(base, gx + u_true[0], gy + u_true[1])
    return f1, base


def endpoint_error(u, u_true):
    """Mean and max per-pixel Euclidean flow error."""
    d = np.asarray(u, dtype=np.float64) - np.asarray(u_true, dtype=np.float64)
    epe = np.sqrt(d[0] ** 2 + d[1] ** 2)
    return float(epe.mean()), float(epe.max())


def generate(spec, w, h):
    """Dispatch on spec.kind."""
    if spec.kind == "piecewise_plus_linear":
        return gen_piecewise_plus_linear(w, h, spec)
    return gen_half_jump_half_linear(w, h, spec)
