"""Warping-based linearization of the brightness-constancy data term."""

from dataclasses import dataclass

import numpy as np

from .diffops import grad_forward
from .grid import sample_bilinear


@dataclass
class LinearizedData:
    """Per-pixel coefficients of the linearized data term |A u1 + B u2 + c|."""

    A: np.ndarray
    B: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        if not (self.A.shape == self.B.shape == self.c.shape):
            raise ValueError("A, B, c must share dimensions")
        if not all(np.all(np.isfinite(p)) for p in (self.A, self.B, self.c)):
            raise ValueError("linearized data contains non-finite values")


def _warp_coords(shape, u):
    h, w = shape
    gy, gx = np.mgrid[0:h, 0:w].astype(np.float64)
    return gx + u[0], gy + u[1]


def warp_image(f2, ubar):
    """Sample f2 at j + ubar(j) with bilinear interpolation."""
    ubar = np.asarray(ubar, dtype=np.float64)
    if not np.all(np.isfinite(ubar)):
        raise ValueError("non-finite flow")
    x, y = _warp_coords(f2.shape, ubar)
    return sample_bilinear(f2, x, y)


def linearize(f1, f2, ubar):
    """First-order expansion of the data term around the flow ubar.

    The gradient planes of f2 are formed by forward differences on the
    original grid first and then bilinearly sampled at the warped
    positions (not gradients of the warped image).
    """
    f1 = np.asarray(f1, dtype=np.float64)
    f2 = np.asarray(f2, dtype=np.float64)
    ubar = np.asarray(ubar, dtype=np.float64)
    if f1.shape != f2.shape or ubar.shape[1:] != f1.shape:
        raise ValueError("image and flow dimensions must match")
    gx, gy = grad_forward(f2)
    x, y = _warp_coords(f2.shape, ubar)
    A = sample_bilinear(gx, x, y)
    B = sample_bilinear(gy, x, y)
    fw = sample_bilinear(f2, x, y)
    c = -A * ubar[0] - B * ubar[1] + fw - f1
    return LinearizedData(A=A, B=B, c=c)


def data_energy(u, L):
    """Sum over pixels of |A u1 + B u2 + c|."""
    u = np.asarray(u, dtype=np.float64)
    return float(np.sum(np.abs(L.A * u[0] + L.B * u[1] + L.c)))
