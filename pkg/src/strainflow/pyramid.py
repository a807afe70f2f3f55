"""Coarse-to-fine driver around the single-level solver."""

from dataclasses import dataclass

import numpy as np

from .grid import downsample, median_filter, upsample_flow, _resample_bilinear
from .solver import SolveResult, solve_level


@dataclass
class PyramidParams:
    factor: float = 0.5
    min_dim: int = 16
    warps_per_level: int = 3
    median_radius: int = 2

    def __post_init__(self):
        if not (0.0 < self.factor < 1.0):
            raise ValueError("pyramid factor must lie in (0, 1)")
        if self.min_dim < 1 or self.warps_per_level < 1 or self.median_radius < 0:
            raise ValueError("invalid pyramid parameters")


def num_levels(shape, pp):
    side = min(shape)
    if side < pp.min_dim:
        return 1
    return max(1, int(np.floor(np.log(pp.min_dim / side) / np.log(pp.factor))) + 1)


def build_pyramid(f, pp):
    """Image pyramid, coarsest level first."""
    f = np.asarray(f, dtype=np.float64)
    levels = [f]
    for _ in range(num_levels(f.shape, pp) - 1):
        levels.append(downsample(levels[-1], pp.factor))
    levels.reverse()
    return levels


def coarse_to_fine_solve(f1, f2, sp, pp=None):
    """Solve on an image pyramid, propagating flow and the smooth strain part.

    Each level runs ``warps_per_level`` cycles of relinearization around
    the current flow followed by the full primal-dual iteration and a
    median filter on the flow components.
    """
    if pp is None:
        pp = PyramidParams()
    f1 = np.asarray(f1, dtype=np.float64)
    f2 = np.asarray(f2, dtype=np.float64)
    if f1.shape != f2.shape:
        raise ValueError("image dimensions must match")
    pyr1 = build_pyramid(f1, pp)
    pyr2 = build_pyramid(f2, pp)

    h0, w0 = pyr1[0].shape
    u = np.zeros((2, h0, w0))
    a = np.zeros((4, h0, w0))
    result = None
    trace = []
    for lvl, (g1, g2) in enumerate(zip(pyr1, pyr2)):
        for _ in range(pp.warps_per_level):
            result = solve_level(g1, g2, u, sp, a0=a)
            u = result.u
            a = result.a
            if pp.median_radius > 0:
                u = np.stack(
                    [median_filter(u[k], pp.median_radius) for k in range(2)]
                )
            trace.extend(result.energy_trace)
        if lvl + 1 < len(pyr1):
            nh, nw = pyr1[lvl + 1].shape
            u = upsample_flow(u, nw, nh, 1.0 / pp.factor)
            # derivatives are invariant under joint rescaling of
            # displacement and grid, so a transfers without value scaling
            a = np.stack([_resample_bilinear(a[k], nw, nh) for k in range(4)])
    return SolveResult(u=u, a=result.a, s=result.s, energy_trace=trace)
