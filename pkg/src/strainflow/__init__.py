"""Dense displacement and strain estimation from grayscale image pairs.

The flow between two frames is found by minimizing an L1 brightness
constancy data term plus a second-order total-generalized-variation
prior with a primal-dual algorithm; the smooth/non-smooth split of the
flow Jacobian produced by the iteration is the strain decomposition.
"""

from ._kernels import BACKEND as kernel_backend
from .blockmatch import block_match_baseline
from .dataterm import LinearizedData, data_energy, linearize, warp_image
from .grid import downsample, median_filter, mirror_index, sample_bilinear, upsample_flow
from .pyramid import PyramidParams, build_pyramid, coarse_to_fine_solve
from .solver import (
    DivergenceError,
    SolveResult,
    SolverParams,
    SolverState,
    energy_tgv,
    existence_check,
    pdhgmp_tgv_step,
    solve_level,
    solve_prior,
    strain_from_flow,
    zero_state,
)
from .synth import (
    SyntheticSpec,
    endpoint_error,
    gen_half_jump_half_linear,
    gen_piecewise_plus_linear,
    value_noise_texture,
    warp_generate,
)

__version__ = "0.1.0"
