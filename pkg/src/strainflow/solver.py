"""Primal-dual solvers for the TGV flow model and the comparison priors.

All solvers share the linearized data term |A u1 + B u2 + c| and the
primal-dual template of the TGV iteration: per-pixel generalized
shrinkage for the flow update, groupwise shrinkage for the split
variables, extrapolated dual ascent.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dataterm import LinearizedData, data_energy, linearize
from .diffops import (
    flow_grad,
    flow_grad_adjoint,
    flow_second_diff,
    flow_second_diff_adjoint,
    grad_forward,
    sym_grad,
    sym_grad_adjoint,
)
from .prox import coupled_shrink_fields, generalized_shrink_fields

PRIORS = ("h1", "tv", "tv2", "tvtv2", "ic", "tgv")

# Crude operator-norm bounds used to clamp step sizes for the priors
# that involve second differences (||grad||^2 <= 8, ||grad2|| <= 8).
_PRIOR_NORM_BOUND = {"h1": 8.0, "tv": 8.0, "tv2": 64.0, "tvtv2": 72.0, "ic": 80.0}

_DIVERGENCE_LIMIT = 1e8
_ENERGY_EVERY = 50


class DivergenceError(RuntimeError):
    """Raised when solver state blows up (bad step sizes or corrupt input)."""


@dataclass
class SolverParams:
    lambda1: float = 0.2
    lambda2: float = 10.0
    lambda3: float = 5e-5
    tau1: float = 0.25
    tau2: float = 0.25
    theta: float = 1.0
    iterations: int = 3000
    prior: str = "tgv"
    constrain_positive_x: bool = False

    def __post_init__(self):
        if self.prior not in PRIORS:
            raise ValueError(f"unknown prior {self.prior!r}")
        if self.constrain_positive_x and self.prior != "tgv":
            raise ValueError("positivity constraint requires the tgv prior")
        if min(self.lambda1, self.lambda2) <= 0 or self.lambda3 < 0:
            raise ValueError("regularization weights must be positive")
        if min(self.tau1, self.tau2) <= 0 or not (0.0 <= self.theta <= 1.0):
            raise ValueError("invalid step sizes")


@dataclass
class SolverState:
    u: np.ndarray
    a: np.ndarray
    s: np.ndarray
    t: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    b1_bar: np.ndarray
    b2_bar: np.ndarray


@dataclass
class SolveResult:
    u: np.ndarray
    a: np.ndarray
    s: np.ndarray
    energy_trace: list = field(default_factory=list)


def zero_state(shape):
    h, w = shape
    return SolverState(
        u=np.zeros((2, h, w)),
        a=np.zeros((4, h, w)),
        s=np.zeros((4, h, w)),
        t=np.zeros((6, h, w)),
        b1=np.zeros((4, h, w)),
        b2=np.zeros((6, h, w)),
        b1_bar=np.zeros((4, h, w)),
        b2_bar=np.zeros((6, h, w)),
    )


def mixed_norm(x):
    """Sum over pixels of the Euclidean norm of each plane group."""
    return float(np.sum(np.sqrt(np.sum(np.asarray(x) ** 2, axis=0))))


def energy_tgv(u, a, L, p):
    """Pair energy: data term plus the TGV terms evaluated at (u, a)."""
    return (
        data_energy(u, L)
        + p.lambda1 * mixed_norm(flow_grad(u) - a)
        + p.lambda2 * mixed_norm(sym_grad(a))
    )


def _check_finite(state):
    for arr in (state.u, state.a, state.b1, state.b2):
        m = np.max(np.abs(arr))
        if not np.isfinite(m) or m > _DIVERGENCE_LIMIT:
            raise DivergenceError("divergence detected")


def pdhgmp_tgv_step(state, L, p):
    """One full primal-dual step (all eight updates) in place."""
    _kernels.python_backend.tgv_iterate(
        L.A, L.B, L.c, p.lambda1, p.lambda2, p.tau1, p.tau2, p.theta, 1,
        p.constrain_positive_x,
        state.u, state.a, state.s, state.t,
        state.b1, state.b2, state.b1_bar, state.b2_bar,
    )
    _check_finite(state)
    return state


def solve_level(f1, f2, ubar, p, a0=None):
    """Linearize around ubar and run the TGV primal-dual iteration."""
    L = linearize(f1, f2, ubar)
    state = zero_state(f1.shape)
    state.u[:] = ubar
    if a0 is not None:
        state.a[:] = a0
    trace = [energy_tgv(state.u, state.a, L, p)]
    done = 0
    while done < p.iterations:
        chunk = min(_ENERGY_EVERY, p.iterations - done)
        _kernels.tgv_iterate(
            L.A, L.B, L.c, p.lambda1, p.lambda2, p.tau1, p.tau2, p.theta,
            chunk, p.constrain_positive_x,
            state.u, state.a, state.s, state.t,
            state.b1, state.b2, state.b1_bar, state.b2_bar,
        )
        _check_finite(state)
        done += chunk
        trace.append(energy_tgv(state.u, state.a, L, p))
    return SolveResult(u=state.u, a=state.a, s=state.s, energy_trace=trace)


def _clamped_taus(p):
    bound = _PRIOR_NORM_BOUND[p.prior]
    tau_safe = np.sqrt(0.95 / bound)
    return min(p.tau1, tau_safe), min(p.tau2, tau_safe)


def _flow_prox_update(u, drift, L, tau1):
    x1 = u[0] - drift[0]
    x2 = u[1] - drift[1]
    y1, y2 = generalized_shrink_fields(tau1 * L.A, tau1 * L.B, tau1 * L.c, x1, x2)
    return np.stack([y1, y2])


def _solve_first_order(f1, f2, ubar, p, quadratic):
    """H1 (quadratic=True) and TV priors: penalty on grad(u)."""
    L = linearize(f1, f2, ubar)
    tau1, tau2 = _clamped_taus(p)
    tt = tau1 * tau2
    lam = p.lambda1
    u = np.array(ubar, dtype=np.float64)
    h, w = f1.shape
    s = np.zeros((4, h, w))
    b = np.zeros((4, h, w))
    bb = np.zeros((4, h, w))
    trace = []

    def prior_energy():
        g = flow_grad(u)
        reg = lam * float(np.sum(g * g)) if quadratic else lam * mixed_norm(g)
        return data_energy(u, L) + reg

    trace.append(prior_energy())
    for r in range(p.iterations):
        u = _flow_prox_update(u, tt * flow_grad_adjoint(bb), L, tau1)
        gu = flow_grad(u)
        x = b + gu
        if quadratic:
            s = x / (1.0 + 2.0 * lam / tau2)
        else:
            s = coupled_shrink_fields(x, lam / tau2)
        nb = b + gu - s
        bb = nb + p.theta * (nb - b)
        b = nb
        if (r + 1) % _ENERGY_EVERY == 0:
            trace.append(prior_energy())
            if np.max(np.abs(u)) > _DIVERGENCE_LIMIT:
                raise DivergenceError("divergence detected")
    return SolveResult(u=u, a=np.zeros((4, h, w)), s=s, energy_trace=trace)


def _solve_second_order(f1, f2, ubar, p, with_tv):
    """TV2 (with_tv=False) and TV-TV2 priors: penalty on second differences."""
    L = linearize(f1, f2, ubar)
    tau1, tau2 = _clamped_taus(p)
    tt = tau1 * tau2
    lam1, lam2 = p.lambda1, p.lambda2
    lam_second = lam2 if with_tv else lam1
    u = np.array(ubar, dtype=np.float64)
    h, w = f1.shape
    s = np.zeros((4, h, w))
    b1 = np.zeros((4, h, w))
    b1b = np.zeros((4, h, w))
    q = np.zeros((6, h, w))
    b2 = np.zeros((6, h, w))
    b2b = np.zeros((6, h, w))
    trace = []

    def prior_energy():
        e = data_energy(u, L) + lam_second * mixed_norm(flow_second_diff(u))
        if with_tv:
            e += lam1 * mixed_norm(flow_grad(u))
        return e

    trace.append(prior_energy())
    for r in range(p.iterations):
        drift = tt * flow_second_diff_adjoint(b2b)
        if with_tv:
            drift = drift + tt * flow_grad_adjoint(b1b)
        u = _flow_prox_update(u, drift, L, tau1)
        if with_tv:
            gu = flow_grad(u)
            s = coupled_shrink_fields(b1 + gu, lam1 / tau2)
            nb1 = b1 + gu - s
            b1b = nb1 + p.theta * (nb1 - b1)
            b1 = nb1
        g2 = flow_second_diff(u)
        q = coupled_shrink_fields(b2 + g2, lam_second / tau2)
        nb2 = b2 + g2 - q
        b2b = nb2 + p.theta * (nb2 - b2)
        b2 = nb2
        if (r + 1) % _ENERGY_EVERY == 0:
            trace.append(prior_energy())
            if np.max(np.abs(u)) > _DIVERGENCE_LIMIT:
                raise DivergenceError("divergence detected")
    return SolveResult(u=u, a=np.zeros((4, h, w)), s=s, energy_trace=trace)


def _solve_ic(f1, f2, ubar, p):
    """Infimal-convolution prior: u = v + w with penalties on grad(v),
    second differences of w, and a small quadratic term on w."""
    L = linearize(f1, f2, ubar)
    tau1, tau2 = _clamped_taus(p)
    tt = tau1 * tau2
    lam1, lam2, lam3 = p.lambda1, p.lambda2, p.lambda3
    u = np.array(ubar, dtype=np.float64)
    h, w_ = f1.shape
    wf = np.zeros((2, h, w_))
    s = np.zeros((4, h, w_))
    b1 = np.zeros((4, h, w_))
    b1b = np.zeros((4, h, w_))
    b2 = np.zeros((6, h, w_))
    b2b = np.zeros((6, h, w_))
    trace = []

    def prior_energy():
        return (
            data_energy(u, L)
            + lam1 * mixed_norm(flow_grad(u) - flow_grad(wf))
            + lam2 * mixed_norm(flow_second_diff(wf))
            + lam3 * float(np.sum(wf * wf))
        )

    trace.append(prior_energy())
    for r in range(p.iterations):
        u = _flow_prox_update(u, tt * flow_grad_adjoint(b1b), L, tau1)
        wf = (wf - tt * (flow_second_diff_adjoint(b2b) - flow_grad_adjoint(b1b))) / (
            1.0 + 2.0 * lam3 * tau1
        )
        gv = flow_grad(u) - flow_grad(wf)
        s = coupled_shrink_fields(b1 + gv, lam1 / tau2)
        nb1 = b1 + gv - s
        b1b = nb1 + p.theta * (nb1 - b1)
        b1 = nb1
        g2 = flow_second_diff(wf)
        q = coupled_shrink_fields(b2 + g2, lam2 / tau2)
        nb2 = b2 + g2 - q
        b2b = nb2 + p.theta * (nb2 - b2)
        b2 = nb2
        if (r + 1) % _ENERGY_EVERY == 0:
            trace.append(prior_energy())
            if np.max(np.abs(u)) > _DIVERGENCE_LIMIT:
                raise DivergenceError("divergence detected")
    return SolveResult(u=u, a=flow_grad(wf), s=s, energy_trace=trace)


def solve_prior(f1, f2, ubar, p):
    """Solve the flow model with the prior selected in ``p.prior``."""
    if p.prior == "tgv":
        return solve_level(f1, f2, ubar, p)
    if p.prior == "h1":
        return _solve_first_order(f1, f2, ubar, p, quadratic=True)
    if p.prior == "tv":
        return _solve_first_order(f1, f2, ubar, p, quadratic=False)
    if p.prior == "tv2":
        return _solve_second_order(f1, f2, ubar, p, with_tv=False)
    if p.prior == "tvtv2":
        return _solve_second_order(f1, f2, ubar, p, with_tv=True)
    if p.prior == "ic":
        return _solve_ic(f1, f2, ubar, p)
    raise ValueError(f"unknown prior {p.prior!r}")


def strain_from_flow(u):
    """Symmetrized Jacobian of the flow: planes (eps11, eps12, eps22)."""
    u = np.asarray(u, dtype=np.float64)
    g1x, g1y = grad_forward(u[0])
    g2x, g2y = grad_forward(u[1])
    return np.stack([g1x, 0.5 * (g1y + g2x), g2y])


def existence_check(L, max_dim=16):
    """Minimizer-existence diagnostic on small grids.

    True iff ker(A B) intersects ker(symgrad o grad) trivially, tested
    via the column rank of the stacked dense operator matrix.
    """
    h, w = L.A.shape
    if max(h, w) > max_dim:
        raise ValueError("diagnostic limited to small grids")
    n = h * w
    cols = np.zeros((7 * n, 2 * n))
    e = np.zeros((2, h, w))
    for k in range(2 * n):
        e.flat[k] = 1.0
        top = L.A * e[0] + L.B * e[1]
        bottom = flow_second_diff(e)
        cols[:n, k] = top.ravel()
        cols[n:, k] = bottom.reshape(6 * n)
        e.flat[k] = 0.0
    return int(np.linalg.matrix_rank(cols)) == 2 * n
