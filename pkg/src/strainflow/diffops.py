"""Discrete difference operators and their exact adjoints.

Forward differences carry Neumann boundary conditions (zero at the last
sample along the difference axis). Backward differences are zeroed at a
pixel unless both neighbors along the axis lie inside the grid, so both
edge columns/rows vanish.
"""

import numpy as np


def _dx_forward(p):
    g = np.zeros_like(p)
    g[:, :-1] = p[:, 1:] - p[:, :-1]
    return g


def _dy_forward(p):
    g = np.zeros_like(p)
    g[:-1, :] = p[1:, :] - p[:-1, :]
    return g


def _dx_forward_adjoint(g):
    out = np.zeros_like(g)
    out[:, :-1] -= g[:, :-1]
    out[:, 1:] += g[:, :-1]
    return out


def _dy_forward_adjoint(g):
    out = np.zeros_like(g)
    out[:-1, :] -= g[:-1, :]
    out[1:, :] += g[:-1, :]
    return out


def _dx_backward(p):
    g = np.zeros_like(p)
    g[:, 1:-1] = p[:, 1:-1] - p[:, :-2]
    return g


def _dy_backward(p):
    g = np.zeros_like(p)
    g[1:-1, :] = p[1:-1, :] - p[:-2, :]
    return g


def _dx_backward_adjoint(g):
    out = np.zeros_like(g)
    out[:, 1:-1] += g[:, 1:-1]
    out[:, :-2] -= g[:, 1:-1]
    return out


def _dy_backward_adjoint(g):
    out = np.zeros_like(g)
    out[1:-1, :] += g[1:-1, :]
    out[:-2, :] -= g[1:-1, :]
    return out


def grad_forward(p):
    """Forward-difference gradient of a scalar field: (d/dx, d/dy)."""
    return _dx_forward(p), _dy_forward(p)


def grad_forward_adjoint(gx, gy):
    """Adjoint of grad_forward (negative divergence with matching stencil)."""
    return _dx_forward_adjoint(gx) + _dy_forward_adjoint(gy)


def sym_grad_backward(a1, a2):
    """Symmetrized backward derivative of the 2-vector field (a1, a2).

    Returns the three planes (dx a1, (dy a1 + dx a2)/2, dy a2).
    """
    t1 = _dx_backward(a1)
    t2 = 0.5 * (_dy_backward(a1) + _dx_backward(a2))
    t3 = _dy_backward(a2)
    return t1, t2, t3


def sym_grad_backward_adjoint(t1, t2, t3):
    """Adjoint of sym_grad_backward; maps 3 planes back to (a1, a2)."""
    a1 = _dx_backward_adjoint(t1) + 0.5 * _dy_backward_adjoint(t2)
    a2 = 0.5 * _dx_backward_adjoint(t2) + _dy_backward_adjoint(t3)
    return a1, a2


def second_diff(p):
    """Second differences of one scalar plane: sym_grad_backward(grad_forward(p))."""
    gx, gy = grad_forward(p)
    return sym_grad_backward(gx, gy)


def second_diff_adjoint(t1, t2, t3):
    """Adjoint of second_diff."""
    a1, a2 = sym_grad_backward_adjoint(t1, t2, t3)
    return grad_forward_adjoint(a1, a2)


# Stacked forms used by the solvers. The flow gradient maps (2, H, W) to
# planes (dx u1, dy u1, dx u2, dy u2); the symmetrized derivative maps a
# (4, H, W) gradient-like field blockwise to 6 planes.


def flow_grad(u):
    out = np.empty((4,) + u.shape[1:], dtype=np.float64)
    out[0], out[1] = grad_forward(u[0])
    out[2], out[3] = grad_forward(u[1])
    return out


def flow_grad_adjoint(g):
    out = np.empty((2,) + g.shape[1:], dtype=np.float64)
    out[0] = grad_forward_adjoint(g[0], g[1])
    out[1] = grad_forward_adjoint(g[2], g[3])
    return out


def sym_grad(a):
    out = np.empty((6,) + a.shape[1:], dtype=np.float64)
    out[0], out[1], out[2] = sym_grad_backward(a[0], a[1])
    out[3], out[4], out[5] = sym_grad_backward(a[2], a[3])
    return out


def sym_grad_adjoint(t):
    out = np.empty((4,) + t.shape[1:], dtype=np.float64)
    out[0], out[1] = sym_grad_backward_adjoint(t[0], t[1], t[2])
    out[2], out[3] = sym_grad_backward_adjoint(t[3], t[4], t[5])
    return out


def flow_second_diff(u):
    out = np.empty((6,) + u.shape[1:], dtype=np.float64)
    out[0], out[1], out[2] = second_diff(u[0])
    out[3], out[4], out[5] = second_diff(u[1])
    return out


def flow_second_diff_adjoint(t):
    out = np.empty((2,) + t.shape[1:], dtype=np.float64)
    out[0] = second_diff_adjoint(t[0], t[1], t[2])
    out[1] = second_diff_adjoint(t[3], t[4], t[5])
    return out
