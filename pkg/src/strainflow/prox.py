"""Closed-form proximal maps used by the primal-dual solver.

The scalar/small-vector functions mirror the analytic formulas; the
``*_fields`` variants apply them per pixel group across the leading
plane axis of ``(d, H, W)`` arrays.
"""

import numpy as np

_TINY = 1e-300


def soft_shrink(x, lam):
    """Prox of lam*|.|: 0 if |x| <= lam, else x*(1 - lam/|x|)."""
    ax = abs(x)
    if ax <= lam:
        return 0.0
    return x * (1.0 - lam / ax)


def coupled_shrink(x, lam):
    """Prox of lam*||.||_2 on a small vector (grouped shrinkage)."""
    x = np.asarray(x, dtype=np.float64)
    nrm = float(np.linalg.norm(x))
    if nrm <= lam:
        return np.zeros_like(x)
    return x * (1.0 - lam / nrm)


def coupled_shrink_nonneg_first(x, lam):
    """Coupled shrinkage of a 4-vector with the first component kept >= 0.

    For x1 >= 0 this is the usual coupled shrinkage; for x1 < 0 the first
    output is 0 and the remaining three components are shrunk as a group.
    """
    x = np.asarray(x, dtype=np.float64)
    if x[0] >= 0.0:
        return coupled_shrink(x, lam)
    out = np.zeros(4)
    out[1:] = coupled_shrink(x[1:], lam)
    return out


def generalized_shrink(alpha, beta, gamma, x):
    """Minimizer of |alpha*y1 + beta*y2 + gamma| + 0.5*||y - x||^2.

    Written in residual form: with s = alpha*x1 + beta*x2 + gamma and
    n = alpha^2 + beta^2 the minimizer is x shifted by -(alpha, beta)
    (s > n), +(alpha, beta) (s < -n), or projected onto the zero line
    of the affine term (|s| <= n). Equivalent to the soft-shrinkage
    formulas but free of the cancellation they suffer for tiny
    coefficients.
    """
    x1, x2 = float(x[0]), float(x[1])
    if alpha == 0.0 and beta == 0.0:
        return np.array([x1, x2])
    s = alpha * x1 + beta * x2 + gamma
    n = alpha * alpha + beta * beta
    if s > n:
        return np.array([x1 - alpha, x2 - beta])
    if s < -n:
        return np.array([x1 + alpha, x2 + beta])
    r = s / n
    return np.array([x1 - alpha * r, x2 - beta * r])


def coupled_shrink_fields(x, lam):
    """Groupwise shrinkage across the plane axis of a (d, H, W) array."""
    nrm = np.sqrt(np.sum(x * x, axis=0))
    scale = np.maximum(1.0 - lam / np.maximum(nrm, _TINY), 0.0)
    return x * scale


def coupled_shrink_nonneg_first_fields(x, lam):
    """Per-pixel constrained shrinkage of a (4, H, W) array."""
    full = coupled_shrink_fields(x, lam)
    rest = coupled_shrink_fields(x[1:], lam)
    neg = x[0] < 0.0
    out = np.where(neg, np.concatenate([np.zeros_like(x[:1]), rest]), full)
    return out


def generalized_shrink_fields(alpha, beta, gamma, x1, x2):
    """Per-pixel generalized shrinkage over (H, W) coefficient planes.

    Vectorized residual form of :func:`generalized_shrink`; the branch
    arithmetic matches the scalar version operation for operation.
    """
    s = alpha * x1 + beta * x2 + gamma
    n = alpha * alpha + beta * beta
    r = s / np.maximum(n, _TINY)
    y1 = np.where(s > n, x1 - alpha, np.where(s < -n, x1 + alpha, x1 - alpha * r))
    y2 = np.where(s > n, x2 - beta, np.where(s < -n, x2 + beta, x2 - beta * r))
    degenerate = n == 0.0
    if np.any(degenerate):
        y1 = np.where(degenerate, x1, y1)
        y2 = np.where(degenerate, x2, y2)
    return y1, y2
