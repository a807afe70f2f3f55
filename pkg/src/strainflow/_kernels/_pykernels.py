"""NumPy implementation of the hot primal-dual iteration.

Reference implementation; a compiled twin lives in ``_ckernels.pyx`` and
must produce the same iterates up to floating-point round-off.
"""

import numpy as np

from ..diffops import flow_grad, flow_grad_adjoint, sym_grad, sym_grad_adjoint
from ..prox import (
    coupled_shrink_fields,
    coupled_shrink_nonneg_first_fields,
    generalized_shrink_fields,
)

BACKEND = "python"


def tgv_iterate(A, B, c, lam1, lam2, tau1, tau2, theta, n_iters, constrain,
                u, a, s, t, b1, b2, b1b, b2b):
    """Run ``n_iters`` primal-dual steps in place on the state arrays."""
    tt = tau1 * tau2
    tA = tau1 * A
    tB = tau1 * B
    tc = tau1 * c
    for _ in range(n_iters):
        x = u - tt * flow_grad_adjoint(b1b)
        u[0], u[1] = generalized_shrink_fields(tA, tB, tc, x[0], x[1])
        a -= tt * (sym_grad_adjoint(b2b) - b1b)
        gu = flow_grad(u)
        w1 = b1 + gu - a
        if constrain:
            s[:] = coupled_shrink_nonneg_first_fields(w1, lam1 / tau2)
        else:
            s[:] = coupled_shrink_fields(w1, lam1 / tau2)
        ga = sym_grad(a)
        w2 = b2 + ga
        t[:] = coupled_shrink_fields(w2, lam2 / tau2)
        nb1 = b1 + gu - a - s
        nb2 = b2 + ga - t
        b1b[:] = nb1 + theta * (nb1 - b1)
        b2b[:] = nb2 + theta * (nb2 - b2)
        b1[:] = nb1
        b2[:] = nb2
