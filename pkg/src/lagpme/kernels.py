"""Hot element loops of the Lagrangian scheme.

Every kernel has a numpy implementation (``*_numpy``) and a numba one
(``*_numba``). The public names (``deformation_gradients``, ``jacobian_terms``,
``scatter_nodal``, ``element_hessians``) point to the backend chosen in
:mod:`lagpme._backend`.

Array conventions
-----------------
x : (N, d)          current node positions
elements : (M, d+1) node indices of each simplex, reference orientation positive
grad_lambda : (M, d+1, d)
    reference gradients of the P1 basis functions on each element
"""

import numpy as np

from ._backend import BACKEND, HAVE_NUMBA

# ----------------------------------------------------------------------------
# numpy path
# ----------------------------------------------------------------------------


def deformation_gradients_numpy(x, elements, grad_lambda):
    # F_e[i, k] = sum_l x_{en(e,l), i} * d lambda_l / dX_k
    return np.einsum("eli,elk->eik", x[elements], grad_lambda)


def _det_cof(F):
    d = F.shape[1]
    if d == 1:
        return F[:, 0, 0].copy(), np.ones_like(F)
    J = F[:, 0, 0] * F[:, 1, 1] - F[:, 0, 1] * F[:, 1, 0]
    C = np.empty_like(F)
    C[:, 0, 0] = F[:, 1, 1]
    C[:, 0, 1] = -F[:, 1, 0]
    C[:, 1, 0] = -F[:, 0, 1]
    C[:, 1, 1] = F[:, 0, 0]
    return J, C


def jacobian_terms_numpy(x, elements, grad_lambda):
    """Return ``(det F_e, d det F_e / d x_{en(e,l)})`` for every element."""
    F = deformation_gradients_numpy(x, elements, grad_lambda)
    J, C = _det_cof(F)
    # d det F / d x_l = cof(F) grad lambda_l
    dJ = np.einsum("eik,elk->eli", C, grad_lambda)
    return J, dJ


def scatter_nodal_numpy(values, elements, n_nodes):
    """Sum per-element, per-local-node vectors (M, d+1, d) into (N, d)."""
    d = values.shape[2]
    idx = elements.ravel()
    out = np.empty((n_nodes, d))
    for c in range(d):
        out[:, c] = np.bincount(idx, weights=values[:, :, c].ravel(), minlength=n_nodes)
    return out


def element_hessians_numpy(dJ, grad_lambda, w_outer, w_curv):
    """Element Hessians of ``sum_e g_e(det F_e)``.

    ``w_outer`` is ``g''(J)`` and ``w_curv`` is ``g'(J)`` (both already scaled
    by the reference measure). Local dof ordering is ``c * (d+1) + l``.
    """
    M, n, d = dJ.shape
    v = dJ.transpose(0, 2, 1).reshape(M, n * d)  # index c*n + l
    H = w_outer[:, None, None] * v[:, :, None] * v[:, None, :]
    if d == 2:
        G = grad_lambda
        cross = G[:, :, None, 0] * G[:, None, :, 1] - G[:, :, None, 1] * G[:, None, :, 0]
        blk = w_curv[:, None, None] * cross
        H[:, 0:n, n:2 * n] += blk
        H[:, n:2 * n, 0:n] -= blk
    return H


# ----------------------------------------------------------------------------
# numba path
# ----------------------------------------------------------------------------

if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def deformation_gradients_numba(x, elements, grad_lambda):
        M, n = elements.shape
        d = x.shape[1]
        F = np.zeros((M, d, d))
        for e in range(M):
            for l in range(n):
                node = elements[e, l]
                for i in range(d):
                    xi = x[node, i]
                    for k in range(d):
                        F[e, i, k] += xi * grad_lambda[e, l, k]
        return F

    @njit(cache=True)
    def jacobian_terms_numba(x, elements, grad_lambda):
        M, n = elements.shape
        d = x.shape[1]
        J = np.empty(M)
        dJ = np.empty((M, n, d))
        for e in range(M):
            if d == 1:
                f = 0.0
                for l in range(n):
                    f += x[elements[e, l], 0] * grad_lambda[e, l, 0]
                J[e] = f
                for l in range(n):
                    dJ[e, l, 0] = grad_lambda[e, l, 0]
            else:
                f00 = 0.0
                f01 = 0.0
                f10 = 0.0
                f11 = 0.0
                for l in range(n):
                    node = elements[e, l]
                    f00 += x[node, 0] * grad_lambda[e, l, 0]
                    f01 += x[node, 0] * grad_lambda[e, l, 1]
                    f10 += x[node, 1] * grad_lambda[e, l, 0]
                    f11 += x[node, 1] * grad_lambda[e, l, 1]
                J[e] = f00 * f11 - f01 * f10
                for l in range(n):
                    g0 = grad_lambda[e, l, 0]
                    g1 = grad_lambda[e, l, 1]
                    dJ[e, l, 0] = f11 * g0 - f10 * g1
                    dJ[e, l, 1] = -f01 * g0 + f00 * g1
        return J, dJ

    @njit(cache=True)
    def scatter_nodal_numba(values, elements, n_nodes):
        M, n, d = values.shape
        out = np.zeros((n_nodes, d))
        for e in range(M):
            for l in range(n):
                node = elements[e, l]
                for c in range(d):
                    out[node, c] += values[e, l, c]
        return out

    @njit(cache=True)
    def element_hessians_numba(dJ, grad_lambda, w_outer, w_curv):
        M, n, d = dJ.shape
        K = n * d
        H = np.empty((M, K, K))
        for e in range(M):
            for c in range(d):
                for l in range(n):
                    r = c * n + l
                    for c2 in range(d):
                        for m in range(n):
                            H[e, r, c2 * n + m] = w_outer[e] * dJ[e, l, c] * dJ[e, m, c2]
            if d == 2:
                for l in range(n):
                    for m in range(n):
                        cr = w_curv[e] * (
                            grad_lambda[e, l, 0] * grad_lambda[e, m, 1]
                            - grad_lambda[e, l, 1] * grad_lambda[e, m, 0]
                        )
                        H[e, l, n + m] += cr
                        H[e, n + l, m] -= cr
        return H


if BACKEND == "numba":
    deformation_gradients = deformation_gradients_numba
    jacobian_terms = jacobian_terms_numba
    scatter_nodal = scatter_nodal_numba
    element_hessians = element_hessians_numba
else:
    deformation_gradients = deformation_gradients_numpy
    jacobian_terms = jacobian_terms_numpy
    scatter_nodal = scatter_nodal_numpy
    element_hessians = element_hessians_numpy
