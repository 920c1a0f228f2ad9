"""The two elliptic constraints and the discrete coercivity constant."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .mesh import DiscreteSystem

RESIDUAL_RTOL = 1e-10


@dataclass
class EllipticSolveReport:
    solution: np.ndarray
    residual_norm: float
    method: str
    rhs_norm: float = 0.0

    @property
    def ok(self):
        return self.residual_norm <= RESIDUAL_RTOL * (1.0 + self.rhs_norm)


def _report(M, x, rhs, method):
    return EllipticSolveReport(x, float(np.linalg.norm(M @ x - rhs)), method, float(np.linalg.norm(rhs)))


def solve_v_given_u(sys: DiscreteSystem, u, full_output=False):
    """Nonlocal balance in B: ``(diag(g + a) - Gbb) v = Jba u``.

    This is the Euler-Lagrange equation of the functional F minimized in v.
    Raises SingularSystem when the block is not invertible.
    """
    rhs = sys.Jba @ u
    v = sla.lu_solve(sys.v_block_lu, rhs)
    if full_output:
        return v, _report(sys.v_block, v, rhs, "direct")
    return v


def v_formula_iterate(sys: DiscreteSystem, u, v0, k: int):
    """``k`` Jacobi sweeps ``v <- (Gbb v + Jba u) / (g + a)``."""
    denom = sys.g_vec + sys.a_vec
    source = sys.Jba @ u
    v = np.array(v0, dtype=float)
    for _ in range(k):
        v = (sys.Gbb @ v + source) / denom
    return v


def solve_v_jacobi(sys: DiscreteSystem, u, tol=1e-13, maxiter=1_000_000, full_output=False):
    """Fixed-point solve of the nonlocal balance, iterated until the update stalls."""
    denom = sys.g_vec + sys.a_vec
    source = sys.Jba @ u
    v = np.zeros(sys.nB)
    for _ in range(maxiter):
        v_new = (sys.Gbb @ v + source) / denom
        done = np.max(np.abs(v_new - v)) <= tol * (1.0 + np.max(np.abs(v_new)))
        v = v_new
        if done:
            break
    if full_output:
        return v, _report(sys.v_block, v, source, "jacobi_fixed_point")
    return v


def solve_u_given_v(sys: DiscreteSystem, v, full_output=False):
    """Local Neumann problem in A: ``(-L + diag(b)) u = Jab v``."""
    rhs = sys.Jab @ v
    u = sla.lu_solve(sys.u_block_lu, rhs)
    if full_output:
        return u, _report(sys.u_block, u, rhs, "direct")
    return u


def _weighted_sym(M, w):
    r = np.sqrt(w)
    S = r[:, None] * M / r[None, :]
    return 0.5 * (S + S.T)


def coercivity_constant(sys: DiscreteSystem, return_vector=False):
    """Smallest value of ``Q(v) / ||v||_w^2`` with

    ``Q(v) = 1/2 sum G(x_i-x_j) (v_i-v_j)^2 w_i w_j + sum a_i v_i^2 w_i``.

    ``Q(v) = v^T W (diag(g + a) - Gbb) v``, so this is the bottom of the spectrum
    of the weighted symmetrization of the nonlocal elliptic block. A value at or
    below 1e-12 means coercivity fails.
    """
    w = sys.gridB.weights
    vals, vecs = np.linalg.eigh(_weighted_sym(sys.v_block, w))
    c = float(vals[0])
    if not return_vector:
        return c
    vec = vecs[:, 0] / np.sqrt(w)
    vec /= np.sqrt(w @ vec**2)
    if vec.sum() < 0:
        vec = -vec
    return c, vec


def weighted_operator_norm(M, w_out, w_in):
    """Operator norm of ``M`` from L2(w_in) to L2(w_out)."""
    return float(np.linalg.norm(np.sqrt(w_out)[:, None] * M / np.sqrt(w_in)[None, :], 2))


def v_lipschitz_constant(sys: DiscreteSystem):
    """Constant C with ``||v1 - v2||_B <= C ||u1 - u2||_A`` for the map u -> v."""
    T = sla.lu_solve(sys.v_block_lu, sys.Jba)
    return weighted_operator_norm(T, sys.gridB.weights, sys.gridA.weights)


def u_lipschitz_constant(sys: DiscreteSystem):
    T = sla.lu_solve(sys.u_block_lu, sys.Jab)
    return weighted_operator_norm(T, sys.gridA.weights, sys.gridB.weights)
