"""Discrete energy functionals and the dissipation identity.

All double integrals use the midpoint weights of the assembled system, so
``sum_ij K(x_i - y_j) f_ij w_i w_j`` is ``sum_i w_i sum_j M_ij f_ij`` with
``M`` the assembled kernel matrix (which already carries ``w_j``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptic import solve_u_given_v, solve_v_given_u
from .mesh import DiscreteSystem
from .models import PE, ModelKind


@dataclass(frozen=True)
class EnergyBreakdown:
    grad_term: float
    g_term: float
    j_term: float
    total: float


def gradient_form(sys: DiscreteSystem, u):
    """``sum |grad_h u|^2 h`` over the n-1 interior faces of A."""
    du = sys.grad @ u
    return float(sys.gridA.h * (du @ du))


def g_form(sys: DiscreteSystem, v):
    """``sum_ij G(x_i - x_j) (v_j - v_i)^2 w_i w_j`` over B x B."""
    d = v[None, :] - v[:, None]
    return float(sys.gridB.weights @ np.sum(sys.Gbb * d * d, axis=1))


def j_form(sys: DiscreteSystem, u, v):
    """``sum_ij J(x_i - y_j) (u_i - v_j)^2 w_i w_j`` with x in A, y in B."""
    d = u[:, None] - v[None, :]
    return float(sys.gridA.weights @ np.sum(sys.Jab * d * d, axis=1))


def energy_Ev(sys: DiscreteSystem, u, v):
    wA = sys.gridA.weights
    return (0.5 * gradient_form(sys, u)
            + 0.5 * float(wA @ (sys.b_vec * u * u))
            - float(wA @ (u * (sys.Jab @ v))))


def energy_F(sys: DiscreteSystem, u, v):
    return 0.25 * g_form(sys, v) + 0.5 * j_form(sys, u, v)


def energy_model2(sys: DiscreteSystem, u, v):
    """``(F_u(v), E(u))`` for the elliptic-parabolic model."""
    wB = sys.gridB.weights
    F_u = (0.25 * g_form(sys, v)
           + 0.5 * float(wB @ (sys.a_vec * v * v))
           - float(wB @ (v * (sys.Jba @ u))))
    E = 0.5 * gradient_form(sys, u) + 0.5 * j_form(sys, u, v)
    return F_u, E


def constrained_pair(sys: DiscreteSystem, x, model: ModelKind = PE):
    """Complete the evolving component ``x`` into the pair (u, v)."""
    if ModelKind.parse(model) is PE:
        return x, solve_v_given_u(sys, x)
    return solve_u_given_v(sys, x), x


def dissipation_of_pair(sys: DiscreteSystem, u, v) -> EnergyBreakdown:
    gt = gradient_form(sys, u)
    gg = 0.5 * g_form(sys, v)
    jj = j_form(sys, u, v)
    return EnergyBreakdown(gt, gg, jj, gt + gg + jj)


def dissipation(sys: DiscreteSystem, x, model: ModelKind = PE) -> EnergyBreakdown:
    """D = |grad u|^2 + 1/2 G-form(v) + J-form(u, v) with the constraint solved.

    Along the semi-discrete flow ``d/dt (1/2 ||x||_w^2) = -D``, where x is the
    evolving component.
    """
    u, v = constrained_pair(sys, x, model)
    return dissipation_of_pair(sys, u, v)
