"""Fully parabolic relaxation of both models and the eps -> 0 limit.

For the parabolic-elliptic model the fast block is v::

    u' = L u - b u + Jab v
    eps v' = Gbb v - g v + Jba u - a v

and for the elliptic-parabolic model the time derivative of u carries eps
instead. Both are written as ``M_eps x' = -K x`` on the joint vector
``x = (u, v)`` with the symmetric-in-W block operator ``K``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .evolution import Trajectory, _attach_diagnostics, _n_steps, integrate
from .mesh import DiscreteSystem
from .models import PE, ModelKind


def joint_operator(sys: DiscreteSystem) -> np.ndarray:
    return np.block([[sys.u_block, -sys.Jab], [-sys.Jba, sys.v_block]])


def relaxation_masses(sys: DiscreteSystem, model, eps):
    """Diagonal of ``M_eps``: one on the slow block, eps on the fast block."""
    if ModelKind.parse(model) is PE:
        return np.concatenate([np.ones(sys.nA), np.full(sys.nB, float(eps))])
    return np.concatenate([np.full(sys.nA, float(eps)), np.ones(sys.nB)])


def solve_epsilon(sys: DiscreteSystem, model, eps, u0, v0, T, dt) -> Trajectory:
    """Implicit Euler on the joint (u, v) system.

    ``eps = 0`` is accepted and turns the fast rows into the elliptic
    constraint, reproducing the limit solver.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    model = ModelKind.parse(model)
    n = _n_steps(T, dt)
    h = T / n
    m = relaxation_masses(sys, model, eps)
    K = joint_operator(sys)
    lu = sla.lu_factor(np.diag(m) + h * K)
    x = np.concatenate([np.asarray(u0, dtype=float), np.asarray(v0, dtype=float)])
    xs = [x]
    for _ in range(n):
        # increment form of (M + h K) x_new = M x
        x = x - h * sla.lu_solve(lu, K @ x)
        xs.append(x)
    X = np.array(xs)
    traj = Trajectory(model, h * np.arange(n + 1), X[:, :sys.nA], X[:, sys.nA:],
                      info={"eps": eps, "dt": h, "steps": n})
    _attach_diagnostics(sys, traj)
    wA, wB = sys.gridA.weights, sys.gridB.weights
    mA, mB = m[:sys.nA], m[sys.nA:]
    traj.diagnostics["joint_mass"] = traj.u @ (mA * wA) + traj.v @ (mB * wB)
    traj.diagnostics["joint_energy"] = 0.5 * ((traj.u**2) @ (mA * wA) + (traj.v**2) @ (mB * wB))
    return traj


@dataclass
class EpsilonStudy:
    """Distances between eps-solutions and the limit.

    ``errors_u`` is the space-time L2 error of the slow component and
    ``errors_v_tail`` the max-in-time L2 error of the fast component after
    ``t_layer``; ``errors_v_layer`` is the same maximum taken over ``[0, t_layer)``.
    For the elliptic-parabolic model slow and fast are v and u.
    """

    model: ModelKind
    eps_ladder: np.ndarray
    errors_u: np.ndarray
    errors_v_tail: np.ndarray
    errors_v_layer: np.ndarray
    t_layer: float
    observed_order: float

    @property
    def column_names(self):
        if self.model is PE:
            return ("eps", "error_u", "error_v_tail")
        return ("eps", "error_v", "error_u_tail")

    def rows(self):
        return list(zip(self.eps_ladder, self.errors_u, self.errors_v_tail))


def convergence_study(sys: DiscreteSystem, model, eps_ladder, u0, v0, T, dt, t_layer=None) -> EpsilonStudy:
    model = ModelKind.parse(model)
    eps_ladder = np.asarray(eps_ladder, dtype=float)
    if len(eps_ladder) < 3:
        raise ValueError("need at least three eps values")
    if np.any(np.diff(eps_ladder) >= 0) or np.any(eps_ladder <= 0):
        raise ValueError("eps ladder must be positive and strictly decreasing")
    t_layer = 0.05 * T if t_layer is None else float(t_layer)
    slow0 = u0 if model is PE else v0
    limit = integrate(sys, model, slow0, T, dt, diagnostics=False)
    h = limit.info["dt"]
    if model is PE:
        slow_grid, fast_grid = sys.gridA, sys.gridB
        slow_of = lambda tr: tr.u
        fast_of = lambda tr: tr.v
    else:
        slow_grid, fast_grid = sys.gridB, sys.gridA
        slow_of = lambda tr: tr.v
        fast_of = lambda tr: tr.u
    tail = limit.times >= t_layer
    errs_slow, errs_tail, errs_layer = [], [], []
    for eps in eps_ladder:
        tr = solve_epsilon(sys, model, eps, u0, v0, T, h)
        ds = slow_of(tr) - slow_of(limit)
        per_t = (ds**2) @ slow_grid.weights
        # trapezoid in time for the L2(0, T) norm
        errs_slow.append(float(np.sqrt(h * (per_t.sum() - 0.5 * (per_t[0] + per_t[-1])))))
        df = np.sqrt(((fast_of(tr) - fast_of(limit)) ** 2) @ fast_grid.weights)
        errs_tail.append(float(np.max(df[tail])))
        errs_layer.append(float(np.max(df[~tail])) if np.any(~tail) else 0.0)
    errs_slow = np.array(errs_slow)
    order = float(np.polyfit(np.log(eps_ladder), np.log(errs_slow), 1)[0])
    return EpsilonStudy(model, eps_ladder, errs_slow, np.array(errs_tail), np.array(errs_layer),
                        t_layer, order)
