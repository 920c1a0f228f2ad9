"""Time integration of the two coupled systems.

After discretization both models are index-1 DAEs: one component obeys an
ODE, the other a linear algebraic constraint. Eliminating the constrained
component gives the reduced ODE ``x' = -S x`` with ``S`` the Schur-complement
generator; each step advances ``x`` and then re-solves the constraint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .elliptic import weighted_operator_norm
from .energy import dissipation_of_pair, energy_Ev, energy_F, energy_model2, constrained_pair
from .errors import EigFailure, NoContraction
from .kernels import normalize
from .mesh import DiscreteSystem, Partition1D, assemble_system
from .models import PE, ModelKind

SCHEMES = ("implicit_euler", "crank_nicolson")
DIAGNOSTIC_FIELDS = ("massA", "massB", "L2u", "L2v", "dissipation", "Ev", "F")


@dataclass
class State:
    t: float
    u: np.ndarray
    v: np.ndarray


@dataclass
class Trajectory:
    """Snapshots stored row-wise: ``u[k]`` and ``v[k]`` are the fields at ``times[k]``."""

    model: ModelKind
    times: np.ndarray
    u: np.ndarray
    v: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    @property
    def snapshots(self):
        return [State(t, u, v) for t, u, v in zip(self.times, self.u, self.v)]

    @property
    def evolving(self):
        return self.u if self.model is PE else self.v

    @property
    def final(self):
        return State(self.times[-1], self.u[-1], self.v[-1])


def evolving_grid(sys: DiscreteSystem, model):
    return sys.gridA if ModelKind.parse(model) is PE else sys.gridB


def schur_generator(sys: DiscreteSystem, model: ModelKind = PE) -> np.ndarray:
    """Generator ``S`` of the reduced ODE ``x' = -S x`` for the evolving component.

    Parabolic-elliptic: ``S = -L + diag(b) - Jab (diag(g + a) - Gbb)^{-1} Jba``.
    Elliptic-parabolic: ``S = diag(g + a) - Gbb - Jba (-L + diag(b))^{-1} Jab``.
    """
    if ModelKind.parse(model) is PE:
        return sys.u_block - sys.Jab @ sla.lu_solve(sys.v_block_lu, sys.Jba)
    return sys.v_block - sys.Jba @ sla.lu_solve(sys.u_block_lu, sys.Jab)


def apply_generator(sys: DiscreteSystem, model, x) -> np.ndarray:
    """``S x`` from the blocks, without forming S.

    More accurate than ``S @ x`` on near-constant x: the blocks annihilate
    constants up to the rounding of a single solve.
    """
    if ModelKind.parse(model) is PE:
        return sys.u_block @ x - sys.Jab @ sla.lu_solve(sys.v_block_lu, sys.Jba @ x)
    return sys.v_block @ x - sys.Jba @ sla.lu_solve(sys.u_block_lu, sys.Jab @ x)


def _n_steps(T, dt):
    if not dt > 0:
        raise ValueError("dt must be positive")
    return max(1, math.ceil(T / dt - 1e-9))


class Stepper:
    """Reusable one-step map for fixed (system, model, dt, scheme)."""

    def __init__(self, sys: DiscreteSystem, model, dt, scheme="implicit_euler", S=None):
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
        if not dt > 0:
            raise ValueError("dt must be positive")
        self.sys = sys
        self.model = ModelKind.parse(model)
        self.dt = dt
        self.scheme = scheme
        self._custom_S = S is not None
        self.S = schur_generator(sys, self.model) if S is None else S
        theta = 1.0 if scheme == "implicit_euler" else 0.5
        self._lhs = sla.lu_factor(np.eye(len(self.S)) + theta * dt * self.S)

    def advance(self, x):
        # increment form x - dt (I + theta dt S)^{-1} S x: roundoff scales with
        # the increment, so constants are not eroded by the rounded identity
        Sx = self.S @ x if self._custom_S else apply_generator(self.sys, self.model, x)
        return x - self.dt * sla.lu_solve(self._lhs, Sx)

    def __call__(self, state: State) -> State:
        x = state.u if self.model is PE else state.v
        u, v = constrained_pair(self.sys, self.advance(x), self.model)
        return State(state.t + self.dt, u, v)


def step(sys: DiscreteSystem, model, state: State, dt, scheme="implicit_euler") -> State:
    return Stepper(sys, model, dt, scheme)(state)


def compute_diagnostics(sys: DiscreteSystem, model, u, v):
    """Mass, norms, dissipation and energies for a single (u, v) snapshot.

    For the elliptic-parabolic model the ``Ev`` and ``F`` slots hold ``E(u)``
    and ``F_u(v)`` respectively.
    """
    gA, gB = sys.gridA, sys.gridB
    if ModelKind.parse(model) is PE:
        ev, f = energy_Ev(sys, u, v), energy_F(sys, u, v)
    else:
        f, ev = energy_model2(sys, u, v)
    return {
        "massA": gA.integrate(u),
        "massB": gB.integrate(v),
        "L2u": gA.norm(u),
        "L2v": gB.norm(v),
        "dissipation": dissipation_of_pair(sys, u, v).total,
        "Ev": ev,
        "F": f,
    }


def _attach_diagnostics(sys, traj):
    rows = [compute_diagnostics(sys, traj.model, u, v) for u, v in zip(traj.u, traj.v)]
    traj.diagnostics = {k: np.array([r[k] for r in rows]) for k in DIAGNOSTIC_FIELDS}
    return traj


def integrate(sys: DiscreteSystem, model, init, T, dt, scheme="implicit_euler", stride=1,
              diagnostics=True) -> Trajectory:
    """Integrate from the evolving component's initial data up to time T.

    ``init`` is u0 for the parabolic-elliptic model and v0 otherwise; the other
    component at t = 0 comes from the elliptic solve. The step count is
    ``ceil(T / dt)`` and the step is shrunk to ``T / n`` so the run ends at T.
    Every ``stride``-th state is stored, plus the final one.
    """
    model = ModelKind.parse(model)
    n = _n_steps(T, dt)
    stepper = Stepper(sys, model, T / n, scheme)
    x = np.array(init, dtype=float)
    times, xs = [0.0], [x]
    for k in range(1, n + 1):
        x = stepper.advance(x)
        if k % stride == 0 or k == n:
            times.append(k * T / n)
            xs.append(x)
    pairs = [constrained_pair(sys, x, model) for x in xs]
    traj = Trajectory(model, np.array(times), np.array([p[0] for p in pairs]),
                      np.array([p[1] for p in pairs]), info={"dt": T / n, "steps": n, "scheme": scheme})
    return _attach_diagnostics(sys, traj) if diagnostics else traj


def expm_reference(S, t, x0, weights=None):
    """``exp(-t S) x0``.

    Uses a symmetric eigendecomposition of ``W^{1/2} S W^{-1/2}`` when that
    matrix is symmetric (``W = diag(weights)``, identity if omitted); otherwise
    falls back to scipy's scaling-and-squaring Pade ``expm``.
    """
    S = np.asarray(S, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if t == 0:
        return x0.copy()
    r = np.ones(len(S)) if weights is None else np.sqrt(np.asarray(weights, dtype=float))
    Ssym = r[:, None] * S / r[None, :]
    scale = max(np.max(np.abs(Ssym)), 1e-300)
    try:
        if np.max(np.abs(Ssym - Ssym.T)) <= 1e-12 * scale:
            lam, Q = np.linalg.eigh(0.5 * (Ssym + Ssym.T))
            return (Q @ (np.exp(-t * lam) * (Q.T @ (r * x0)))) / r
        return sla.expm(-t * S) @ x0
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc


def picard_contraction_factor(sys: DiscreteSystem, T):
    """Upper bound for the Lipschitz constant of the Picard map on [0, T].

    The implicit-Euler solution operator of the A-problem is a weighted-L2
    contraction, so a perturbation of the trajectory grows by at most
    ``T * ||Jab (diag(g + a) - Gbb)^{-1} Jba||_w``.
    """
    P = sys.Jab @ sla.lu_solve(sys.v_block_lu, sys.Jba)
    w = sys.gridA.weights
    return T * weighted_operator_norm(P, w, w)


def picard_solve(sys: DiscreteSystem, u0, T, dt, tol=1e-10, maxiter=500) -> Trajectory:
    """Fixed point of ``u -> T_BA(T_AB(u))`` over the whole window [0, T].

    ``T_AB`` solves the nonlocal balance at every time level and ``T_BA`` solves
    the linear heat problem in A with that v as a source (implicit Euler, so the
    fixed point coincides with :func:`integrate` at the same dt). Iterates stop
    when successive trajectories differ by less than ``tol`` in max-over-time
    weighted L2 norm. Raises NoContraction when the window is too long.
    """
    q = picard_contraction_factor(sys, T)
    if q >= 1:
        raise NoContraction(q)
    n = _n_steps(T, dt)
    h = T / n
    w = sys.gridA.weights
    heat_lu = sla.lu_factor(np.eye(sys.nA) + h * sys.u_block)
    u0 = np.array(u0, dtype=float)
    U = np.tile(u0, (n + 1, 1))
    for it in range(1, maxiter + 1):
        V = sla.lu_solve(sys.v_block_lu, sys.Jba @ U.T).T
        src = h * (V @ sys.Jab.T)
        U_new = np.empty_like(U)
        U_new[0] = u0
        for k in range(n):
            U_new[k + 1] = sla.lu_solve(heat_lu, U_new[k] + src[k + 1])
        change = float(np.max(np.sqrt(((U_new - U) ** 2) @ w)))
        U = U_new
        if change < tol:
            break
    else:
        it = maxiter
    V = sla.lu_solve(sys.v_block_lu, sys.Jba @ U.T).T
    traj = Trajectory(PE, h * np.arange(n + 1), U, V,
                      info={"iterations": it, "contraction_factor": q, "last_change": change, "dt": h})
    return _attach_diagnostics(sys, traj)


@dataclass
class JumpReport:
    times: np.ndarray
    u_interface: np.ndarray
    v_interface: np.ndarray
    jump: np.ndarray
    x_u: float
    x_v: float


def jump_scenario(resolution=64, J=None, G=None, partition=None):
    """System for A = (-1, 0), B = (0, 1); box J of radius 1 and tent G of radius 1/2 by default."""
    J = J or normalize("box", 1.0)
    G = G or normalize("tent", 0.5)
    partition = partition or Partition1D((-1.0, 0.0), (0.0, 1.0))
    if not partition.A[1] <= partition.B[0]:
        raise ValueError("the jump demo needs A to the left of B")
    return assemble_system(partition, J, G, resolution, resolution)


def interface_jump_demo(resolution=64, dt=1e-3, T=0.05, u0=lambda x: 1.0 + x, J=None, G=None,
                        scheme="implicit_euler", partition=None) -> JumpReport:
    """Trace ``u`` in the last A cell and ``v`` in the first B cell over time.

    Both cells touch the common endpoint x = 0. ``u0`` is a callable of x (or an
    array on the A grid); v(., 0) is the elliptic solve of u0. The default data
    peaks at the interface, so the nonlocal average that defines v sits strictly
    below it there. With ``u0 = 1`` the solution is the constant pair and the
    jump vanishes.
    """
    sys = jump_scenario(resolution, J, G, partition)
    x = sys.gridA.centers
    init = u0(x) if callable(u0) else np.asarray(u0, dtype=float)
    init = np.broadcast_to(np.asarray(init, dtype=float), x.shape).copy()
    traj = integrate(sys, PE, init, T, dt, scheme, diagnostics=False)
    ui, vi = traj.u[:, -1], traj.v[:, 0]
    return JumpReport(traj.times, ui, vi, ui - vi, float(x[-1]), float(sys.gridB.centers[0]))
