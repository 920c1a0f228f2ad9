"""Partition of the domain, cell-centered grids and discrete operators."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import HypothesisViolation, InvalidPartition, InvalidResolution, SingularSystem
from .kernels import Kernel, eval_kernel, validate_hypothesis

# Reciprocal condition number below which a block is treated as singular.
RCOND_MIN = 1e-12


@dataclass(frozen=True)
class Partition1D:
    """Two disjoint open intervals ``A = (a0, a1)`` and ``B = (b0, b1)``."""

    A: tuple
    B: tuple

    def __post_init__(self):
        A = tuple(float(c) for c in self.A)
        B = tuple(float(c) for c in self.B)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if len(A) != 2 or len(B) != 2 or not (A[0] < A[1] and B[0] < B[1]):
            raise InvalidPartition(f"intervals must satisfy lo < hi, got A={A}, B={B}")
        if not (A[1] <= B[0] or B[1] <= A[0]):
            raise InvalidPartition(f"A={A} and B={B} overlap")


@dataclass(frozen=True, eq=False)
class Grid:
    interval: tuple
    centers: np.ndarray
    h: float
    weights: np.ndarray

    @property
    def n(self):
        return len(self.centers)

    def integrate(self, f):
        return float(self.weights @ f)

    def norm(self, f):
        """Weighted L2 norm."""
        return float(np.sqrt(self.weights @ (f * f)))

    def mean(self, f):
        return self.integrate(f) / (self.interval[1] - self.interval[0])


def build_grid(interval, n: int) -> Grid:
    if n < 2:
        raise InvalidResolution(f"need at least 2 cells, got {n}")
    lo, hi = map(float, interval)
    h = (hi - lo) / n
    centers = lo + h * (np.arange(n) + 0.5)
    return Grid((lo, hi), centers, h, np.full(n, h))


def assemble_laplacian_neumann(grid: Grid) -> np.ndarray:
    """Second-difference matrix with ghost-cell reflection at both ends."""
    n = grid.n
    L = np.zeros((n, n))
    idx = np.arange(n - 1)
    L[idx, idx + 1] = 1.0
    L[idx + 1, idx] = 1.0
    L[np.arange(n), np.arange(n)] = -2.0
    L[0, 0] = L[-1, -1] = -1.0
    return L / grid.h**2


def gradient_matrix(grid: Grid) -> np.ndarray:
    """Forward differences between neighbouring cells, shape (n-1, n).

    ``-D.T @ D == L``, so summation by parts holds exactly.
    """
    n = grid.n
    D = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    D[idx, idx] = -1.0
    D[idx, idx + 1] = 1.0
    return D / grid.h


def assemble_nonlocal(kernel: Kernel, gridX: Grid, gridY: Grid) -> np.ndarray:
    """``M[i, j] = K(x_i - y_j) * w_j`` (midpoint rule in y)."""
    diff = gridX.centers[:, None] - gridY.centers[None, :]
    return eval_kernel(kernel, diff) * gridY.weights[None, :]


@dataclass(frozen=True, eq=False)
class DiscreteSystem:
    """All assembled operators for a partition and a pair of kernels.

    Solver factorizations are cached lazily on the instance.
    """

    partition: Partition1D
    J: Kernel
    G: Kernel
    gridA: Grid
    gridB: Grid
    L: np.ndarray
    Gbb: np.ndarray
    Jab: np.ndarray
    Jba: np.ndarray
    a_vec: np.ndarray
    b_vec: np.ndarray
    g_vec: np.ndarray

    @property
    def nA(self):
        return self.gridA.n

    @property
    def nB(self):
        return self.gridB.n

    @cached_property
    def grad(self):
        return gradient_matrix(self.gridA)

    @cached_property
    def v_block(self):
        """``diag(g + a) - Gbb``: the operator of the nonlocal elliptic problem in B."""
        return np.diag(self.g_vec + self.a_vec) - self.Gbb

    @cached_property
    def u_block(self):
        """``-L + diag(b)``: the operator of the local elliptic problem in A."""
        return -self.L + np.diag(self.b_vec)

    @cached_property
    def v_block_lu(self):
        return _factor(self.v_block, "nonlocal elliptic block")

    @cached_property
    def u_block_lu(self):
        return _factor(self.u_block, "local elliptic block")


def _factor(M, what):
    if not np.all(np.isfinite(M)):
        raise SingularSystem(f"{what} has non-finite entries")
    rcond = 1.0 / np.linalg.cond(M, 1)
    if not rcond > RCOND_MIN:
        raise SingularSystem(f"{what} is numerically singular (rcond={rcond:.2e})")
    return sla.lu_factor(M)


def assemble_system(partition: Partition1D, kernelJ: Kernel, kernelG: Kernel, nA: int, nB: int,
                    check: bool = True) -> DiscreteSystem:
    """Assemble every operator of both coupled models.

    With ``check=False`` the kernel hypothesis is not enforced, which is how
    degenerate configurations (J not reaching B) are studied.
    """
    if check:
        report = validate_hypothesis(kernelJ, partition)
        if not report.passed:
            raise HypothesisViolation(report)
    gA = build_grid(partition.A, nA)
    gB = build_grid(partition.B, nB)
    Jab = assemble_nonlocal(kernelJ, gA, gB)
    Jba = assemble_nonlocal(kernelJ, gB, gA)
    Gbb = assemble_nonlocal(kernelG, gB, gB)
    return DiscreteSystem(
        partition=partition,
        J=kernelJ,
        G=kernelG,
        gridA=gA,
        gridB=gB,
        L=assemble_laplacian_neumann(gA),
        Gbb=Gbb,
        Jab=Jab,
        Jba=Jba,
        a_vec=Jba @ np.ones(nA),
        b_vec=Jab @ np.ones(nB),
        g_vec=Gbb @ np.ones(nB),
    )
