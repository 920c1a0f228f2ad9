"""Coupled local/nonlocal diffusion: parabolic-elliptic and elliptic-parabolic models in 1-D."""

from .errors import (ConfigError, DegenerateFit, EigFailure, HypothesisViolation, InvalidResolution,
                     NoContraction, ParseError, SingularSystem, ZeroMass)
from .kernels import Kernel, eval_kernel, make_kernel, normalize, validate_hypothesis
from .mesh import (DiscreteSystem, Grid, Partition1D, assemble_laplacian_neumann, assemble_nonlocal,
                   assemble_system, build_grid)
from .models import EP, PE, ModelKind
from .elliptic import coercivity_constant, solve_u_given_v, solve_v_given_u, v_formula_iterate
from .energy import EnergyBreakdown, dissipation, energy_Ev, energy_F, energy_model2
from .evolution import (State, Trajectory, expm_reference, integrate, interface_jump_demo, picard_solve,
                        schur_generator, step)
from .spectral import SpectralResult, decay_certificate, fit_decay_rate, lambda1
from .epsilon import EpsilonStudy, convergence_study, solve_epsilon

__version__ = "0.1.0"
