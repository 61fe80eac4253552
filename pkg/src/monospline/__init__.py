"""Monotone three-point scheme for 1D convection-diffusion-reaction problems,
built on a piecewise-quadratic C1 spline over two interleaved grids."""

from .errors import (ConfigError, DegenerateEliminationError, MonosplineError,
                     MonotonicityError, NumericalFailure, SingularSystemError)
from .linalg import TridiagonalSystem, dense_solve, thomas_solve
from .problem import (DualGrid, ProblemSpec, StepParams, build_dual_grid, build_problem,
                      constant_field, sample_initial)
from .scheme import (MonotonicityReport, QTriple, SchemeCoefficients, assemble,
                     assemble_general, assemble_uniform, monotonicity_report,
                     q_coefficients, reconstruct_c, scheme_coefficients)
from .spline import QuadSpline, build_spline, continuity_defect, spline_deriv, spline_eval
from .stepper import SolverState, initial_state, run, step
from .verify import (ErrorReport, baseline_step, convergence_study, error_norms,
                     exact_gaussian, manufactured_sine, run_baseline, spline_error_norms)

__version__ = "0.1.0"
