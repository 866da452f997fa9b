"""Numerical laboratory for degenerate parabolic complex Monge-Ampere
flows e^{phi_t + F(t, x, phi)} mu = (omega_t + dd^c phi)^n on flat
periodic torus models in complex dimensions one and two."""

from .grid import (TorusGrid, ScalarField, HermitianField, second_difference,
                   cross_difference, laplacian5, complex_hessian,
                   sup_norm_diff, mollify, save_field, load_field,
                   export_field_csv)
from .ma_ops import (MAEvaluation, positive_part_det,
                     background_plus_hessian, RhsEvaluator, flow_rhs)
from .background import (ClassSchedule, BackgroundFamily, ConstantFamily,
                         ScaledFamily, ShiftedFamily, CallableFamily,
                         CosineBump, PERTURBATIONS, t_max,
                         regularity_modulus, very_regular_check,
                         VeryRegularReport)
from .parabolic import (DensitySpec, ForcingSpec, SolverConfig, FlowProblem,
                        Trajectory, BlowUpError, TimeStepUnderflow,
                        StepBudgetExceeded, step, solve, solve_twisted,
                        change_time_variable, vanishing_viscosity_sweep,
                        SweepResult, paired_comparison_steps, h_profile,
                        h_profile_upper, h_ode_residual)
from .elliptic import (StaticProblem, StaticNonConvergence,
                       default_static_config, solve_static,
                       ContractionReport, ke_contraction_check)
from .verify import (CertificateReport, AffineBarrier, FunctionBarrier,
                     check_subsolution, check_supersolution,
                     build_subbarrier, build_superbarrier, build_envelopes,
                     sample_barrier, comparison_gap)
from .scenarios import (Scenario, ScenarioResult, CheckResult, SCENARIOS,
                        get_scenario, scenario_comparison_suite,
                        scenario_canonical_model, scenario_calabi_yau,
                        scenario_nonexistence, scenario_convergence)
from ._backend import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
