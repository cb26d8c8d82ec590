"""fhnet: simulate and verify boundary-coupled FitzHugh-Nagumo networks."""

from .config import RunConfig, build_initial_state, config_from_dict, load_config
from .constants import (DerivedConstants, SpectralEstimates,
                        analytic_poincare_constants,
                        compute_derived_constants, compute_sync_threshold,
                        estimate_poincare_constants)
from .diagnostics import (CheckResult, SampleDiagnostics,
                          check_dissipative_bound, check_gronwall_structure,
                          check_l4_bound, check_threshold_condition,
                          fit_decay_rate, sample_diagnostics,
                          sync_degree_estimate)
from .errors import (BlowUpError, FhnetError, SolverError, ValidationError)
from .geometry import (BoundaryPartition, DomainSpec, EdgeRule, Mesh,
                       PartitionSpec, all_to_all_partition,
                       build_boundary_partition, build_mesh, interval,
                       piece_measure, rectangle, zero_flux_partition)
from .integrator import NetworkState, TimeStepper, solve_spd, step
from .kinetics import (CubicBounds, Kinetics, classic_cubic, custom_cubic,
                       eval_f, eval_f_prime, extract_bounds, general_cubic)
from .operators import (DiffusionOperator, apply_coupling, apply_operator,
                        assemble_diffusion, assemble_monolithic,
                        boundary_integral_sq, grad_norm_sq, volume_integral)
from .params import (DEFAULT_MODEL, ModelParams, RunParams, validate_params,
                     validate_run_params)
from .simulation import Trajectory, run_simulation

__version__ = "0.1.0"
