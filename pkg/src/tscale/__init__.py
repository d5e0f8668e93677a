"""Calculus, exponentials and the Laplace transform on time scales."""

from .calculus import (DEFAULT_CONFIG, CumulativeTable, GridFunction, QuadratureConfig,
                       TailBound, TransformResult, cumulative, delta_derivative, delta_integral,
                       improper_delta_integral, integration_by_parts_check, sigma_shift_residual)
from .errors import (DenseBoundary, EmptyRange, ExprSyntaxError, InvalidTimeScale, NoConvergence,
                     NonConstantGraininess, NonDifferentiable, NotInTimeScale, NotRegressive,
                     OutsideRegion, QuadratureFailure, TimeScaleError, TimeScaleFormatError,
                     UnboundedWindowOnly, UnknownFunction)
from .exponential import (Constant, Varying, exp_ominus, exp_ts, lambda_fn, lambda_limit,
                          lambda_series, lambda_threshold, monomial, scaled_exp_decay,
                          taylor_lower_bound_check)
from .expr import Expression, parse_expr
from .hilger import (RegionSpec, cdot, cminus, cneg, cplus, cylinder, hilger_im, hilger_re,
                     in_region, is_pos_regressive, is_regressive)
from .laplace import DecayEnvelope, convergence_region, modulated_laplace
from .lerch import (LatticeSpec, LerchVerdict, NullReport, char_approx, char_limit,
                    chi_shift_check, constant_graininess_reduce, lattice_sweep, lerch_verify,
                    modulated_null_check, null_check)
from .timescale import (Continuous, DenseInterval, Geometric, ScatteredPoint, TimeScale,
                        UniformDiscrete, WindowOnly)
from .tsfile import load_timescale, parse_timescale

# the transform itself lives at tscale.laplace.laplace; re-exporting it here
# would shadow the submodule of the same name
__version__ = "0.1.0"
