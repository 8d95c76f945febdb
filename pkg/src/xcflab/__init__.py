"""Numerical laboratory for the positive and negative cross curvature flows on
left-invariant metrics of the unimodular 3-dimensional Lie groups."""

__version__ = "0.1.0"

from .errors import (BracketError, ClassificationFailure, InconclusiveError, InvalidInputError, NotApplicableError,
                     NumericalFailure, OutOfDomainError, SingularTensorError, WindowError, XCFError)
from .geometry import (CrossCurvature, Geometry, MilnorMetric, SectionalCurvatures, cross_curvature,
                       cross_curvature_via_einstein, scalar_curvature, sectional_curvatures)
from .flow import AuxQuantities, DerivedRates, FlowSign, aux_quantities, derived_rates, log_rhs, xcf_rhs
from .integrator import (BlowUpEstimate, EventSpec, IntegratorControls, Monitor, Termination, Trajectory,
                         VariableMode, detect_events, estimate_blowup, integrate)
from .exact import (ExactFamily, e11_symmetric_exact, e2_fixed_exact, exact_solution, family_of,
                    heisenberg_constants, heisenberg_exact, su2_round_exact)
from .asymptotics import (LimitEstimate, PowerLawFit, SubRiemannianLimit, berger_growth_ratio, blowup_exponents,
                          estimate_limits, fit_power_law,
                          subriemannian_limit)
from .monitors import default_monitors
from .sl2 import (Case3Signature, Regime, RegimeCoordinates, RegimeLabel, SeparatrixResult, case3_signature, classify,
                  find_separatrix, instantaneous_region)

__all__ = [name for name in dir() if not name.startswith("_")]
