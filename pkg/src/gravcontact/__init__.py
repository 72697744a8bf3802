"""Gravitational contact structures on the relativistic jet phase space.

The package builds, for a catalog of Lorentzian metrics, the contact pair
and its dual Jacobi pair on the 7-dimensional phase space of timelike
motions, constructs hidden symmetries from Killing multivector fields, and
verifies every structural identity as a machine-checkable residual.
"""

from .errors import (ChartDomainError, ClosednessError, ConfigError,
                     DimensionMismatchError, EvaluationDomainError, GravContactError,
                     ParameterError, TimelikeViolationError, UnsupportedDegreeError)
from .geometry import DiffConfig, jacobian, partial_derivative, symmetrize
from .spacetime import (ScaleConstants, SpacetimeMetric, christoffel, metric_catalog,
                        rescaled_metrics)
from .multivector import (SkewMultivectorField, SymmetricMultivectorField, gbar_field,
                          killing_catalog, killing_residual, pi_star, schouten_skew,
                          schouten_sym, unscaled_metric_field)
from .phasespace import (PhaseFrame, PhasePoint, PhaseStructures, StructureEvaluation,
                         contact_map, duality_residuals, dynamical_connection,
                         nu_tau, phase_connection, phase_frame, phase_two_form,
                         phase_two_vector, time_form, verify_jacobi_pair)
from .symmetry import (GeneralizedVectorField, HiddenSymmetry, PhaseFunction,
                       PhaseVectorField, conservation_residual, generator_bracket,
                       hamilton_jacobi_lift, hidden_symmetry_from_multivector,
                       lie_bracket_phase, phase_function_from_multivector,
                       projectability_residual, tau_of, verify_homomorphism)
from .electromagnetic import (EMField, em_catalog, em_connection, joined_structures,
                              joined_phase_structures, verify_acpj_pair)
from .dynamics import (Trajectory, flow_transport_defect, geodesic_residual, integrate,
                       integrate_fixed, monitor)
from .sampling import sample_phase_points

__version__ = "0.1.0"
