"""Consumer-resource ecosystems with pairwise encounters.

Deterministic dynamics, closed-form steady states, functional-response theory,
linear stability and Hopf/Lyapunov diagnostics, exact stochastic simulation,
and a spatial individual-based model, with a CLI harness for scripted runs.
"""

from .model import (DerivedConstants, KineticGeometry, MeanFieldRates,
                    ModelConfig, ResourceKind, ResourceLaw, ScenarioKind,
                    SystemState, derive_constants, mean_field_rates)
from .qss import (CubicCoefficients, IntraApproximation, QssSolution,
                  cubic_real_roots, intra_cubic_coefficients,
                  qss_chasing_quadratic, qss_generic_numeric, qss_intra_approx,
                  qss_intra_cubic, qss_inter_pair)
from .response import (FrOrder, FrSurface, FrVariant, evaluate_surface,
                       fr_beddington, fr_chasing, fr_discrepancy_surface,
                       fr_inter, fr_intra, log_grid, xi_function)
from .dynamics import (ConsumerFate, DynamicsLabel, EventKind,
                       IntegrationControls, OutcomeClass, Trajectory,
                       build_rhs, classify_outcome, integrate)
from .steady_state import (CoexistenceBound, FixedPoint, FixedPointMethod,
                           analytic_both_2x1, analytic_general_abiotic,
                           analytic_general_biotic, analytic_inter_2x1,
                           analytic_intra_2x1, coexistence_delta_sup,
                           refine_fixed_point)
from .stability import (HopfResult, LyapunovSpectrum, StabilityClass,
                        StabilityReport, classify, hopf_scan, jacobian_at,
                        lyapunov_spectrum, poincare_section)
from .ssa import (ReactionNetwork, SsaRun, build_reactions,
                  ensemble_consumer_stats, run_ensemble, run_ssa)
from .ibm import (EncounterEstimate, IbmParams, World, choose_dt,
                  estimate_encounter_rate, run_ibm, step, verify_links)

__version__ = "0.1.0"
