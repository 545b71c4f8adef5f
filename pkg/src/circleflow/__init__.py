"""Convolution hemigroups on the unit circle and radial Loewner chains.

One generating family (a drift plus a time-increasing measure) determines
four hemigroups of probability measures on the circle: classical, free,
boolean, and monotone.  This package constructs all four, solves and
inverts the radial Loewner flow behind the monotone one, embeds free
hemigroups into monotone ones by subordination, and provides numerical
convergence diagnostics for all of it.
"""

from .convergence import (ConvergenceReport, StudyRow, equivalence_study,
                          family_distance, hemigroup_distance)
from .families import (GeneratingFamily, IntervalField, StandardTriple,
                       haar_family, load_family, normal_family,
                       rotation_family, save_family, slit_family,
                       two_atom_family, zero_family)
from .hemigroups import (LawKind, boolean_eta_series, boolean_moment,
                         classical_moment, free_eta_series, free_eta_value,
                         free_moment, free_sigma_series, kernel_coefficients,
                         moment, monotone_eta, monotone_moment, psi_from_eta)
from .loewner import (ChainSample, ExtractionResult, GapReport, HFamilyRep,
                      SolverError, extract_generating_family, gap_bound_check,
                      integral_residual, load_chain, save_chain,
                      solve_chain, solve_characteristic, solve_transition,
                      transition_series)
from .measures import CircleMeasure, char_distance
from .series import DEFAULT_ORDER, TruncatedSeries
from .subordination import (SubordinationReport, subordinated_family,
                            verify_subordination)

__version__ = "0.1.0"
