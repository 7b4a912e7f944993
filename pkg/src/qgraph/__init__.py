"""Quantum graph toolkit: secular functions, eigenvalues, determinants and zeta values."""

from .asymptotics import (AsymptoticProfile, UndeterminedProfile, fprime_asymptotic,
                          leading_coefficient, profile, s_coefficients, zero_order_p)
from .graph import (Bond, MatchingConditions, MetricGraph, StructureError, ValidationReport,
                    build_delta, build_delta_prime, build_dirichlet, graph_from_json,
                    graph_to_json, transform_conditions, validate_self_adjoint)
from .interval import (BondSolution, IntegrationError, SpectralPoint, oracle_airy, oracle_free,
                       oracle_susy_u, solve_bond)
from .potentials import Potential, derivative, evaluate, reflect, susy_to_potential
from .secular import PoleError, Spectrum, find_eigenvalues, secular_value
from .spectral import (DeterminantResult, LimitRequired, ZetaResult, dirichlet_determinant,
                       spectral_determinant, susy_dirichlet_determinant, zeta, zeta_prime_zero)

__version__ = "0.1.0"
