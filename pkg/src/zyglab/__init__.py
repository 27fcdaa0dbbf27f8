"""Numerical laboratory for isometries and generators on little Zygmund spaces."""

__version__ = "0.1.0"

from .analytic import (DEFAULT_SETTINGS, AnalyticFunction, EvaluationSettings, Polynomial,
                       TransformedFunction, cauchy_derivative, derivative, evaluate,
                       make_test_function, monomial, path_integral, peaking, random_poly)
from .moebius import DiscAutomorphism, compose, fixed_points, inverse
from .zygmund import (ExtremeFunctional, SpaceVariant, extreme_functional_eval,
                      little_zygmund_check, membership_check, peaking_function, phi_embed,
                      zygmund_norm)
from .isometry import (CanonicalIsometry, FullIsometry, HermitianDiagonal, adjoint_on_extreme,
                       apply_canonical, apply_full, compose_isometries, hermitian_apply,
                       hermitian_exponential, invert_isometry, second_derivative_direct,
                       verify_isometry)
from .flows import (FlowFamily, IsometryFlow, apply_generator, flow_eval, flow_time_derivative,
                    flow_to_automorphism, generator_domain_check, generator_field,
                    group_law_check, isometry_at, unboundedness_probe)
