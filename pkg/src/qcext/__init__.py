"""Numerical workbench for univalent functions with quasiconformal extension."""

from .beltrami import (BeltramiCoeff, MapData, QuadDifferential, alpha_D, chain_rule, l1_norm,
                       pairing, pullback_r2, teichmueller_form)
from .errors import (AccuracyWarning, DomainError, MissingDataError, NodeShiftWarning,
                     NonIntegrableError, NormalizationError, NotInvertibleError, QCError,
                     SingularSeriesError, TruncationError)
from .extremal import (FunctionalSpec, SpanBasis, coefficient_extremal,
                       coefficient_extremal_constrained, distortion_bound, functional_derivative,
                       kappa0, kappa_n_bounds, l1_distance_to_span)
from .grunsky import (GrunskyOperator, GrunskyTable, grunsky_coefficients, grunsky_norm,
                      grunsky_operator, grunsky_variation, milin_coefficients, quadratic_form_h)
from .metrics import (ball_relation, golusin_bound, growth_bound, hyperbolic_distance,
                      teich_distance)
from .qcmap import UnivalentMap, family_map, first_order_map, taylor_coefficient, to_sigma
from .quadrature import DiskQuadrature, Estimate
from .series import (LaurentSeries, algebra, bers_norm, compose, r2_transform, r20_transform,
                     revert, schwarzian)

__version__ = "0.1.0"
