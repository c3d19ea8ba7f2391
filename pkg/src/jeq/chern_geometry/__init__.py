"""Chern connection, torsion, curvature and covariant derivatives from exact Taylor jets."""

from jeq.chern_geometry.taylor_jet_implementation import TaylorJet, inverse_matrix, stack_jets
from jeq.chern_geometry.connection_implementation import ConnectionData, MetricJet, christoffel_jets, connection
from jeq.chern_geometry.covariant_derivatives_implementation import CovariantDerivatives, covariant_derivatives
from jeq.chern_geometry.catalog_implementation import (
    CATALOG_ENTRIES,
    KAHLER_ENTRIES,
    POTENTIALS,
    catalog,
)
from jeq.chern_geometry.commutation_residuals_implementation import (
    IDENTITY_NAMES,
    CommutationResiduals,
    IdentitySuiteReport,
    commutation_residuals,
    identity_suite,
)
