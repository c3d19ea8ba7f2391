"""Pointwise Hermitian linear algebra: relative spectra, the J-operator and its threshold bounds."""

from jeq.pointwise_algebra.relative_spectrum_implementation import (
    as_hermitian,
    batched_positivity_margin,
    batched_relative_spectrum,
    positivity_margin,
    relative_spectrum,
)
from jeq.pointwise_algebra.j_operator_implementation import j_operator, linearized_coefficients
from jeq.pointwise_algebra.subsolution_check_implementation import (
    cone_check,
    cone_margin,
    diagonal_reciprocal_sum,
    subsolution_check,
    subsolution_margin,
)
from jeq.pointwise_algebra.lemma_threshold_implementation import (
    ConeThreshold,
    LemmaCertificate,
    lemma_batch_verify,
    lemma_corner_margin,
    lemma_threshold,
    lemma_verify,
)
