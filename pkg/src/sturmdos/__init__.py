"""Sturm Hamiltonians: band hierarchy, Gibbs-like measures and the density of states."""

__version__ = "0.1.0"

from .errors import (
    SturmError, ValidationError, InvalidCoupling, WrongTailKind, UnknownWord, BoundaryDegenerate,
    CountMismatch, PrecisionExhausted, UncertifiedEigenvalue, Undetermined, DepthExceeded,
    CapExceeded, SizeExceeded,
)
from .cf import Frequency, convergents, denominators, gauss_shift, sturm_sequence, checkpoint_indices, parse_frequency
from .symbolic import (
    Letter, Word, alphabet, admissible, incidence_matrix, aux_matrix, strong_primitivity_check,
    connecting_word, count_words, typed_counts, enumerate_words, typed_descendant_count, parse_word, format_word,
)
from .bands import BandTree, BandNode, TraceHandle, build_band_tree, band_for_word, isolate_subbands, eval_trace
from .measures import (
    LogQn, ConstantPotential, LogBandLength, UserPotential, gibbs_measure, gibbs_constant,
    potential_constants, weak_gibbs_distance, partition_sum,
)
from .dos import (
    periodic_spectrum, dos_band_mass, dos_spectral_mass, dos_approx, dos_spectral, DosMeasure,
    local_dimension_series, sample_chains, build_alternating_frequency, oscillation_diagnostic,
    fibonacci_asymptotic_check,
)
