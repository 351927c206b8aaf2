"""Exact Markov chains from convolutions of graded projections on
combinatorial Hopf algebras: card shuffles on the word algebra and
vertex-removal chains on rooted forests, with rational-arithmetic
transition matrices, spectra, stationary distributions, eigenvectors and
seeded simulation."""

from .chain import (
    Distribution,
    TransitionMatrix,
    build_transition_matrix,
    evolve,
    expectation,
    lumping_check,
    point_mass,
    stationary_distributions,
)
from .forests import Forest, ForestAlgebra, enumerate_forests, f_j_statistic, forest_algebra, parse_forest, vertex_stats
from .hopf import (
    AlgebraHandle,
    CppSpec,
    LinComb,
    SpecError,
    TensorComb,
    apply_cpp,
    apply_proj_convolution,
    beta_n,
    check_state_space_basis,
    composition_law,
    coproduct,
    eta,
    iterated_coproduct,
    iterated_product,
    normalize_spec,
    product,
)
from .linalg import RatMatrix, Rational, annihilation_check, mat_mul, mat_pow, nullspace, rank, rat
from .presets import expand_preset, preset_names
from .shuffle import (
    FreeAssociativeAlgebra,
    ShuffleAlgebra,
    Word,
    deck_from_string,
    descent_peak_sets,
    distinct_deck,
    rearrangement_class,
    weighted_descent_stat,
    weighted_peak_stat,
)
from .simulate import RngStream, gsr_step, run_trajectories, sample_composition
from .spectral import (
    Eigenvector,
    HilbertProfile,
    Spectrum,
    build_E_j,
    eigenvalues,
    hilbert_invert,
    multiplicity,
    pairing_count,
    primitive_basis,
    spectrum_from_profile,
    verify_spectrum,
    word_class_spectrum,
)

__version__ = "0.1.0"
