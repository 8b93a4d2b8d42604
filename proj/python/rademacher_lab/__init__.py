"""Exact and Monte Carlo checks for balanced Rademacher sums."""

from ._core import (
    CapacityError,
    CheckReport,
    Chain,
    ConvergenceError,
    Distribution,
    EquivalenceReport,
    MomentEstimate,
    SpectralReport,
    __version__,
    bound_18,
    check_equivalences,
    cycle_walk,
    eq16_check,
    exact_moment,
    gamma_bound_check,
    graph_walk,
    log_gamma,
    lumped_walk,
    mc_moment,
    moment_tail_integral_check,
    orlicz_norm,
    pair_correlation,
    second_moment_closed,
    signed_sum_table,
    spectral_gap,
    standard_distribution_suite,
    tail_bound_check,
    theorem1_check,
    transposition_walk,
    triple_norm_chain_check,
    triple_norm_exact,
    triple_norm_surrogate,
)
