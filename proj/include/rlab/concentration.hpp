#pragma once

// Exact verification of the tail, moment and Γ inequalities behind the
// ψ₁ estimate for balanced Rademacher sums.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rlab/ensemble.hpp"
#include "rlab/orlicz.hpp"
#include "rlab/report.hpp"
#include "rlab/walk.hpp"

namespace rlab {

/// Values closer than this (relative) to a threshold count as ties.
inline constexpr double kTieTolerance = 1e-12;

/// Stationary tail μ(f > E_μ f + t) against 3·exp(−t√λ₁ / (2|||f|||²_∞)).
/// Ties at E_μ f + t are excluded from the left side.
CheckReport tail_bound_check(const ReversibleChain& chain, std::span<const double> fvals,
                             std::span<const double> t_grid, double spectral_gap_value);
CheckReport tail_bound_check(const ReversibleChain& chain, std::span<const double> fvals,
                             std::span<const double> t_grid);

/// μ(f − E f ≥ t) on the exact law of f over Ω against
/// prefactor·exp(−t / (2·surrogate(a)·√n)). Adds the metric
/// "prefactor_free_all_hold" (1 or 0) for the same grid with prefactor 1.
CheckReport eq16_check(const WeightVector& a, std::span<const double> t_grid, double prefactor = 3.0,
                       unsigned cap = kDefaultEnumerationCap);

inline constexpr double kTheorem1Constant = 24.0;

struct Theorem1Options {
  bool monte_carlo = false;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  unsigned cap = kDefaultEnumerationCap;
};

/// (E f^p)^{1/p} against E|f| + 24·p·‖a‖₂ for each p. Adds the metric
/// "empirical_constant" = max_p ((E f^p)^{1/p} − E|f|) / (p‖a‖₂). In Monte
/// Carlo mode a point holds when lhs − 4·stderr ≤ rhs.
CheckReport theorem1_check(const WeightVector& a, std::span<const double> p_grid,
                           const Theorem1Options& opts = {});

/// Law of uniformly weighted values, merging equal values.
DiscreteDistribution empirical_distribution(std::span<const double> values);

inline constexpr double kIntegralTolerance = 1e-10;

/// E[X₊^p] against Σ_k P(X ≥ u_k)·(u_k^p − u_{k−1}^p) over the sorted
/// distinct positive values u_k (u_0 = 0): equality within 1e-10 relative.
CheckReport moment_tail_integral_check(const DiscreteDistribution& dist, double p);

/// ln Γ(x) for x > 0: recurrence up to x ≥ 15, then the Stirling series.
double log_gamma(double x);

inline constexpr double kLogGammaAccuracy = 1e-10;

/// Γ(x) ≤ x^{x−1} in log form, to within the log-gamma accuracy.
CheckReport gamma_bound_check(std::span<const double> x_grid);

}  // namespace rlab
