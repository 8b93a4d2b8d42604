#pragma once

// The local Lipschitz semi-norm |||f|||²_∞ = ½ max_x Σ_y (f(x) − f(y))² P(x,y)
// and its closed-form surrogate for the balanced-sum statistic.

#include <cstddef>
#include <span>
#include <vector>

#include "rlab/ensemble.hpp"
#include "rlab/report.hpp"
#include "rlab/walk.hpp"

namespace rlab {

struct TripleNormResult {
  double value = 0.0;
  std::size_t witness = 0;  // first state attaining the maximum
};

TripleNormResult triple_norm_exact(const ReversibleChain& chain, std::span<const double> fvals);

/// ½ Σ_y (f(x) − f(y))² P(x,y) at a single state.
double local_energy(const ReversibleChain& chain, std::span<const double> fvals, std::size_t x);

/// g(A) = Σ_{i∈A} aᵢ − Σ_{i∉A} aᵢ over the states of build_lumped_walk(n).
std::vector<double> lumped_signed_values(const WeightVector& a);
/// |g| over the same states.
std::vector<double> lumped_abs_values(const WeightVector& a);

/// (1/n²) · max over n-subsets A of Σ_{i∈A, j∉A} (aᵢ − aⱼ)², via
/// n‖a‖² − 2·S_A·S_{Aᶜ}, maximized at A = n largest or n smallest entries.
double triple_norm_surrogate(const WeightVector& a);

/// Brute-force version of the surrogate over every n-subset. Test oracle.
double triple_norm_surrogate_brute(const WeightVector& a, unsigned cap = kDefaultEnumerationCap);

/// 4‖a‖²/n.
double bound_18(const WeightVector& a);

/// Links of |||·|||²_∞ on the lumped walk, in order:
///   exact(|g|) ≤ exact(g) ≤ surrogate(a) ≤ bound_18(a).
/// The middle link is an identity, so links hold within 1e-12 relative.
CheckReport triple_norm_chain_check(const WeightVector& a, unsigned lumped_cap = kLumpedWalkCap);
CheckReport triple_norm_chain_check(const WeightVector& a, const ReversibleChain& lumped);

}  // namespace rlab
