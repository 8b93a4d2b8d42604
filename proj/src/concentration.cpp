#include "rlab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "rlab/lipschitz.hpp"
#include "rlab/numeric.hpp"

namespace rlab {

namespace {

void require_grid(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + " grid is empty");
  for (double x : grid) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " grid has a non-finite value");
  }
}

double stationary_mean(const ReversibleChain& chain, std::span<const double> fvals) {
  CompensatedSum s;
  for (std::size_t x = 0; x < chain.size(); ++x) s.add(chain.stationary()[x] * fvals[x]);
  return s.value();
}

double tie_slack(double threshold) { return kTieTolerance * std::max(1.0, std::abs(threshold)); }

}  // namespace

CheckReport tail_bound_check(const ReversibleChain& chain, std::span<const double> fvals,
                             std::span<const double> t_grid, double spectral_gap_value) {
  require_grid(t_grid, "t");
  if (fvals.size() != chain.size()) throw std::invalid_argument("function table size mismatch");
  if (!(spectral_gap_value > 0.0)) throw std::invalid_argument("spectral gap must be positive");

  const double mean = stationary_mean(chain, fvals);
  const double energy = triple_norm_exact(chain, fvals).value;
  CheckReport rep("tail-stationary");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("t grid must be positive");
    const double threshold = mean + t;
    const double slack = tie_slack(threshold);
    CompensatedSum tail;
    for (std::size_t x = 0; x < chain.size(); ++x) {
      if (fvals[x] > threshold + slack) tail.add(chain.stationary()[x]);
    }
    const double rhs = 3.0 * std::exp(-t * std::sqrt(spectral_gap_value) / (2.0 * energy));
    rep.add(t, tail.value(), rhs, tail.value() <= rhs);
  }
  rep.add_metric("spectral_gap", spectral_gap_value);
  rep.add_metric("triple_norm", energy);
  rep.add_metric("mean", mean);
  return rep;
}

CheckReport tail_bound_check(const ReversibleChain& chain, std::span<const double> fvals,
                             std::span<const double> t_grid) {
  return tail_bound_check(chain, fvals, t_grid, spectral_gap(chain).gap);
}

CheckReport eq16_check(const WeightVector& a, std::span<const double> t_grid, double prefactor,
                       unsigned cap) {
  require_grid(t_grid, "t");
  auto f = signed_sum_table(a, cap);
  for (double& x : f) x = std::abs(x);
  const double mean = compensated_sum(f) / static_cast<double>(f.size());
  const double energy = triple_norm_surrogate(a);
  const double root_n = std::sqrt(static_cast<double>(a.half_length()));

  CheckReport rep("tail-centred");
  bool prefactor_free = true;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("t grid must be positive");
    const double threshold = mean + t;
    const double slack = tie_slack(threshold);
    std::uint64_t hits = 0;
    for (double x : f) hits += (x >= threshold - slack);
    const double lhs = static_cast<double>(hits) / static_cast<double>(f.size());
    const double decay = std::exp(-t / (2.0 * energy * root_n));
    rep.add(t, lhs, prefactor * decay, lhs <= prefactor * decay);
    prefactor_free = prefactor_free && lhs <= decay;
  }
  rep.add_metric("prefactor", prefactor);
  rep.add_metric("prefactor_free_all_hold", prefactor_free ? 1.0 : 0.0);
  rep.add_metric("triple_norm_surrogate", energy);
  rep.add_metric("mean", mean);
  return rep;
}

namespace {

// (mean of |v|^p)^{1/p}, scaled by the largest |v|.
double power_mean(std::span<const double> v, double p) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  CompensatedSum s;
  for (double x : v) s.add(std::pow(std::abs(x) / m, p));
  return m * std::pow(s.value() / static_cast<double>(v.size()), 1.0 / p);
}

}  // namespace

CheckReport theorem1_check(const WeightVector& a, std::span<const double> p_grid,
                           const Theorem1Options& opts) {
  require_grid(p_grid, "p");
  for (double p : p_grid) {
    if (!(p >= 2.0)) throw std::invalid_argument("moment orders must be >= 2");
  }
  const double norm = a.norm();
  CheckReport rep("theorem1");
  double empirical = 0.0;

  if (!opts.monte_carlo) {
    const auto g = signed_sum_table(a, opts.cap);
    const double mean_abs = power_mean(g, 1.0);
    for (double p : p_grid) {
      const double lhs = power_mean(g, p);
      const double rhs = mean_abs + kTheorem1Constant * p * norm;
      rep.add(p, lhs, rhs, lhs <= rhs);
      if (norm > 0.0) empirical = std::max(empirical, (lhs - mean_abs) / (p * norm));
    }
  } else {
    const auto first = mc_moment(a, 1.0, opts.samples, opts.seed);
    for (double p : p_grid) {
      const auto mom = mc_moment(a, p, opts.samples, opts.seed);
      const double lhs = std::pow(mom.value, 1.0 / p);
      // Delta method for the p-th root.
      const double se = mom.value > 0.0 ? std::pow(mom.value, 1.0 / p - 1.0) * mom.std_error / p : 0.0;
      const double rhs = first.value + kTheorem1Constant * p * norm;
      rep.add(p, lhs, rhs, lhs - 4.0 * se <= rhs);
      if (norm > 0.0) empirical = std::max(empirical, (lhs - first.value) / (p * norm));
    }
    rep.add_metric("samples", static_cast<double>(opts.samples));
  }
  rep.add_metric("empirical_constant", empirical);
  return rep;
}

DiscreteDistribution empirical_distribution(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("no values");
  std::map<double, std::uint64_t> counts;
  for (double v : values) ++counts[v];
  std::vector<DiscreteDistribution::Atom> atoms;
  atoms.reserve(counts.size());
  const double total = static_cast<double>(values.size());
  for (auto [v, c] : counts) atoms.push_back({v, static_cast<double>(c) / total});
  return DiscreteDistribution(std::move(atoms));
}

CheckReport moment_tail_integral_check(const DiscreteDistribution& dist, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be >= 1");

  CompensatedSum direct;
  for (const auto& a : dist.atoms()) {
    if (a.value > 0.0) direct.add(a.prob * std::pow(a.value, p));
  }

  // Group positive mass by distinct value, then integrate the step function
  // P(X ≥ t) against d(t^p) one flat piece at a time.
  std::map<double, double> mass;
  for (const auto& a : dist.atoms()) {
    if (a.value > 0.0) mass[a.value] += a.prob;
  }
  std::vector<double> levels;
  std::vector<double> upper_tail;
  for (auto it = mass.rbegin(); it != mass.rend(); ++it) {
    levels.push_back(it->first);
    upper_tail.push_back((upper_tail.empty() ? 0.0 : upper_tail.back()) + it->second);
  }
  std::reverse(levels.begin(), levels.end());
  std::reverse(upper_tail.begin(), upper_tail.end());
  CompensatedSum integral;
  double prev = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double cur = std::pow(levels[k], p);
    integral.add(upper_tail[k] * (cur - prev));
    prev = cur;
  }

  const double lhs = direct.value();
  const double rhs = integral.value();
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  const bool equal = std::abs(lhs - rhs) <= kIntegralTolerance * scale;
  CheckReport rep("moment-tail-integral");
  rep.add(p, lhs, rhs, equal);
  rep.add_metric("relative_error", scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0);
  return rep;
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("log_gamma requires finite x > 0");
  // Γ(x) = Γ(x + k) / (x (x+1) ⋯ (x+k−1)).
  double shift = 1.0;
  double z = x;
  while (z < 15.0) {
    shift *= z;
    z += 1.0;
  }
  // Bernoulli coefficients B_{2k} / (2k (2k − 1)).
  static constexpr double kCoeff[] = {
      1.0 / 12.0,          -1.0 / 360.0,          1.0 / 1260.0,     -1.0 / 1680.0,
      1.0 / 1188.0,        -691.0 / 360360.0,     1.0 / 156.0,      -3617.0 / 122400.0,
  };
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (double c : kCoeff) {
    series += c * power;
    power *= inv2;
  }
  const double stirling = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
  return stirling - std::log(shift);
}

CheckReport gamma_bound_check(std::span<const double> x_grid) {
  require_grid(x_grid, "x");
  CheckReport rep("gamma-bound");
  for (double x : x_grid) {
    if (!(x >= 1.0)) throw std::invalid_argument("gamma bound grid values must be >= 1");
    const double lg = log_gamma(x);
    const double bound = (x - 1.0) * std::log(x);
    rep.add(x, std::exp(lg), std::exp(bound), lg <= bound + kLogGammaAccuracy);
  }
  return rep;
}

}  // namespace rlab
