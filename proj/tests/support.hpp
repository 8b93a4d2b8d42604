#pragma once

// Seeded generators shared by the property suites.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rlab/ensemble.hpp"
#include "rlab/orlicz.hpp"

namespace rlab::testing {

inline std::vector<double> gaussian_entries(std::size_t m, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> v(m);
  for (double& x : v) x = z(rng);
  return v;
}

/// Weight vector of length 2n, uniform on the unit sphere.
inline WeightVector random_unit_weights(unsigned n, std::mt19937_64& rng) {
  auto v = gaussian_entries(2 * n, rng);
  double s = 0.0;
  for (double x : v) s += x * x;
  const double r = std::sqrt(s);
  for (double& x : v) x /= r;
  return WeightVector(std::move(v));
}

/// Small integers in [lo, hi], as doubles, so sums are exact.
inline WeightVector random_integer_weights(unsigned n, int lo, int hi, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(lo, hi);
  std::vector<double> v(2 * n);
  for (double& x : v) x = u(rng);
  return WeightVector(std::move(v));
}

/// Atoms with values in [−3, 3] and random positive weights.
inline DiscreteDistribution random_distribution(std::size_t atoms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::vector<DiscreteDistribution::Atom> a(atoms);
  double total = 0.0;
  for (auto& x : a) {
    x.value = val(rng);
    x.prob = w(rng);
    total += x.prob;
  }
  for (auto& x : a) x.prob /= total;
  return DiscreteDistribution(std::move(a));
}

inline double relative_error(double x, double y) {
  const double s = std::max(std::abs(x), std::abs(y));
  return s == 0.0 ? 0.0 : std::abs(x - y) / s;
}

}  // namespace rlab::testing
