#include "rlab/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "rlab/numeric.hpp"

namespace rlab {

double local_energy(const ReversibleChain& chain, std::span<const double> fvals, std::size_t x) {
  CompensatedSum acc;
  for (const auto& e : chain.row(x)) {
    const double d = fvals[x] - fvals[e.to];
    acc.add(d * d * e.prob);
  }
  return 0.5 * acc.value();
}

TripleNormResult triple_norm_exact(const ReversibleChain& chain, std::span<const double> fvals) {
  if (fvals.size() != chain.size()) {
    throw std::invalid_argument("function table has " + std::to_string(fvals.size()) +
                                " entries, chain has " + std::to_string(chain.size()) + " states");
  }
  TripleNormResult best;
  best.value = -1.0;
  for (std::size_t x = 0; x < chain.size(); ++x) {
    const double v = local_energy(chain, fvals, x);
    if (v > best.value) best = {v, x};
  }
  return best;
}

std::vector<double> lumped_signed_values(const WeightVector& a) {
  return signed_sum_table(a, kMaxHalfLength);
}

std::vector<double> lumped_abs_values(const WeightVector& a) {
  auto v = lumped_signed_values(a);
  for (double& x : v) x = std::abs(x);
  return v;
}

double triple_norm_surrogate(const WeightVector& a) {
  const unsigned n = a.half_length();
  std::vector<double> sorted(a.entries().begin(), a.entries().end());
  std::sort(sorted.begin(), sorted.end());
  CompensatedSum low;
  CompensatedSum high;
  for (unsigned i = 0; i < n; ++i) low.add(sorted[i]);
  for (unsigned i = n; i < 2 * n; ++i) high.add(sorted[i]);
  // S_A·S_{Aᶜ} is the same product for A and its complement, so the two
  // extreme choices coincide: A = n smallest entries.
  const double crossing = static_cast<double>(n) * a.norm_squared() - 2.0 * low.value() * high.value();
  return std::max(0.0, crossing) / (static_cast<double>(n) * n);
}

double triple_norm_surrogate_brute(const WeightVector& a, unsigned cap) {
  const unsigned n = a.half_length();
  check_half_length(n, cap);
  double best = 0.0;
  CombinationCursor cur(n);
  std::vector<bool> in(2 * n);
  do {
    std::fill(in.begin(), in.end(), false);
    for (unsigned p : cur.positions()) in[p] = true;
    double s = 0.0;
    for (unsigned i = 0; i < 2 * n; ++i) {
      if (!in[i]) continue;
      for (unsigned j = 0; j < 2 * n; ++j) {
        if (in[j]) continue;
        s += (a[i] - a[j]) * (a[i] - a[j]);
      }
    }
    best = std::max(best, s);
  } while (cur.advance());
  return best / (static_cast<double>(n) * n);
}

double bound_18(const WeightVector& a) { return 4.0 * a.norm_squared() / a.half_length(); }

CheckReport triple_norm_chain_check(const WeightVector& a, const ReversibleChain& lumped) {
  const auto g = lumped_signed_values(a);
  if (g.size() != lumped.size()) throw std::invalid_argument("lumped chain does not match the weight length");
  std::vector<double> f(g);
  for (double& x : f) x = std::abs(x);

  const auto abs_norm = triple_norm_exact(lumped, f);
  const auto signed_norm = triple_norm_exact(lumped, g);
  const double values[] = {abs_norm.value, signed_norm.value, triple_norm_surrogate(a), bound_18(a)};

  CheckReport rep("tripnorm-chain");
  for (int link = 0; link < 3; ++link) {
    const double lhs = values[link];
    const double rhs = values[link + 1];
    rep.add(link + 1, lhs, rhs, lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs)));
  }
  rep.add_metric("exact_abs", abs_norm.value);
  rep.add_metric("exact_abs_witness", static_cast<double>(abs_norm.witness));
  rep.add_metric("exact_signed", signed_norm.value);
  rep.add_metric("exact_signed_witness", static_cast<double>(signed_norm.witness));
  rep.add_metric("surrogate", values[2]);
  rep.add_metric("bound_18", values[3]);
  return rep;
}

CheckReport triple_norm_chain_check(const WeightVector& a, unsigned lumped_cap) {
  return triple_norm_chain_check(a, build_lumped_walk(a.half_length(), lumped_cap));
}

}  // namespace rlab
