#include "rlab/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rlab/numeric.hpp"

namespace rlab {

namespace {

constexpr double kProbTolerance = 1e-12;
constexpr double kLogOverflow = 700.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// --------------------------------------------------- DiscreteDistribution

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("distribution has no atoms");
  CompensatedSum total;
  for (const auto& a : atoms_) {
    if (!std::isfinite(a.value)) throw std::invalid_argument("distribution values must be finite");
    if (!(a.prob > 0.0) || !std::isfinite(a.prob)) {
      throw std::invalid_argument("atom probabilities must be positive");
    }
    total.add(a.prob);
  }
  if (std::abs(total.value() - 1.0) > kProbTolerance) {
    throw std::invalid_argument("probabilities sum to " + std::to_string(total.value()) + ", not 1");
  }
}

DiscreteDistribution DiscreteDistribution::parse(std::istream& in) {
  std::vector<Atom> atoms;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    Atom a{};
    std::string extra;
    if (!(ls >> a.value >> a.prob) || (ls >> extra)) {
      throw std::invalid_argument("distribution file line " + std::to_string(lineno) +
                                  ": expected 'value probability'");
    }
    atoms.push_back(a);
  }
  return DiscreteDistribution(std::move(atoms));
}

DiscreteDistribution DiscreteDistribution::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open distribution file '" + path + "'");
  return parse(in);
}

DiscreteDistribution DiscreteDistribution::point_mass(double v) {
  return DiscreteDistribution({{v, 1.0}});
}

DiscreteDistribution DiscreteDistribution::uniform(std::vector<double> values) {
  std::vector<Atom> atoms;
  const double p = 1.0 / static_cast<double>(values.size());
  for (double v : values) atoms.push_back({v, p});
  return DiscreteDistribution(std::move(atoms));
}

DiscreteDistribution DiscreteDistribution::rademacher() { return uniform({-1.0, 1.0}); }

double DiscreteDistribution::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) m = std::max(m, std::abs(a.value));
  return m;
}

double DiscreteDistribution::mean() const noexcept {
  CompensatedSum s;
  for (const auto& a : atoms_) s.add(a.value * a.prob);
  return s.value();
}

DiscreteDistribution DiscreteDistribution::scaled(double t) const {
  std::vector<Atom> out(atoms_);
  for (auto& a : out) a.value *= t;
  return DiscreteDistribution(std::move(out));
}

// ------------------------------------------------------ Orlicz functions

OrliczFunction OrliczFunction::phi(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("phi_p requires p >= 1");
  return {Kind::phi_p, p};
}

OrliczFunction OrliczFunction::psi(double alpha) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw std::invalid_argument("psi_alpha requires alpha >= 1");
  return {Kind::psi_alpha, alpha};
}

double OrliczFunction::operator()(double x) const {
  if (kind == Kind::phi_p) return std::pow(x, parameter) / parameter;
  return std::expm1(std::pow(x, parameter));
}

double expected_orlicz(const DiscreteDistribution& dist, const OrliczFunction& psi, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("Orlicz scale must be positive");
  const auto& atoms = dist.atoms();
  if (psi.kind == OrliczFunction::Kind::phi_p) {
    CompensatedSum s;
    for (const auto& a : atoms) s.add(a.prob * psi(std::abs(a.value) / c));
    return s.value();
  }

  double max_exp = 0.0;
  std::vector<double> expo(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    expo[k] = std::pow(std::abs(atoms[k].value) / c, psi.parameter);
    max_exp = std::max(max_exp, expo[k]);
  }
  if (max_exp <= kLogOverflow) {
    CompensatedSum s;
    for (std::size_t k = 0; k < atoms.size(); ++k) s.add(atoms[k].prob * std::expm1(expo[k]));
    return s.value();
  }
  // log E e^{e_k} by log-sum-exp around the largest weighted exponent.
  double top = -kInf;
  for (std::size_t k = 0; k < atoms.size(); ++k) top = std::max(top, std::log(atoms[k].prob) + expo[k]);
  CompensatedSum s;
  for (std::size_t k = 0; k < atoms.size(); ++k) s.add(std::exp(std::log(atoms[k].prob) + expo[k] - top));
  const double log_e = top + std::log(s.value());
  if (log_e > kLogOverflow) return kInf;
  return std::expm1(log_e);
}

double orlicz_norm(const DiscreteDistribution& dist, const OrliczFunction& psi, double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (dist.is_zero()) return 0.0;
  auto feasible = [&](double c) { return expected_orlicz(dist, psi, c) <= 1.0; };

  double hi = dist.max_abs();
  while (!feasible(hi)) hi *= 2.0;
  double lo = hi / 2.0;
  while (feasible(lo)) {
    hi = lo;
    lo /= 2.0;
  }
  for (int it = 0; it < kOrliczMaxIterations && hi - lo > tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double lp_norm(const DiscreteDistribution& dist, double p) {
  const double m = dist.max_abs();
  if (m == 0.0) return 0.0;
  CompensatedSum s;
  for (const auto& a : dist.atoms()) s.add(a.prob * std::pow(std::abs(a.value) / m, p));
  return m * std::pow(s.value(), 1.0 / p);
}

double abs_tail(const DiscreteDistribution& dist, double t) {
  CompensatedSum s;
  for (const auto& a : dist.atoms()) {
    if (std::abs(a.value) >= t) s.add(a.prob);
  }
  return s.value();
}

double moment_growth_constant(const DiscreteDistribution& dist, double alpha, double p_max) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  if (!(p_max >= alpha)) throw std::invalid_argument("p_max must be >= alpha");
  if (dist.is_zero()) return 0.0;
  double best = 0.0;
  for (int k = 0;; ++k) {
    const double p = alpha + k * kMomentGridStep;
    if (p > p_max + 1e-12) break;
    best = std::max(best, lp_norm(dist, p) / std::pow(p, 1.0 / alpha));
  }
  return best;
}

// ------------------------------------------------------- equivalences

bool EquivalenceReport::all_hold() const noexcept {
  return std::all_of(relations.begin(), relations.end(), [](const RelationCheck& r) { return r.holds; });
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int k = -32; k <= 32; ++k) g.push_back(std::exp2(k / 4.0));
  return g;
}

namespace {

// Smallest K with P(|X| ≥ t) ≤ exp(−(t/K)^α) for every grid t > e·K. The
// threshold is tied to K by the factor e, so K3' = e·K3.
double tail_constant(const DiscreteDistribution& dist, double alpha, std::vector<double> t_grid) {
  std::sort(t_grid.begin(), t_grid.end());
  const std::size_t m = t_grid.size();
  double min_abs = kInf;
  for (const auto& a : dist.atoms()) min_abs = std::min(min_abs, std::abs(a.value));

  std::vector<double> r(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = t_grid[i];
    const double tail = abs_tail(dist, t);
    if (tail == 0.0) {
      r[i] = 0.0;
    } else if (min_abs >= t || tail >= 1.0) {
      r[i] = kInf;  // whole mass at or above t: no finite constant works
    } else {
      r[i] = t / std::pow(-std::log(tail), 1.0 / alpha);
    }
  }
  std::vector<double> suffix_max(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) suffix_max[i] = std::max(r[i], suffix_max[i + 1]);

  // K ∈ [t_{j−1}/e, t_j/e) constrains exactly the grid points j, j+1, …
  for (std::size_t j = 0; j <= m; ++j) {
    const double lower = j == 0 ? 0.0 : t_grid[j - 1] / std::numbers::e;
    const double upper = j == m ? kInf : t_grid[j] / std::numbers::e;
    const double k = std::max(lower, suffix_max[j]);
    if (k < upper) return k;
  }
  return t_grid.back() / std::numbers::e;
}

double log_mgf_abs(const DiscreteDistribution& dist, double lambda) {
  const double m = dist.max_abs();
  CompensatedSum s;
  for (const auto& a : dist.atoms()) s.add(a.prob * std::exp(lambda * (std::abs(a.value) - m)));
  return lambda * m + std::log(s.value());
}

// Smallest K with E exp(λ|X|) ≤ exp((λK)^β) for every grid λ ≥ 1/K; used
// for both K4 and K4'. Only K ≥ 1/max(λ-grid) is considered, so the grid
// always constrains the answer.
std::optional<double> exp_moment_constant(const DiscreteDistribution& dist, double beta,
                                          std::vector<double> lambda_grid) {
  std::sort(lambda_grid.begin(), lambda_grid.end(), std::greater<>());
  const std::size_t m = lambda_grid.size();
  double running = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double lam = lambda_grid[j];
    const double ell = std::max(0.0, log_mgf_abs(dist, lam));
    running = std::max(running, std::pow(ell, 1.0 / beta) / lam);
    const double lower = 1.0 / lam;
    const double upper = j + 1 == m ? kInf : 1.0 / lambda_grid[j + 1];
    const double k = std::max(lower, running);
    if (k < upper) return k;
  }
  return std::nullopt;
}

// Smallest grid threshold T with P(|X| ≥ t) ≤ exp(−(t/K)^α) for every grid
// t > T; 0 when the bound holds on the whole grid.
double tail_threshold(const DiscreteDistribution& dist, double alpha, double k, const std::vector<double>& t_grid) {
  double threshold = 0.0;
  for (double t : t_grid) {
    const double tail = abs_tail(dist, t);
    if (tail > std::exp(-std::pow(t / k, alpha))) threshold = std::max(threshold, t);
  }
  return threshold;
}

RelationCheck relation(std::string label, double lhs, double rhs) {
  return {std::move(label), lhs, rhs, lhs <= rhs, rhs - lhs};
}

}  // namespace

EquivalenceReport check_equivalences(const DiscreteDistribution& dist, double alpha, double p_max,
                                     const std::vector<double>& t_grid,
                                     const std::vector<double>& lambda_grid) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be >= 1");
  if (t_grid.empty() || lambda_grid.empty()) throw std::invalid_argument("grids must be non-empty");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("t grid must be positive");
  }
  for (double l : lambda_grid) {
    if (!(l > 0.0)) throw std::invalid_argument("lambda grid must be positive");
  }

  EquivalenceReport rep;
  rep.alpha = alpha;
  rep.grid_note = "K2 on p in [alpha, " + std::to_string(p_max) + "] step 0.25; K3 on " +
                  std::to_string(t_grid.size()) + " t points with K3' = e*K3";
  const bool has_item4 = alpha > 1.0;
  const double beta = has_item4 ? alpha / (alpha - 1.0) : 0.0;
  if (has_item4) rep.grid_note += "; K4 = K4' on " + std::to_string(lambda_grid.size()) +
                                 " lambda points; last relation uses the threshold for K3 = 2*K4";

  constexpr double e = std::numbers::e;
  if (dist.is_zero()) {
    rep.K1 = rep.K2 = rep.K3 = rep.K3_prime = 0.0;
    if (has_item4) rep.K4 = rep.K4_prime = 0.0;
  } else {
    rep.K1 = orlicz_norm(dist, OrliczFunction::psi(alpha));
    rep.K2 = moment_growth_constant(dist, alpha, p_max);
    rep.K3 = tail_constant(dist, alpha, t_grid);
    rep.K3_prime = e * *rep.K3;
    if (has_item4) {
      rep.K4 = exp_moment_constant(dist, beta, lambda_grid);
      rep.K4_prime = rep.K4;
    }
  }

  const double k1 = *rep.K1;
  const double k2 = *rep.K2;
  rep.relations.push_back(relation("K2 <= 2e*K1", k2, 2.0 * e * k1));
  rep.relations.push_back(relation("K3 <= e*K2", *rep.K3, e * k2));
  rep.relations.push_back(relation("K3' <= e^2*K2", *rep.K3_prime, e * e * k2));
  rep.relations.push_back(relation("K1 <= 2*max(K2,K3')", k1, 2.0 * std::max(k2, *rep.K3_prime)));
  if (has_item4) {
    const double k4 = rep.K4.value_or(kInf);
    const double k4p = rep.K4_prime.value_or(kInf);
    rep.relations.push_back(relation("K4 <= K1", k4, k1));
    rep.relations.push_back(relation("K4' <= K1", k4p, k1));
    // Chernoff pairs this threshold with K3 = 2*K4, not with the e*K3 pairing above.
    const bool finite = std::isfinite(k4) && k4 > 0.0;
    const double lhs = finite ? tail_threshold(dist, alpha, 2.0 * k4, t_grid) : 0.0;
    const double rhs = finite ? 2.0 * std::pow(k4, beta) / std::pow(k4p, beta - 1.0) : (k4 == 0.0 ? 0.0 : kInf);
    rep.relations.push_back(relation("K3' <= 2*K4^beta/K4'^(beta-1)", lhs, rhs));
  }
  return rep;
}

std::vector<std::pair<std::string, DiscreteDistribution>> standard_distribution_suite() {
  std::vector<DiscreteDistribution::Atom> geo;
  double norm = 0.0;
  for (int k = 0; k <= 10; ++k) norm += std::exp2(-k);
  for (int k = 0; k <= 10; ++k) geo.push_back({static_cast<double>(k), std::exp2(-k) / norm});
  return {
      {"rademacher", DiscreteDistribution::rademacher()},
      {"two-point", DiscreteDistribution::uniform({0.0, 2.0})},
      {"uniform-5", DiscreteDistribution::uniform({-2.0, -1.0, 0.0, 1.0, 2.0})},
      {"truncated-geometric", DiscreteDistribution(std::move(geo))},
  };
}

}  // namespace rlab
