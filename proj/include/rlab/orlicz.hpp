#pragma once

// Orlicz norms of finite discrete distributions and grid certification of
// the ψ_α equivalence constants (moments, tails, exponential moments).

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rlab {

class DiscreteDistribution {
 public:
  struct Atom {
    double value;
    double prob;
  };

  /// Probabilities must be positive and sum to 1 within 1e-12.
  explicit DiscreteDistribution(std::vector<Atom> atoms);

  /// One `value probability` pair per line; blank lines and `#` comments
  /// are skipped.
  static DiscreteDistribution parse(std::istream& in);
  static DiscreteDistribution read_file(const std::string& path);

  static DiscreteDistribution point_mass(double v);
  static DiscreteDistribution uniform(std::vector<double> values);
  static DiscreteDistribution rademacher();

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double max_abs() const noexcept;
  bool is_zero() const noexcept { return max_abs() == 0.0; }
  double mean() const noexcept;
  /// Distribution of t·X.
  DiscreteDistribution scaled(double t) const;

 private:
  std::vector<Atom> atoms_;
};

struct OrliczFunction {
  enum class Kind { phi_p, psi_alpha };

  Kind kind;
  double parameter;

  /// φ_p(x) = x^p / p, p ≥ 1.
  static OrliczFunction phi(double p);
  /// ψ_α(x) = exp(x^α) − 1, α ≥ 1.
  static OrliczFunction psi(double alpha);

  double operator()(double x) const;
};

/// E ψ(|X|/c). ψ_α terms are combined in log space once an exponent
/// passes 700; returns +inf when the expectation overflows.
double expected_orlicz(const DiscreteDistribution& dist, const OrliczFunction& psi, double c);

inline constexpr double kOrliczTolerance = 1e-10;
inline constexpr int kOrliczMaxIterations = 200;

/// inf{c > 0 : E ψ(|X|/c) ≤ 1} by bracketing from max|X| and bisection to
/// an absolute tolerance on c. The returned c satisfies the constraint.
double orlicz_norm(const DiscreteDistribution& dist, const OrliczFunction& psi,
                   double tolerance = kOrliczTolerance);

/// (E|X|^p)^{1/p}, scaled by max|X| to avoid overflow.
double lp_norm(const DiscreteDistribution& dist, double p);

/// P(|X| ≥ t).
double abs_tail(const DiscreteDistribution& dist, double t);

inline constexpr double kMomentGridStep = 0.25;

/// max over p ∈ {α, α + 0.25, …, ≤ p_max} of (E|X|^p)^{1/p} / p^{1/α}.
double moment_growth_constant(const DiscreteDistribution& dist, double alpha, double p_max);

struct RelationCheck {
  std::string label;
  double lhs;
  double rhs;
  bool holds;
  double margin;  // rhs − lhs
};

struct EquivalenceReport {
  double alpha = 1.0;
  std::optional<double> K1, K2, K3, K3_prime, K4, K4_prime;
  std::vector<RelationCheck> relations;
  /// Description of the grids the constants were certified on.
  std::string grid_note;

  bool all_hold() const noexcept;
};

/// Default λ grid for the exponential-moment constant: 2^{k/4}, k = −32…32.
std::vector<double> default_lambda_grid();

/// Computes every ψ_α equivalence constant on the given grids and checks the
/// stated one-directional relations between them. Violations are reported,
/// never thrown.
EquivalenceReport check_equivalences(const DiscreteDistribution& dist, double alpha, double p_max,
                                     const std::vector<double>& t_grid,
                                     const std::vector<double>& lambda_grid = default_lambda_grid());

/// Rademacher, {0, 2} two-point, uniform on {−2, …, 2}, and a geometric
/// law P(k) ∝ 2^{−k} truncated to k ≤ 10.
std::vector<std::pair<std::string, DiscreteDistribution>> standard_distribution_suite();

}  // namespace rlab
