#pragma once

// Balanced Rademacher ensemble: sign vectors of length 2n with exactly n
// plus-ones, the statistic f(ε) = |Σ aᵢεᵢ|, and its moments.

#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <vector>

#include "rlab/numeric.hpp"

namespace rlab {

/// Largest half-length enumerated by default. C(28,14) ≈ 4.0e7 states.
inline constexpr unsigned kDefaultEnumerationCap = 14;

/// Hard ceiling: signs are packed into a 64-bit mask.
inline constexpr unsigned kMaxHalfLength = 31;

/// Coefficient vector a ∈ ℝ^{2n}.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  unsigned half_length() const noexcept { return static_cast<unsigned>(entries_.size() / 2); }
  std::span<const double> entries() const noexcept { return entries_; }
  double operator[](std::size_t i) const noexcept { return entries_[i]; }

  double sum() const noexcept;
  double norm_squared() const noexcept;
  double norm() const noexcept;

  WeightVector scaled(double t) const;

 private:
  std::vector<double> entries_;
};

/// An element of Ω. Position i carries +1 iff bit i of plus_mask() is set.
class BalancedSign {
 public:
  explicit BalancedSign(std::vector<std::int8_t> signs);
  static BalancedSign from_positions(unsigned n, std::span<const unsigned> plus_positions);

  unsigned half_length() const noexcept { return static_cast<unsigned>(signs_.size() / 2); }
  std::span<const std::int8_t> signs() const noexcept { return signs_; }
  std::int8_t operator[](std::size_t i) const noexcept { return signs_[i]; }
  std::uint64_t plus_mask() const noexcept;

  friend bool operator==(const BalancedSign&, const BalancedSign&) = default;

 private:
  std::vector<std::int8_t> signs_;
};

struct MomentEstimate {
  enum class Method { exact, monte_carlo };

  double value = 0.0;
  double std_error = 0.0;  // 0 for exact results
  Method method = Method::exact;
  std::uint64_t samples = 0;
};

const char* to_string(MomentEstimate::Method m) noexcept;

/// Throws CapacityError if n exceeds `cap`, invalid_argument if n == 0.
void check_half_length(unsigned n, unsigned cap);

/// Lexicographic walk over n-subsets of {0, …, 2n−1} (the +1 positions).
/// Supports seeking by rank so the index range can be split into chunks.
class CombinationCursor {
 public:
  CombinationCursor(unsigned n, std::uint64_t rank = 0);

  std::span<const unsigned> positions() const noexcept { return pos_; }
  unsigned half_length() const noexcept { return n_; }
  /// Advances to the successor; returns false past the last subset.
  bool advance() noexcept;
  /// Index of the first position changed by the last successful advance().
  unsigned first_changed() const noexcept { return changed_; }

 private:
  unsigned n_;
  std::vector<unsigned> pos_;
  unsigned changed_ = 0;
};

/// Input range over Ω in lexicographic order of the +1-position subset.
class BalancedRange {
 public:
  class iterator {
   public:
    using value_type = BalancedSign;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::input_iterator_tag;

    iterator() = default;
    explicit iterator(unsigned n) : cursor_(CombinationCursor(n)) {}

    BalancedSign operator*() const;
    iterator& operator++();
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& it, std::default_sentinel_t) noexcept {
      return !it.cursor_.has_value();
    }

   private:
    std::optional<CombinationCursor> cursor_;
  };

  BalancedRange(unsigned n, unsigned cap);
  iterator begin() const { return iterator(n_); }
  std::default_sentinel_t end() const noexcept { return {}; }
  std::uint64_t size() const { return binomial(2 * n_, n_); }

 private:
  unsigned n_;
};

BalancedRange enumerate_balanced(unsigned n, unsigned cap = kDefaultEnumerationCap);

/// Uniform draw from Ω by shuffling {+1 × n, −1 × n}; deterministic in seed.
BalancedSign sample_balanced(unsigned n, std::uint64_t seed);

double signed_sum(const WeightVector& a, const BalancedSign& eps);
double f_value(const WeightVector& a, const BalancedSign& eps);

/// Σ aᵢεᵢ for every ε ∈ Ω, in enumeration order. Materializes C(2n,n)
/// doubles; intended for n where that table is small.
std::vector<double> signed_sum_table(const WeightVector& a, unsigned cap = kDefaultEnumerationCap);

/// E_S f^p by full enumeration, compensated summation, chunked over the
/// subset rank range.
MomentEstimate exact_moment(const WeightVector& a, double p, unsigned cap = kDefaultEnumerationCap);

/// ‖a‖²·2n/(2n−1) − (Σa)²/(2n−1), from E_S εᵢεⱼ = −1/(2n−1).
double second_moment_closed(const WeightVector& a);

MomentEstimate mc_moment(const WeightVector& a, double p, std::uint64_t samples, std::uint64_t seed);

/// E_S[εᵢεⱼ] by enumeration, as an exact rational.
Rational pair_correlation_exact(unsigned n, unsigned i = 0, unsigned j = 1,
                                unsigned cap = kDefaultEnumerationCap);

/// Exact E_S (Σ aᵢεᵢ)^p for integer weights and integer p, as a rational
/// with denominator C(2n,n) before reduction.
Rational exact_integer_moment(std::span<const std::int64_t> a, unsigned p,
                              unsigned cap = kDefaultEnumerationCap);

}  // namespace rlab
