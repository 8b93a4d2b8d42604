#include "rlab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "rlab/errors.hpp"

namespace rlab {

WeightVector::WeightVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty() || entries_.size() % 2 != 0) {
    throw std::invalid_argument("weight vector length must be even and positive, got " +
                                std::to_string(entries_.size()));
  }
  if (entries_.size() / 2 > kMaxHalfLength) {
    throw CapacityError("weight vector too long for 64-bit sign masks", kMaxHalfLength);
  }
  for (double x : entries_) {
    if (!std::isfinite(x)) throw std::invalid_argument("weight vector entries must be finite");
  }
}

double WeightVector::sum() const noexcept { return compensated_sum(entries_); }

double WeightVector::norm_squared() const noexcept {
  CompensatedSum acc;
  for (double x : entries_) acc.add(x * x);
  return acc.value();
}

double WeightVector::norm() const noexcept { return std::sqrt(norm_squared()); }

WeightVector WeightVector::scaled(double t) const {
  std::vector<double> out(entries_);
  for (double& x : out) x *= t;
  return WeightVector(std::move(out));
}

BalancedSign::BalancedSign(std::vector<std::int8_t> signs) : signs_(std::move(signs)) {
  if (signs_.empty() || signs_.size() % 2 != 0) {
    throw std::invalid_argument("sign vector length must be even and positive");
  }
  if (signs_.size() / 2 > kMaxHalfLength) {
    throw CapacityError("sign vector too long for 64-bit masks", kMaxHalfLength);
  }
  long total = 0;
  for (std::int8_t s : signs_) {
    if (s != 1 && s != -1) throw std::invalid_argument("sign entries must be +1 or -1");
    total += s;
  }
  if (total != 0) throw std::invalid_argument("sign vector is not balanced (sum != 0)");
}

BalancedSign BalancedSign::from_positions(unsigned n, std::span<const unsigned> plus_positions) {
  std::vector<std::int8_t> s(2 * static_cast<std::size_t>(n), -1);
  for (unsigned p : plus_positions) {
    if (p >= s.size()) throw std::invalid_argument("plus position out of range");
    s[p] = 1;
  }
  return BalancedSign(std::move(s));
}

std::uint64_t BalancedSign::plus_mask() const noexcept {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < signs_.size(); ++i) {
    if (signs_[i] > 0) m |= std::uint64_t{1} << i;
  }
  return m;
}

const char* to_string(MomentEstimate::Method m) noexcept {
  return m == MomentEstimate::Method::exact ? "exact" : "monte-carlo";
}

void check_half_length(unsigned n, unsigned cap) {
  if (n == 0) throw std::invalid_argument("half-length n must be at least 1");
  const unsigned limit = std::min(cap, kMaxHalfLength);
  if (n > limit) {
    throw CapacityError("half-length n = " + std::to_string(n) + " exceeds the enumeration cap",
                        limit);
  }
}

CombinationCursor::CombinationCursor(unsigned n, std::uint64_t rank) : n_(n), pos_(n) {
  const unsigned total = 2 * n;
  if (rank >= binomial(total, n)) throw std::out_of_range("combination rank out of range");
  // Unrank in lexicographic order: fix each slot to the smallest value whose
  // block of completions still contains `rank`.
  unsigned next = 0;
  for (unsigned slot = 0; slot < n; ++slot) {
    for (unsigned x = next;; ++x) {
      const std::uint64_t block = binomial(total - x - 1, n - slot - 1);
      if (rank < block) {
        pos_[slot] = x;
        next = x + 1;
        break;
      }
      rank -= block;
    }
  }
}

bool CombinationCursor::advance() noexcept {
  for (unsigned i = n_; i-- > 0;) {
    if (pos_[i] < n_ + i) {
      ++pos_[i];
      for (unsigned k = i + 1; k < n_; ++k) pos_[k] = pos_[k - 1] + 1;
      changed_ = i;
      return true;
    }
  }
  return false;
}

BalancedSign BalancedRange::iterator::operator*() const {
  return BalancedSign::from_positions(cursor_->half_length(), cursor_->positions());
}

BalancedRange::iterator& BalancedRange::iterator::operator++() {
  if (cursor_ && !cursor_->advance()) cursor_.reset();
  return *this;
}

BalancedRange::BalancedRange(unsigned n, unsigned cap) : n_(n) { check_half_length(n, cap); }

BalancedRange enumerate_balanced(unsigned n, unsigned cap) { return BalancedRange(n, cap); }

BalancedSign sample_balanced(unsigned n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("half-length n must be at least 1");
  std::vector<std::int8_t> s(2 * static_cast<std::size_t>(n), -1);
  std::fill_n(s.begin(), n, std::int8_t{1});
  std::mt19937_64 rng(seed);
  std::shuffle(s.begin(), s.end(), rng);
  return BalancedSign(std::move(s));
}

double signed_sum(const WeightVector& a, const BalancedSign& eps) {
  if (a.size() != eps.signs().size()) {
    throw std::invalid_argument("weight and sign vectors differ in length");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * eps[i];
  return s;
}

double f_value(const WeightVector& a, const BalancedSign& eps) {
  return std::abs(signed_sum(a, eps));
}

namespace {

// Σ aᵢεᵢ as S_A − S_{Aᶜ}, each side summed in index order from zero, so a
// state and its complement give exactly opposite values.
double split_difference(const WeightVector& a, std::span<const unsigned> plus) {
  double sp = 0.0;
  double sm = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (k < plus.size() && plus[k] == i) {
      sp += a[i];
      ++k;
    } else {
      sm += a[i];
    }
  }
  return sp - sm;
}

// Visits Σ aᵢεᵢ for ranks [first, first + count).
template <typename Visitor>
void visit_signed_sums(const WeightVector& a, std::uint64_t first, std::uint64_t count,
                       Visitor&& visit) {
  if (count == 0) return;
  CombinationCursor cur(a.half_length(), first);
  for (std::uint64_t r = 0;;) {
    visit(split_difference(a, cur.positions()));
    if (++r == count || !cur.advance()) break;
  }
}

double power_term(double f, double p) {
  if (p == 2.0) return f * f;
  if (p == 1.0) return f;
  return std::pow(f, p);
}

}  // namespace

std::vector<double> signed_sum_table(const WeightVector& a, unsigned cap) {
  const unsigned n = a.half_length();
  check_half_length(n, cap);
  const std::uint64_t states = binomial(2 * n, n);
  std::vector<double> out;
  out.reserve(states);
  visit_signed_sums(a, 0, states, [&](double g) { out.push_back(g); });
  return out;
}

MomentEstimate exact_moment(const WeightVector& a, double p, unsigned cap) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("moment order p must be >= 1");
  const unsigned n = a.half_length();
  check_half_length(n, cap);
  const std::uint64_t states = binomial(2 * n, n);

  constexpr std::uint64_t kChunk = std::uint64_t{1} << 20;
  const std::uint64_t chunks = (states + kChunk - 1) / kChunk;
  std::vector<CompensatedSum> partial(chunks);
  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t first = c * kChunk;
    const std::uint64_t count = std::min(kChunk, states - first);
    visit_signed_sums(a, first, count,
                      [&](double g) { partial[c].add(power_term(std::abs(g), p)); });
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(chunks, std::max(1u, std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += workers) run_chunk(c);
      });
    }
  }
  // Reduce in chunk order so the result does not depend on scheduling.
  CompensatedSum total;
  for (const auto& s : partial) total.merge(s);

  return MomentEstimate{total.value() / static_cast<double>(states), 0.0,
                        MomentEstimate::Method::exact, states};
}

double second_moment_closed(const WeightVector& a) {
  // Centered form of ‖a‖²·m/(m−1) − (Σa)²/(m−1); no cancellation.
  const double m = static_cast<double>(a.size());
  const double mean = a.sum() / m;
  CompensatedSum ss;
  for (double x : a.entries()) ss.add((x - mean) * (x - mean));
  return ss.value() * m / (m - 1.0);
}

MomentEstimate mc_moment(const WeightVector& a, double p, std::uint64_t samples,
                         std::uint64_t seed) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("moment order p must be >= 1");
  if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least 2 samples");
  const unsigned n = a.half_length();
  std::vector<std::int8_t> s(a.size(), -1);
  std::fill_n(s.begin(), n, std::int8_t{1});
  std::vector<unsigned> plus;
  plus.reserve(n);
  std::mt19937_64 rng(seed);

  // Welford running mean / variance.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t k = 1; k <= samples; ++k) {
    std::shuffle(s.begin(), s.end(), rng);
    // Same arithmetic as the enumeration, so equal states give equal bits.
    plus.clear();
    for (unsigned i = 0; i < s.size(); ++i) {
      if (s[i] > 0) plus.push_back(i);
    }
    const double x = power_term(std::abs(split_difference(a, plus)), p);
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return MomentEstimate{mean, std::sqrt(var / static_cast<double>(samples)),
                        MomentEstimate::Method::monte_carlo, samples};
}

Rational pair_correlation_exact(unsigned n, unsigned i, unsigned j, unsigned cap) {
  check_half_length(n, cap);
  if (i == j || i >= 2 * n || j >= 2 * n) {
    throw std::invalid_argument("pair correlation needs two distinct valid coordinates");
  }
  __int128 acc = 0;
  __int128 states = 0;
  CombinationCursor cur(n);
  do {
    bool in_i = false;
    bool in_j = false;
    for (unsigned p : cur.positions()) {
      in_i |= (p == i);
      in_j |= (p == j);
    }
    acc += (in_i == in_j) ? 1 : -1;
    ++states;
  } while (cur.advance());
  return Rational::make(acc, states);
}

Rational exact_integer_moment(std::span<const std::int64_t> a, unsigned p, unsigned cap) {
  if (a.empty() || a.size() % 2 != 0) throw std::invalid_argument("weight length must be even");
  const unsigned n = static_cast<unsigned>(a.size() / 2);
  check_half_length(n, cap);
  __int128 total = 0;
  for (auto x : a) total += x;
  __int128 acc = 0;
  __int128 states = 0;
  CombinationCursor cur(n);
  do {
    __int128 in = 0;
    for (unsigned pos : cur.positions()) in += a[pos];
    const __int128 g = 2 * in - total;
    __int128 term = 1;
    for (unsigned k = 0; k < p; ++k) term *= g;
    acc += term;
    ++states;
  } while (cur.advance());
  return Rational::make(acc, states);
}

}  // namespace rlab
