#pragma once

// Reversible Markov chains: simple random walks on graphs, the lazy random
// transposition walk on permutations of {1..2n}, and its projection onto
// n-subsets (the Bernoulli-Laplace chain).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rlab {

/// Largest half-length for which the full (2n)!-state chain is built.
inline constexpr unsigned kTranspositionWalkCap = 3;
/// Largest half-length for the lumped chain by default (C(14,7) = 3432).
inline constexpr unsigned kLumpedWalkCap = 7;
/// Chains up to this many states use a dense eigensolver.
inline constexpr std::size_t kDenseSpectralLimit = 2000;

class Graph {
 public:
  using Edge = std::pair<unsigned, unsigned>;

  /// Validates: endpoints in range, no self-loops, no duplicates, every
  /// vertex has an edge, connected. Edges are stored sorted with u < v.
  Graph(unsigned vertex_count, std::vector<Edge> edges);

  static Graph cycle(unsigned m);
  /// `V E` header, then E lines of 0-indexed `u v` pairs.
  static Graph parse(std::istream& in);
  static Graph read_file(const std::string& path);

  unsigned vertex_count() const noexcept { return vertex_count_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const unsigned> neighbors(unsigned v) const noexcept { return adjacency_[v]; }
  unsigned degree(unsigned v) const noexcept { return static_cast<unsigned>(adjacency_[v].size()); }

  Graph relabeled(std::span<const unsigned> new_label_of) const;

 private:
  unsigned vertex_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<unsigned>> adjacency_;
};

/// Bijection of {0, …, m−1}; entry i holds σ(i).
class Permutation {
 public:
  explicit Permutation(std::vector<unsigned> mapping);
  static Permutation identity(unsigned m);
  static Permutation transposition(unsigned m, unsigned i, unsigned j);

  unsigned size() const noexcept { return static_cast<unsigned>(map_.size()); }
  unsigned operator()(unsigned i) const noexcept { return map_[i]; }
  std::span<const unsigned> mapping() const noexcept { return map_; }

  /// (σ∘τ)(i) = σ(τ(i)); right-multiplying by a transposition swaps two
  /// entries of the one-line form.
  Permutation compose(const Permutation& tau) const;

  /// Position in lexicographic order of one-line forms.
  std::uint64_t rank() const;
  static Permutation unrank(unsigned m, std::uint64_t rank);

  /// Bitmask of {i : σ(i) < n}, the +1 positions of the balanced sign
  /// vector attached to σ.
  std::uint64_t lower_half_mask(unsigned n) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<unsigned> map_;
};

/// n-element subset of {0, …, 2n−1} as a bitmask.
class SubsetState {
 public:
  SubsetState(unsigned n, std::uint64_t members);
  unsigned half_length() const noexcept { return n_; }
  std::uint64_t members() const noexcept { return members_; }
  bool contains(unsigned i) const noexcept { return (members_ >> i) & 1u; }

  /// Lexicographic rank of the sorted member list; agrees with the order of
  /// enumerate_balanced().
  std::uint64_t rank() const;
  static SubsetState unrank(unsigned n, std::uint64_t rank);

 private:
  unsigned n_;
  std::uint64_t members_;
};

/// Finite reversible chain in sparse row form. Immutable after
/// construction; the constructor checks stochasticity, normalization of μ
/// and detailed balance to 1e-12.
class ReversibleChain {
 public:
  struct Entry {
    std::size_t to;
    double prob;
    /// Exact numerator over exact_denominator(), when the chain has one.
    std::uint64_t numerator = 0;
  };
  using Labeler = std::function<std::string(std::size_t)>;

  ReversibleChain(std::vector<std::vector<Entry>> rows, std::vector<double> stationary,
                  Labeler labeler, std::uint64_t exact_denominator = 0);

  std::size_t size() const noexcept { return row_start_.size() - 1; }
  std::span<const Entry> row(std::size_t x) const noexcept {
    return {entries_.data() + row_start_[x], entries_.data() + row_start_[x + 1]};
  }
  std::span<const double> stationary() const noexcept { return stationary_; }
  double transition(std::size_t x, std::size_t y) const noexcept;
  std::string label(std::size_t x) const { return labeler_ ? labeler_(x) : std::to_string(x); }
  /// Common denominator of every kernel entry, or 0 if entries are not
  /// tracked exactly.
  std::uint64_t exact_denominator() const noexcept { return exact_denominator_; }

  /// Largest |μ(x)P(x,y) − μ(y)P(y,x)| over all pairs.
  double detailed_balance_defect() const noexcept;

 private:
  std::vector<std::size_t> row_start_;
  std::vector<Entry> entries_;
  std::vector<double> stationary_;
  Labeler labeler_;
  std::uint64_t exact_denominator_;
};

struct SpectralReport {
  enum class Method { dense_full, iterative };

  double gap = 0.0;                // 1 − second-largest eigenvalue of P
  double second_eigenvalue = 0.0;
  Method method = Method::dense_full;
  double residual = 0.0;           // ‖S v − θ v‖ on the symmetrized kernel
  std::uint64_t iterations = 0;    // Jacobi sweeps or power steps
  /// Full spectrum, descending; filled on the dense path only.
  std::vector<double> eigenvalues;
};

const char* to_string(SpectralReport::Method m) noexcept;

struct SpectralOptions {
  double tolerance = 1e-10;
  std::size_t dense_limit = kDenseSpectralLimit;
  std::uint64_t max_iterations = 1'000'000;
};

ReversibleChain build_graph_walk(const Graph& g);
ReversibleChain build_transposition_walk(unsigned n, unsigned cap = kTranspositionWalkCap);
ReversibleChain build_lumped_walk(unsigned n, unsigned cap = kLumpedWalkCap);

/// For each state σ of the full transposition walk, its kernel row summed
/// over lumped fibers, as exact numerators over (2n)² indexed by lumped
/// state rank.
std::vector<std::vector<std::uint64_t>> fiber_summed_kernel(const ReversibleChain& full, unsigned n);

/// Dense symmetrized kernel D^{1/2} P D^{-1/2}, row-major.
std::vector<double> symmetrized_kernel(const ReversibleChain& chain);

SpectralReport spectral_gap(const ReversibleChain& chain, const SpectralOptions& opts = {});

std::vector<std::size_t> simulate(const ReversibleChain& chain, std::size_t start,
                                  std::uint64_t steps, std::uint64_t seed);

}  // namespace rlab
