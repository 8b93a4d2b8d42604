#include "rlab/walk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rlab/ensemble.hpp"
#include "rlab/errors.hpp"
#include "rlab/jacobi.hpp"
#include "rlab/numeric.hpp"

namespace rlab {

// ---------------------------------------------------------------- Graph

Graph::Graph(unsigned vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)), adjacency_(vertex_count) {
  if (vertex_count_ < 2) throw std::invalid_argument("graph needs at least 2 vertices");
  for (auto& [u, v] : edges_) {
    if (u >= vertex_count_ || v >= vertex_count_) {
      throw std::invalid_argument("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") references a vertex out of range");
    }
    if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw std::invalid_argument("duplicate edge (" + std::to_string(dup->first) + ", " +
                                std::to_string(dup->second) + ")");
  }
  for (auto [u, v] : edges_) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  for (unsigned v = 0; v < vertex_count_; ++v) {
    if (adjacency_[v].empty()) throw std::invalid_argument("vertex " + std::to_string(v) + " is isolated");
  }

  std::vector<bool> seen(vertex_count_, false);
  std::vector<unsigned> stack{0};
  seen[0] = true;
  unsigned reached = 1;
  while (!stack.empty()) {
    const unsigned u = stack.back();
    stack.pop_back();
    for (unsigned w : adjacency_[u]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != vertex_count_) throw std::invalid_argument("graph is disconnected");
}

Graph Graph::cycle(unsigned m) {
  if (m < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
  std::vector<Edge> e;
  for (unsigned i = 0; i < m; ++i) e.emplace_back(i, (i + 1) % m);
  return Graph(m, std::move(e));
}

Graph Graph::parse(std::istream& in) {
  std::string line;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      const auto first = out.find_first_not_of(" \t\r");
      if (first != std::string::npos && out[first] != '#') return true;
    }
    return false;
  };
  if (!next_line(line)) throw std::invalid_argument("graph file: missing 'V E' header");
  long long v_count = -1;
  long long e_count = -1;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> v_count >> e_count) || (hs >> extra) || v_count < 0 || e_count < 0) {
      throw std::invalid_argument("graph file: malformed header '" + line + "'");
    }
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(e_count));
  for (long long k = 0; k < e_count; ++k) {
    if (!next_line(line)) {
      throw std::invalid_argument("graph file: expected " + std::to_string(e_count) +
                                  " edges, found " + std::to_string(k));
    }
    std::istringstream ls(line);
    long long u = -1;
    long long v = -1;
    std::string extra;
    if (!(ls >> u >> v) || (ls >> extra) || u < 0 || v < 0) {
      throw std::invalid_argument("graph file: malformed edge line '" + line + "'");
    }
    edges.emplace_back(static_cast<unsigned>(u), static_cast<unsigned>(v));
  }
  if (next_line(line)) throw std::invalid_argument("graph file: trailing content after edge list");
  return Graph(static_cast<unsigned>(v_count), std::move(edges));
}

Graph Graph::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  return parse(in);
}

Graph Graph::relabeled(std::span<const unsigned> new_label_of) const {
  if (new_label_of.size() != vertex_count_) throw std::invalid_argument("relabeling has wrong size");
  std::vector<Edge> e;
  e.reserve(edges_.size());
  for (auto [u, v] : edges_) e.emplace_back(new_label_of[u], new_label_of[v]);
  return Graph(vertex_count_, std::move(e));
}

// ---------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<unsigned> mapping) : map_(std::move(mapping)) {
  std::vector<bool> hit(map_.size(), false);
  for (unsigned x : map_) {
    if (x >= map_.size() || hit[x]) throw std::invalid_argument("mapping is not a bijection");
    hit[x] = true;
  }
}

Permutation Permutation::identity(unsigned m) {
  std::vector<unsigned> id(m);
  std::iota(id.begin(), id.end(), 0u);
  return Permutation(std::move(id));
}

Permutation Permutation::transposition(unsigned m, unsigned i, unsigned j) {
  if (i >= m || j >= m) throw std::invalid_argument("transposition index out of range");
  std::vector<unsigned> id(m);
  std::iota(id.begin(), id.end(), 0u);
  std::swap(id[i], id[j]);
  return Permutation(std::move(id));
}

Permutation Permutation::compose(const Permutation& tau) const {
  if (tau.size() != size()) throw std::invalid_argument("composing permutations of different sizes");
  std::vector<unsigned> out(size());
  for (unsigned i = 0; i < size(); ++i) out[i] = map_[tau.map_[i]];
  return Permutation(std::move(out));
}

namespace {

std::uint64_t factorial(unsigned m) {
  std::uint64_t f = 1;
  for (unsigned k = 2; k <= m; ++k) f *= k;
  return f;
}

}  // namespace

std::uint64_t Permutation::rank() const {
  // Lehmer code.
  const unsigned m = size();
  std::uint64_t r = 0;
  for (unsigned i = 0; i < m; ++i) {
    unsigned smaller = 0;
    for (unsigned j = i + 1; j < m; ++j) smaller += map_[j] < map_[i];
    r += smaller * factorial(m - 1 - i);
  }
  return r;
}

Permutation Permutation::unrank(unsigned m, std::uint64_t rank) {
  if (rank >= factorial(m)) throw std::out_of_range("permutation rank out of range");
  std::vector<unsigned> pool(m);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<unsigned> out;
  out.reserve(m);
  for (unsigned i = 0; i < m; ++i) {
    const std::uint64_t f = factorial(m - 1 - i);
    const auto idx = static_cast<std::size_t>(rank / f);
    rank %= f;
    out.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return Permutation(std::move(out));
}

std::uint64_t Permutation::lower_half_mask(unsigned n) const {
  std::uint64_t mask = 0;
  for (unsigned i = 0; i < size(); ++i) {
    if (map_[i] < n) mask |= std::uint64_t{1} << i;
  }
  return mask;
}

// ---------------------------------------------------------- SubsetState

SubsetState::SubsetState(unsigned n, std::uint64_t members) : n_(n), members_(members) {
  if (n == 0 || n > kMaxHalfLength) throw std::invalid_argument("subset half-length out of range");
  if (2 * n < 64 && (members >> (2 * n)) != 0) throw std::invalid_argument("subset member out of range");
  if (static_cast<unsigned>(std::popcount(members)) != n) {
    throw std::invalid_argument("subset must have exactly n members");
  }
}

std::uint64_t SubsetState::rank() const {
  const unsigned total = 2 * n_;
  std::uint64_t r = 0;
  unsigned slot = 0;
  unsigned next = 0;
  for (unsigned x = 0; x < total && slot < n_; ++x) {
    if (!contains(x)) continue;
    for (unsigned y = next; y < x; ++y) r += binomial(total - y - 1, n_ - slot - 1);
    next = x + 1;
    ++slot;
  }
  return r;
}

SubsetState SubsetState::unrank(unsigned n, std::uint64_t rank) {
  CombinationCursor cur(n, rank);
  std::uint64_t m = 0;
  for (unsigned p : cur.positions()) m |= std::uint64_t{1} << p;
  return SubsetState(n, m);
}

// ------------------------------------------------------ ReversibleChain

namespace {

constexpr double kChainTolerance = 1e-12;

}  // namespace

ReversibleChain::ReversibleChain(std::vector<std::vector<Entry>> rows, std::vector<double> stationary,
                                 Labeler labeler, std::uint64_t exact_denominator)
    : stationary_(std::move(stationary)),
      labeler_(std::move(labeler)),
      exact_denominator_(exact_denominator) {
  const std::size_t n = rows.size();
  if (n == 0) throw std::invalid_argument("chain has no states");
  if (stationary_.size() != n) throw std::invalid_argument("stationary vector has wrong size");

  row_start_.reserve(n + 1);
  row_start_.push_back(0);
  for (std::size_t x = 0; x < n; ++x) {
    auto& r = rows[x];
    std::sort(r.begin(), r.end(), [](const Entry& a, const Entry& b) { return a.to < b.to; });
    CompensatedSum mass;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k].to >= n) throw std::invalid_argument("transition to an unknown state");
      if (k > 0 && r[k].to == r[k - 1].to) throw std::invalid_argument("duplicate transition entry");
      if (!(r[k].prob > 0.0) || r[k].prob > 1.0) throw std::invalid_argument("transition probability out of (0, 1]");
      mass.add(r[k].prob);
    }
    if (std::abs(mass.value() - 1.0) > kChainTolerance) {
      throw std::invalid_argument("row " + std::to_string(x) + " is not stochastic");
    }
    entries_.insert(entries_.end(), r.begin(), r.end());
    row_start_.push_back(entries_.size());
  }

  CompensatedSum total;
  for (double m : stationary_) {
    if (!(m > 0.0)) throw std::invalid_argument("stationary measure must be positive");
    total.add(m);
  }
  if (std::abs(total.value() - 1.0) > kChainTolerance) {
    throw std::invalid_argument("stationary measure does not sum to 1");
  }
  if (detailed_balance_defect() > kChainTolerance) {
    throw std::invalid_argument("chain violates detailed balance");
  }
}

double ReversibleChain::transition(std::size_t x, std::size_t y) const noexcept {
  const auto r = row(x);
  const auto it = std::lower_bound(r.begin(), r.end(), y,
                                   [](const Entry& e, std::size_t v) { return e.to < v; });
  return (it != r.end() && it->to == y) ? it->prob : 0.0;
}

double ReversibleChain::detailed_balance_defect() const noexcept {
  double worst = 0.0;
  for (std::size_t x = 0; x < size(); ++x) {
    for (const Entry& e : row(x)) {
      const double fwd = stationary_[x] * e.prob;
      const double bwd = stationary_[e.to] * transition(e.to, x);
      worst = std::max(worst, std::abs(fwd - bwd));
    }
  }
  return worst;
}

const char* to_string(SpectralReport::Method m) noexcept {
  return m == SpectralReport::Method::dense_full ? "dense-full" : "iterative";
}

// -------------------------------------------------------------- builders

ReversibleChain build_graph_walk(const Graph& g) {
  const unsigned v_count = g.vertex_count();
  std::vector<std::vector<ReversibleChain::Entry>> rows(v_count);
  std::vector<double> mu(v_count);
  const double two_e = 2.0 * static_cast<double>(g.edges().size());
  for (unsigned v = 0; v < v_count; ++v) {
    const double p = 1.0 / g.degree(v);
    for (unsigned w : g.neighbors(v)) rows[v].push_back({w, p});
    mu[v] = g.degree(v) / two_e;
  }
  return ReversibleChain(std::move(rows), std::move(mu),
                         [](std::size_t x) { return "v" + std::to_string(x); });
}

namespace {

std::string one_line_label(const Permutation& s) {
  std::string out = "(";
  for (unsigned i = 0; i < s.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(s(i) + 1);
  }
  return out + ")";
}

std::string subset_label(const SubsetState& a) {
  std::string out = "{";
  bool first = true;
  for (unsigned i = 0; i < 2 * a.half_length(); ++i) {
    if (!a.contains(i)) continue;
    if (!first) out += ',';
    out += std::to_string(i + 1);
    first = false;
  }
  return out + "}";
}

}  // namespace

ReversibleChain build_transposition_walk(unsigned n, unsigned cap) {
  if (n == 0) throw std::invalid_argument("half-length n must be at least 1");
  if (n > std::min(cap, 4u)) {
    throw CapacityError("transposition walk on (2n)! states exceeds the dense cap at n = " +
                            std::to_string(n),
                        std::min(cap, 4u));
  }
  const unsigned m = 2 * n;
  const std::uint64_t states = factorial(m);
  // Entries in units of 1/(2n)²: each transposition 2, holding 2n.
  const std::uint64_t denom = static_cast<std::uint64_t>(m) * m;
  const double move = 2.0 / static_cast<double>(denom);
  const double hold = static_cast<double>(m) / static_cast<double>(denom);

  std::vector<std::vector<ReversibleChain::Entry>> rows(states);
  std::vector<unsigned> sigma(m);
  std::iota(sigma.begin(), sigma.end(), 0u);
  std::uint64_t idx = 0;
  do {
    auto& r = rows[idx];
    r.reserve(m * (m - 1) / 2 + 1);
    r.push_back({idx, hold, m});
    for (unsigned i = 0; i < m; ++i) {
      for (unsigned j = i + 1; j < m; ++j) {
        std::swap(sigma[i], sigma[j]);
        r.push_back({Permutation(sigma).rank(), move, 2});
        std::swap(sigma[i], sigma[j]);
      }
    }
    ++idx;
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  std::vector<double> mu(states, 1.0 / static_cast<double>(states));
  return ReversibleChain(
      std::move(rows), std::move(mu),
      [m](std::size_t x) { return one_line_label(Permutation::unrank(m, x)); }, denom);
}

ReversibleChain build_lumped_walk(unsigned n, unsigned cap) {
  if (n == 0) throw std::invalid_argument("half-length n must be at least 1");
  const unsigned limit = std::min(cap, kMaxHalfLength);
  if (n > limit) {
    throw CapacityError("lumped walk at n = " + std::to_string(n) + " exceeds the cap", limit);
  }
  const unsigned m = 2 * n;
  const std::uint64_t states = binomial(m, n);
  const std::uint64_t denom = static_cast<std::uint64_t>(m) * m;
  // 1/(2n²) per exchange = 2 units of 1/(2n)²; holding 1/2 = 2n² units.
  const double move = 2.0 / static_cast<double>(denom);
  const std::uint64_t hold_units = denom / 2;

  std::vector<std::vector<ReversibleChain::Entry>> rows(states);
  CombinationCursor cur(n);
  std::uint64_t idx = 0;
  do {
    std::uint64_t mask = 0;
    for (unsigned p : cur.positions()) mask |= std::uint64_t{1} << p;
    auto& r = rows[idx];
    r.reserve(static_cast<std::size_t>(n) * n + 1);
    r.push_back({idx, 0.5, hold_units});
    for (unsigned i = 0; i < m; ++i) {
      if (!((mask >> i) & 1u)) continue;
      for (unsigned j = 0; j < m; ++j) {
        if ((mask >> j) & 1u) continue;
        const std::uint64_t next = (mask & ~(std::uint64_t{1} << i)) | (std::uint64_t{1} << j);
        r.push_back({SubsetState(n, next).rank(), move, 2});
      }
    }
    ++idx;
  } while (cur.advance());

  std::vector<double> mu(states, 1.0 / static_cast<double>(states));
  return ReversibleChain(
      std::move(rows), std::move(mu),
      [n](std::size_t x) { return subset_label(SubsetState::unrank(n, x)); }, denom);
}

std::vector<std::vector<std::uint64_t>> fiber_summed_kernel(const ReversibleChain& full, unsigned n) {
  const unsigned m = 2 * n;
  if (full.size() != factorial(m) || full.exact_denominator() != static_cast<std::uint64_t>(m) * m) {
    throw std::invalid_argument("chain is not the transposition walk at this half-length");
  }
  const std::uint64_t lumped_states = binomial(m, n);
  std::vector<std::uint64_t> fiber_of(full.size());
  for (std::size_t x = 0; x < full.size(); ++x) {
    fiber_of[x] = SubsetState(n, Permutation::unrank(m, x).lower_half_mask(n)).rank();
  }
  std::vector<std::vector<std::uint64_t>> out(full.size(), std::vector<std::uint64_t>(lumped_states, 0));
  for (std::size_t x = 0; x < full.size(); ++x) {
    for (const auto& e : full.row(x)) out[x][fiber_of[e.to]] += e.numerator;
  }
  return out;
}

// -------------------------------------------------------------- spectra

std::vector<double> symmetrized_kernel(const ReversibleChain& chain) {
  const std::size_t n = chain.size();
  const auto mu = chain.stationary();
  std::vector<double> s(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (const auto& e : chain.row(x)) {
      s[x * n + e.to] = std::sqrt(mu[x] / mu[e.to]) * e.prob;
    }
  }
  // Reversibility makes S symmetric up to rounding; average the halves.
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const double avg = 0.5 * (s[x * n + y] + s[y * n + x]);
      s[x * n + y] = avg;
      s[y * n + x] = avg;
    }
  }
  return s;
}

namespace {

// y = S x with S(x,y) = √(μx/μy)·P(x,y), applied from the sparse rows.
void apply_symmetrized(const ReversibleChain& chain, std::span<const double> sqrt_mu,
                       std::span<const double> v, std::span<double> out) {
  for (std::size_t x = 0; x < chain.size(); ++x) {
    double acc = 0.0;
    for (const auto& e : chain.row(x)) acc += e.prob * v[e.to] / sqrt_mu[e.to];
    out[x] = sqrt_mu[x] * acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

double residual_norm(const ReversibleChain& chain, std::span<const double> sqrt_mu,
                     std::span<const double> v, double theta) {
  std::vector<double> sv(v.size());
  apply_symmetrized(chain, sqrt_mu, v, sv);
  double r = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = sv[i] - theta * v[i];
    r += d * d;
  }
  return std::sqrt(r);
}

SpectralReport dense_gap(const ReversibleChain& chain, std::span<const double> sqrt_mu,
                         const SpectralOptions& opts) {
  const std::size_t n = chain.size();
  auto eig = symmetric_eigen(symmetrized_kernel(chain), n);
  SpectralReport rep;
  rep.method = SpectralReport::Method::dense_full;
  rep.iterations = eig.sweeps;
  rep.second_eigenvalue = eig.values[1];
  rep.gap = 1.0 - eig.values[1];
  rep.residual = residual_norm(chain, sqrt_mu,
                               std::span<const double>(eig.vectors.data() + n, n), eig.values[1]);
  rep.eigenvalues = std::move(eig.values);
  if (rep.residual > opts.tolerance) {
    throw ConvergenceError("dense eigensolver residual " + std::to_string(rep.residual) +
                           " exceeds tolerance");
  }
  return rep;
}

// Power iteration on (S + I)/2 restricted to the complement of √μ. The
// shift maps the spectrum into [0, 1] so the dominant remaining mode is the
// second-largest eigenvalue of P, not the most negative one.
SpectralReport iterative_gap(const ReversibleChain& chain, std::span<const double> sqrt_mu,
                             const SpectralOptions& opts) {
  const std::size_t n = chain.size();
  std::vector<double> v(n);
  std::vector<double> sv(n);
  std::mt19937_64 rng(0x5eed'5eedULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double& x : v) x = unif(rng);

  auto deflate_normalize = [&](std::vector<double>& w) {
    const double c = dot(w, sqrt_mu);
    for (std::size_t i = 0; i < n; ++i) w[i] -= c * sqrt_mu[i];
    const double norm = std::sqrt(dot(w, w));
    if (!(norm > 0.0)) throw ConvergenceError("power iteration collapsed to the zero vector");
    for (double& x : w) x /= norm;
  };
  deflate_normalize(v);

  SpectralReport rep;
  rep.method = SpectralReport::Method::iterative;
  constexpr std::uint64_t kCheckEvery = 16;
  for (std::uint64_t it = 1; it <= opts.max_iterations; ++it) {
    apply_symmetrized(chain, sqrt_mu, v, sv);
    if (it % kCheckEvery == 0) {
      const double theta = dot(v, sv);
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i) r += (sv[i] - theta * v[i]) * (sv[i] - theta * v[i]);
      r = std::sqrt(r);
      if (r <= opts.tolerance) {
        rep.second_eigenvalue = theta;
        rep.gap = 1.0 - theta;
        rep.residual = r;
        rep.iterations = it;
        return rep;
      }
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.5 * (v[i] + sv[i]);
    deflate_normalize(v);
  }
  throw ConvergenceError("power iteration did not reach residual " + std::to_string(opts.tolerance) +
                         " within " + std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace

SpectralReport spectral_gap(const ReversibleChain& chain, const SpectralOptions& opts) {
  if (chain.size() < 2) throw std::invalid_argument("spectral gap needs at least 2 states");
  if (chain.detailed_balance_defect() > kChainTolerance) {
    throw std::invalid_argument("chain is not reversible");
  }
  std::vector<double> sqrt_mu(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) sqrt_mu[i] = std::sqrt(chain.stationary()[i]);
  if (chain.size() <= opts.dense_limit) return dense_gap(chain, sqrt_mu, opts);
  return iterative_gap(chain, sqrt_mu, opts);
}

// ------------------------------------------------------------ simulation

std::vector<std::size_t> simulate(const ReversibleChain& chain, std::size_t start,
                                  std::uint64_t steps, std::uint64_t seed) {
  if (start >= chain.size()) {
    throw std::out_of_range("start state " + std::to_string(start) + " is not a state of the chain");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> path;
  path.reserve(static_cast<std::size_t>(steps) + 1);
  path.push_back(start);
  std::size_t x = start;
  for (std::uint64_t t = 0; t < steps; ++t) {
    const auto r = chain.row(x);
    const double u = unif(rng);
    double acc = 0.0;
    std::size_t next = r.back().to;
    for (const auto& e : r) {
      acc += e.prob;
      if (u < acc) {
        next = e.to;
        break;
      }
    }
    x = next;
    path.push_back(x);
  }
  return path;
}

}  // namespace rlab
