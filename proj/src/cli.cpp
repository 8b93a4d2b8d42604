#include "rlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <CLI11.hpp>
#include <json.hpp>

#include "rlab/concentration.hpp"
#include "rlab/ensemble.hpp"
#include "rlab/errors.hpp"
#include "rlab/lipschitz.hpp"
#include "rlab/orlicz.hpp"
#include "rlab/walk.hpp"

namespace rlab::cli {

using Json = nlohmann::ordered_json;

// ------------------------------------------------------------ parsing

namespace {

double parse_real(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  if (b == std::string_view::npos) throw std::invalid_argument("empty number");
  s = s.substr(b, e - b + 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("not a finite number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_real(std::string_view(text).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const auto colon = text.find(':', start);
      parts.push_back(parse_real(std::string_view(text).substr(start, colon - start)));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3) throw std::invalid_argument("grid must be start:stop:step, got '" + text + "'");
    const double lo = parts[0];
    const double hi = parts[1];
    const double step = parts[2];
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (hi < lo) throw std::invalid_argument("grid stop is below start");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 10'000'000) throw std::invalid_argument("grid has too many points");
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(lo + static_cast<double>(k) * step);
  } else {
    out = parse_list(text);
  }
  if (out.empty()) throw std::invalid_argument("grid is empty");
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!(out[k] > out[k - 1])) throw std::invalid_argument("grid must be strictly ascending: '" + text + "'");
  }
  return out;
}

std::vector<double> read_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open values file '" + path + "'");
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back(parse_real(std::string_view(line).substr(first, last - first + 1)));
  }
  if (out.empty()) throw std::invalid_argument("values file '" + path + "' has no values");
  return out;
}

// ------------------------------------------------------------- config

namespace {

struct RunConfig {
  std::string subcommand;
  unsigned n = 0;
  std::string weights;
  std::string weights_file;
  double p = 2.0;
  std::string p_grid = "2:20:1";
  std::string t_grid = "0.25:3:0.25";
  std::string x_grid = "1:50:0.1";
  std::string walk = "lumped";
  std::string graph_file;
  unsigned cycle = 0;
  std::string fvals;
  std::string dist_file;
  std::string builtin;
  std::string kind = "psi";
  double alpha = 1.0;
  double p_max = 20.0;
  double prefactor = 3.0;
  bool monte_carlo = false;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
  std::string format = "json";
  unsigned enum_cap = kDefaultEnumerationCap;
  unsigned lumped_cap = kLumpedWalkCap;
};

Json config_json(const RunConfig& c) {
  return Json{{"subcommand", c.subcommand},
              {"n", c.n},
              {"weights", c.weights},
              {"weights_file", c.weights_file},
              {"p", c.p},
              {"p_grid", c.p_grid},
              {"t_grid", c.t_grid},
              {"x_grid", c.x_grid},
              {"walk", c.walk},
              {"graph", c.graph_file},
              {"cycle", c.cycle},
              {"fvals", c.fvals},
              {"dist", c.dist_file},
              {"builtin", c.builtin},
              {"kind", c.kind},
              {"alpha", c.alpha},
              {"p_max", c.p_max},
              {"prefactor", c.prefactor},
              {"mc", c.monte_carlo},
              {"samples", c.samples},
              {"seed", c.seed},
              {"tolerance", c.tolerance},
              {"format", c.format},
              {"enum_cap", c.enum_cap},
              {"lumped_cap", c.lumped_cap}};
}

// ------------------------------------------------------------- output

// Collects point records and a summary, then writes them as JSON lines or
// CSV. Numbers are rendered by the JSON serializer in both formats so the
// two outputs carry identical digits.
class Emitter {
 public:
  Emitter(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out), config_(config_json(cfg)) {}

  void point(const std::string& name, double input, double lhs, double rhs, bool holds) {
    Json rec{{"name", name},      {"input", input}, {"lhs", lhs},
             {"rhs", rhs},        {"holds", holds}, {"margin", rhs - lhs}};
    points_.push_back(std::move(rec));
    if (!holds) ++violations_;
  }

  void report(const CheckReport& rep, const std::string& prefix = "") {
    for (const auto& p : rep.points()) point(rep.name(), p.input, p.lhs, p.rhs, p.holds);
    for (const auto& [k, v] : rep.metrics()) summary_[prefix + k] = v;
  }

  Json& summary() { return summary_; }

  int finish() {
    Json tail;
    tail["record"] = "summary";
    for (auto& [k, v] : summary_.items()) tail[k] = v;
    tail["points"] = points_.size();
    tail["violations"] = violations_;
    tail["all_hold"] = violations_ == 0;
    stamp(tail);

    if (cfg_.format == "csv") {
      out_ << "# rlab " << RLAB_VERSION << " subcommand=" << cfg_.subcommand << " seed=" << cfg_.seed
           << " config=" << config_.dump() << '\n';
      out_ << "name,input,lhs,rhs,holds,margin\n";
      for (const auto& p : points_) {
        out_ << csv_quote(p["name"].get<std::string>()) << ',' << p["input"].dump() << ','
             << p["lhs"].dump() << ',' << p["rhs"].dump() << ',' << p["holds"].dump() << ','
             << p["margin"].dump() << '\n';
      }
      out_ << "# summary\nkey,value\n";
      for (auto& [k, v] : tail.items()) {
        if (k == "config") continue;
        out_ << csv_quote(k) << ',' << csv_quote(v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
      }
    } else {
      for (auto p : points_) {
        p["record"] = "point";
        stamp(p);
        out_ << p.dump() << '\n';
      }
      out_ << tail.dump() << '\n';
    }
    return violations_ == 0 ? kAllHold : kViolation;
  }

 private:
  void stamp(Json& rec) const {
    rec["tool_version"] = RLAB_VERSION;
    rec["subcommand"] = cfg_.subcommand;
    rec["seed"] = cfg_.seed;
    rec["config"] = config_;
  }

  static std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + '"';
  }

  const RunConfig& cfg_;
  std::ostream& out_;
  Json config_;
  std::vector<Json> points_;
  Json summary_ = Json::object();
  std::size_t violations_ = 0;
};

// ------------------------------------------------------------ helpers

WeightVector load_weights(const RunConfig& c) {
  if (c.weights.empty() == c.weights_file.empty()) {
    throw std::invalid_argument("give exactly one of --weights or --weights-file");
  }
  WeightVector a(c.weights.empty() ? read_values_file(c.weights_file) : parse_list(c.weights));
  if (c.n != 0 && a.half_length() != c.n) {
    throw std::invalid_argument("--n " + std::to_string(c.n) + " does not match " +
                                std::to_string(a.size()) + " weights");
  }
  return a;
}

DiscreteDistribution load_distribution(const RunConfig& c) {
  if (c.dist_file.empty() == c.builtin.empty()) {
    throw std::invalid_argument("give exactly one of --dist or --builtin");
  }
  if (!c.dist_file.empty()) return DiscreteDistribution::read_file(c.dist_file);
  for (auto& [name, d] : standard_distribution_suite()) {
    if (name == c.builtin) return d;
  }
  throw std::invalid_argument("unknown builtin distribution '" + c.builtin + "'");
}

bool has_graph_input(const RunConfig& c) { return !c.graph_file.empty() || c.cycle != 0; }

Graph load_graph(const RunConfig& c) {
  if (!c.graph_file.empty() && c.cycle != 0) throw std::invalid_argument("give only one of --graph or --cycle");
  return c.graph_file.empty() ? Graph::cycle(c.cycle) : Graph::read_file(c.graph_file);
}

std::vector<double> load_fvals(const RunConfig& c, std::size_t states) {
  if (c.fvals.empty()) throw std::invalid_argument("--fvals is required with a graph walk");
  auto f = parse_list(c.fvals);
  if (f.size() != states) {
    throw std::invalid_argument("--fvals has " + std::to_string(f.size()) + " values, walk has " +
                                std::to_string(states) + " states");
  }
  return f;
}

// --------------------------------------------------------- subcommands

int cmd_moments(const RunConfig& c, std::ostream& out) {
  const auto a = load_weights(c);
  Emitter em(c, out);
  const auto est = c.monte_carlo ? mc_moment(a, c.p, c.samples, c.seed) : exact_moment(a, c.p, c.enum_cap);
  auto& s = em.summary();
  s["value"] = est.value;
  s["std_error"] = est.std_error;
  s["method"] = to_string(est.method);
  s["samples"] = est.samples;
  s["n"] = a.half_length();
  if (c.p == 2.0) s["second_moment_closed"] = second_moment_closed(a);
  return em.finish();
}

int cmd_spectral(const RunConfig& c, std::ostream& out) {
  Emitter em(c, out);
  std::optional<ReversibleChain> chain;
  std::optional<double> expected;
  double input = 0.0;
  if (c.walk == "transposition" || c.walk == "lumped") {
    if (c.n == 0) throw std::invalid_argument("--n is required for the " + c.walk + " walk");
    chain = c.walk == "transposition" ? build_transposition_walk(c.n) : build_lumped_walk(c.n, c.lumped_cap);
    expected = 1.0 / c.n;
    input = c.n;
  } else if (c.walk == "graph" || c.walk == "cycle") {
    const Graph g = load_graph(c);
    chain = build_graph_walk(g);
    if (c.cycle != 0 && c.graph_file.empty()) {
      expected = 1.0 - std::cos(2.0 * std::numbers::pi / c.cycle);
      input = c.cycle;
    }
  } else {
    throw std::invalid_argument("unknown walk '" + c.walk + "'");
  }
  SpectralOptions opts;
  opts.tolerance = c.tolerance;
  const auto rep = spectral_gap(*chain, opts);
  if (expected) em.point("spectral-gap", input, rep.gap, *expected, std::abs(rep.gap - *expected) <= 1e-9);
  auto& s = em.summary();
  s["walk"] = c.walk;
  s["states"] = chain->size();
  s["gap"] = rep.gap;
  s["second_eigenvalue"] = rep.second_eigenvalue;
  s["method"] = to_string(rep.method);
  s["residual"] = rep.residual;
  s["iterations"] = rep.iterations;
  return em.finish();
}

int cmd_tripnorm(const RunConfig& c, std::ostream& out) {
  Emitter em(c, out);
  if (has_graph_input(c)) {
    const auto chain = build_graph_walk(load_graph(c));
    const auto f = load_fvals(c, chain.size());
    const auto r = triple_norm_exact(chain, f);
    em.summary()["exact"] = r.value;
    em.summary()["witness"] = chain.label(r.witness);
    return em.finish();
  }
  const auto a = load_weights(c);
  const auto lumped = build_lumped_walk(a.half_length(), c.lumped_cap);
  const auto rep = triple_norm_chain_check(a, lumped);
  em.report(rep);
  auto& s = em.summary();
  s["exact_abs_witness"] = lumped.label(static_cast<std::size_t>(*rep.metric("exact_abs_witness")));
  s["exact_signed_witness"] = lumped.label(static_cast<std::size_t>(*rep.metric("exact_signed_witness")));
  return em.finish();
}

int cmd_orlicz(const RunConfig& c, std::ostream& out) {
  Emitter em(c, out);
  const auto dist = load_distribution(c);
  const auto psi = c.kind == "phi"   ? OrliczFunction::phi(c.p)
                   : c.kind == "psi" ? OrliczFunction::psi(c.alpha)
                                     : throw std::invalid_argument("--kind must be psi or phi");
  const double norm = orlicz_norm(dist, psi, c.tolerance);
  auto& s = em.summary();
  s["norm"] = norm;
  s["expected_at_norm"] = norm > 0.0 ? expected_orlicz(dist, psi, norm) : 0.0;
  if (c.kind == "psi") {
    const auto rep = check_equivalences(dist, c.alpha, c.p_max, parse_grid(c.t_grid));
    for (const auto& r : rep.relations) em.point(r.label, c.alpha, r.lhs, r.rhs, r.holds);
    auto put = [&](const char* key, const std::optional<double>& v) {
      s[key] = v ? Json(*v) : Json(nullptr);
    };
    put("K1", rep.K1);
    put("K2", rep.K2);
    put("K3", rep.K3);
    put("K3_prime", rep.K3_prime);
    put("K4", rep.K4);
    put("K4_prime", rep.K4_prime);
    s["grid_note"] = rep.grid_note;
  }
  return em.finish();
}

int cmd_tail(const RunConfig& c, std::ostream& out) {
  Emitter em(c, out);
  const auto t = parse_grid(c.t_grid);
  if (has_graph_input(c)) {
    const auto chain = build_graph_walk(load_graph(c));
    const auto f = load_fvals(c, chain.size());
    em.report(tail_bound_check(chain, f, t), "stationary_");
    return em.finish();
  }
  const auto a = load_weights(c);
  em.report(eq16_check(a, t, c.prefactor, c.enum_cap), "centred_");
  if (a.half_length() <= c.lumped_cap) {
    const auto lumped = build_lumped_walk(a.half_length(), c.lumped_cap);
    em.report(tail_bound_check(lumped, lumped_abs_values(a), t), "stationary_");
  }
  return em.finish();
}

int cmd_theorem1(const RunConfig& c, std::ostream& out) {
  Emitter em(c, out);
  const auto a = load_weights(c);
  Theorem1Options opts;
  opts.monte_carlo = c.monte_carlo;
  opts.samples = c.samples;
  opts.seed = c.seed;
  opts.cap = c.enum_cap;
  em.report(theorem1_check(a, parse_grid(c.p_grid), opts));
  em.summary()["norm"] = a.norm();
  em.summary()["method"] = c.monte_carlo ? "monte-carlo" : "exact";
  return em.finish();
}

int cmd_integral(const RunConfig& c, std::ostream& out) {
  Emitter em(c, out);
  std::optional<DiscreteDistribution> dist;
  if (!c.weights.empty() || !c.weights_file.empty()) {
    // Law of f − E f over Ω.
    auto f = signed_sum_table(load_weights(c), c.enum_cap);
    for (double& x : f) x = std::abs(x);
    const double mean = compensated_sum(f) / static_cast<double>(f.size());
    for (double& x : f) x -= mean;
    dist = empirical_distribution(f);
  } else {
    dist = load_distribution(c);
  }
  for (double p : parse_grid(c.p_grid)) em.report(moment_tail_integral_check(*dist, p));
  em.summary().erase("relative_error");
  return em.finish();
}

int cmd_gamma(const RunConfig& c, std::ostream& out) {
  Emitter em(c, out);
  em.report(gamma_bound_check(parse_grid(c.x_grid)));
  return em.finish();
}

unsigned default_enum_cap() {
  if (const char* env = std::getenv(kEnumCapEnv)) {
    const std::string s(env);
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
      throw std::invalid_argument(std::string(kEnumCapEnv) + " must be a positive integer");
    }
    return v;
  }
  return kDefaultEnumerationCap;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg.enum_cap = default_enum_cap();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  CLI::App app{"Exact and Monte Carlo verification of balanced Rademacher sum bounds", "rlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RLAB_VERSION);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--tolerance", cfg.tolerance, "Solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--enum-cap", cfg.enum_cap, "Largest half-length enumerated exactly")
        ->check(CLI::Range(1u, kMaxHalfLength));
    sub->add_option("--lumped-cap", cfg.lumped_cap, "Largest half-length for the lumped walk")
        ->check(CLI::Range(1u, kMaxHalfLength));
    sub->add_option("--n", cfg.n, "Half-length n")->check(CLI::PositiveNumber);
  };
  auto weights = [&](CLI::App* sub) {
    sub->add_option("--weights", cfg.weights, "Comma-separated coefficients a_1..a_2n");
    sub->add_option("--weights-file", cfg.weights_file, "File with one coefficient per line");
  };
  auto graph = [&](CLI::App* sub) {
    sub->add_option("--graph", cfg.graph_file, "Graph file ('V E' header, then 'u v' lines)");
    sub->add_option("--cycle", cfg.cycle, "Use the m-cycle graph")->check(CLI::Range(3u, 1u << 20));
    sub->add_option("--fvals", cfg.fvals, "Comma-separated function values on the vertices");
  };
  auto distribution = [&](CLI::App* sub) {
    sub->add_option("--dist", cfg.dist_file, "Distribution file ('value probability' lines)");
    sub->add_option("--builtin", cfg.builtin, "rademacher | two-point | uniform-5 | truncated-geometric");
  };

  auto* moments = app.add_subcommand("moments", "Exact or Monte Carlo E_S f^p");
  common(moments);
  weights(moments);
  moments->add_option("--p", cfg.p, "Moment order (>= 1)");
  moments->add_flag("--mc", cfg.monte_carlo, "Use Monte Carlo");
  moments->add_option("--samples", cfg.samples, "Monte Carlo samples");

  auto* spectral = app.add_subcommand("spectral", "Spectral gap of a reversible walk");
  common(spectral);
  graph(spectral);
  spectral->add_option("--walk", cfg.walk, "transposition | lumped | graph | cycle")
      ->check(CLI::IsMember({"transposition", "lumped", "graph", "cycle"}));

  auto* tripnorm = app.add_subcommand("tripnorm", "Triple norm: exact, surrogate and bound");
  common(tripnorm);
  weights(tripnorm);
  graph(tripnorm);

  auto* orlicz = app.add_subcommand("orlicz", "Orlicz norm and equivalence constants");
  common(orlicz);
  distribution(orlicz);
  orlicz->add_option("--kind", cfg.kind, "psi | phi")->check(CLI::IsMember({"psi", "phi"}));
  orlicz->add_option("--alpha", cfg.alpha, "psi_alpha exponent (>= 1)");
  orlicz->add_option("--p", cfg.p, "phi_p exponent (>= 1)");
  orlicz->add_option("--p-max", cfg.p_max, "Largest moment order on the K2 grid");
  orlicz->add_option("--t-grid", cfg.t_grid, "Tail grid for K3");

  auto* tail = app.add_subcommand("tail", "Concentration tail bounds");
  common(tail);
  weights(tail);
  graph(tail);
  tail->add_option("--t-grid", cfg.t_grid, "Deviation grid start:stop:step or list");
  tail->add_option("--prefactor", cfg.prefactor, "Prefactor of the balanced-ensemble tail bound")
      ->check(CLI::PositiveNumber);

  auto* theorem1 = app.add_subcommand("theorem1", "Moment bound (E f^p)^(1/p) <= E|f| + 24 p |a|_2");
  common(theorem1);
  weights(theorem1);
  theorem1->add_option("--p-grid", cfg.p_grid, "Moment orders start:stop:step or list");
  theorem1->add_flag("--mc", cfg.monte_carlo, "Use Monte Carlo");
  theorem1->add_option("--samples", cfg.samples, "Monte Carlo samples");

  auto* integral = app.add_subcommand("integral", "Moment / tail-integral identity");
  common(integral);
  weights(integral);
  distribution(integral);
  auto* integral_grid = integral->add_option("--p-grid", cfg.p_grid, "Moment orders (default 1,2,3,4,7.5)");

  auto* gamma = app.add_subcommand("gamma", "Gamma(x) <= x^(x-1) on a grid");
  common(gamma);
  gamma->add_option("--x-grid", cfg.x_grid, "Grid of x >= 1");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kAllHold;
  } catch (const CLI::CallForVersion&) {
    out << RLAB_VERSION << '\n';
    return kAllHold;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  const auto* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  if (sub == integral && integral_grid->count() == 0) cfg.p_grid = "1,2,3,4,7.5";
  try {
    if (sub == moments) return cmd_moments(cfg, out);
    if (sub == spectral) return cmd_spectral(cfg, out);
    if (sub == tripnorm) return cmd_tripnorm(cfg, out);
    if (sub == orlicz) return cmd_orlicz(cfg, out);
    if (sub == tail) return cmd_tail(cfg, out);
    if (sub == theorem1) return cmd_theorem1(cfg, out);
    if (sub == integral) return cmd_integral(cfg, out);
    return cmd_gamma(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace rlab::cli
