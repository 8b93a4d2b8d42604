#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "rlab/concentration.hpp"
#include "rlab/ensemble.hpp"
#include "rlab/errors.hpp"
#include "rlab/lipschitz.hpp"
#include "rlab/orlicz.hpp"
#include "rlab/walk.hpp"

namespace py = pybind11;
using namespace rlab;

namespace {

using Weights = std::vector<double>;

DiscreteDistribution make_distribution(const std::vector<std::pair<double, double>>& atoms) {
  std::vector<DiscreteDistribution::Atom> out;
  out.reserve(atoms.size());
  for (const auto& [v, p] : atoms) out.push_back({v, p});
  return DiscreteDistribution(std::move(out));
}

OrliczFunction make_orlicz(const std::string& kind, double parameter) {
  if (kind == "psi") return OrliczFunction::psi(parameter);
  if (kind == "phi") return OrliczFunction::phi(parameter);
  throw std::invalid_argument("kind must be 'psi' or 'phi', got '" + kind + "'");
}

py::dict metrics_dict(const CheckReport& r) {
  py::dict d;
  for (const auto& [k, v] : r.metrics()) d[py::str(k)] = v;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact and Monte Carlo checks for balanced Rademacher sums";
  m.attr("__version__") = RLAB_VERSION;
  m.attr("DEFAULT_ENUMERATION_CAP") = kDefaultEnumerationCap;

  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<MomentEstimate>(m, "MomentEstimate")
      .def_readonly("value", &MomentEstimate::value)
      .def_readonly("std_error", &MomentEstimate::std_error)
      .def_readonly("samples", &MomentEstimate::samples)
      .def_property_readonly("method", [](const MomentEstimate& e) { return std::string(to_string(e.method)); })
      .def("__repr__", [](const MomentEstimate& e) {
        return "MomentEstimate(value=" + std::to_string(e.value) + ", std_error=" + std::to_string(e.std_error) +
               ", method='" + to_string(e.method) + "')";
      });

  py::class_<CheckPoint>(m, "CheckPoint")
      .def_readonly("input", &CheckPoint::input)
      .def_readonly("lhs", &CheckPoint::lhs)
      .def_readonly("rhs", &CheckPoint::rhs)
      .def_readonly("holds", &CheckPoint::holds)
      .def_property_readonly("margin", [](const CheckPoint& p) { return p.rhs - p.lhs; });

  py::class_<CheckReport>(m, "CheckReport")
      .def_property_readonly("name", &CheckReport::name)
      .def_property_readonly("points", &CheckReport::points)
      .def_property_readonly("all_hold", &CheckReport::all_hold)
      .def_property_readonly("worst_margin", &CheckReport::worst_margin)
      .def_property_readonly("metrics", &metrics_dict);

  py::class_<SpectralReport>(m, "SpectralReport")
      .def_readonly("gap", &SpectralReport::gap)
      .def_readonly("second_eigenvalue", &SpectralReport::second_eigenvalue)
      .def_readonly("residual", &SpectralReport::residual)
      .def_readonly("iterations", &SpectralReport::iterations)
      .def_readonly("eigenvalues", &SpectralReport::eigenvalues)
      .def_property_readonly("method", [](const SpectralReport& r) { return std::string(to_string(r.method)); });

  py::class_<ReversibleChain>(m, "Chain")
      .def("__len__", &ReversibleChain::size)
      .def_property_readonly("stationary",
                             [](const ReversibleChain& c) {
                               return std::vector<double>(c.stationary().begin(), c.stationary().end());
                             })
      .def("transition", &ReversibleChain::transition, py::arg("x"), py::arg("y"))
      .def("label", &ReversibleChain::label, py::arg("x"))
      .def_property_readonly("detailed_balance_defect", &ReversibleChain::detailed_balance_defect);

  py::class_<DiscreteDistribution>(m, "Distribution")
      .def(py::init(&make_distribution), py::arg("atoms"), "Atoms as (value, probability) pairs.")
      .def_static("uniform", &DiscreteDistribution::uniform, py::arg("values"))
      .def_static("point_mass", &DiscreteDistribution::point_mass, py::arg("value"))
      .def_static("rademacher", &DiscreteDistribution::rademacher)
      .def_static("read_file", &DiscreteDistribution::read_file, py::arg("path"))
      .def_property_readonly("atoms",
                             [](const DiscreteDistribution& d) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& a : d.atoms()) out.emplace_back(a.value, a.prob);
                               return out;
                             })
      .def_property_readonly("mean", &DiscreteDistribution::mean);

  py::class_<RelationCheck>(m, "RelationCheck")
      .def_readonly("label", &RelationCheck::label)
      .def_readonly("lhs", &RelationCheck::lhs)
      .def_readonly("rhs", &RelationCheck::rhs)
      .def_readonly("holds", &RelationCheck::holds)
      .def_readonly("margin", &RelationCheck::margin);

  py::class_<EquivalenceReport>(m, "EquivalenceReport")
      .def_readonly("alpha", &EquivalenceReport::alpha)
      .def_readonly("K1", &EquivalenceReport::K1)
      .def_readonly("K2", &EquivalenceReport::K2)
      .def_readonly("K3", &EquivalenceReport::K3)
      .def_readonly("K3_prime", &EquivalenceReport::K3_prime)
      .def_readonly("K4", &EquivalenceReport::K4)
      .def_readonly("K4_prime", &EquivalenceReport::K4_prime)
      .def_readonly("relations", &EquivalenceReport::relations)
      .def_readonly("grid_note", &EquivalenceReport::grid_note)
      .def_property_readonly("all_hold", &EquivalenceReport::all_hold);

  // Ensemble.
  m.def(
      "exact_moment",
      [](const Weights& a, double p, unsigned cap) { return exact_moment(WeightVector(a), p, cap); },
      py::arg("a"), py::arg("p"), py::arg("cap") = kDefaultEnumerationCap,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "mc_moment",
      [](const Weights& a, double p, std::uint64_t samples, std::uint64_t seed) {
        return mc_moment(WeightVector(a), p, samples, seed);
      },
      py::arg("a"), py::arg("p"), py::arg("samples"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "second_moment_closed", [](const Weights& a) { return second_moment_closed(WeightVector(a)); }, py::arg("a"));
  m.def(
      "signed_sum_table", [](const Weights& a, unsigned cap) { return signed_sum_table(WeightVector(a), cap); },
      py::arg("a"), py::arg("cap") = kDefaultEnumerationCap);
  m.def(
      "pair_correlation",
      [](unsigned n, unsigned i, unsigned j) {
        const auto r = pair_correlation_exact(n, i, j);
        return std::make_pair(static_cast<long long>(r.num), static_cast<long long>(r.den));
      },
      py::arg("n"), py::arg("i") = 0, py::arg("j") = 1, "Exact E[e_i e_j] as (numerator, denominator).");

  // Walks.
  m.def("transposition_walk", [](unsigned n) { return build_transposition_walk(n); }, py::arg("n"));
  m.def("lumped_walk", [](unsigned n) { return build_lumped_walk(n); }, py::arg("n"));
  m.def("cycle_walk", [](unsigned m_) { return build_graph_walk(Graph::cycle(m_)); }, py::arg("m"));
  m.def(
      "graph_walk",
      [](unsigned vertices, std::vector<std::pair<unsigned, unsigned>> edges) {
        return build_graph_walk(Graph(vertices, std::move(edges)));
      },
      py::arg("vertices"), py::arg("edges"));
  m.def(
      "spectral_gap",
      [](const ReversibleChain& c, double tolerance) {
        SpectralOptions opts;
        opts.tolerance = tolerance;
        return spectral_gap(c, opts);
      },
      py::arg("chain"), py::arg("tolerance") = 1e-10, py::call_guard<py::gil_scoped_release>());

  // Lipschitz.
  m.def(
      "triple_norm_exact",
      [](const ReversibleChain& c, const std::vector<double>& f) { return triple_norm_exact(c, f).value; },
      py::arg("chain"), py::arg("fvals"));
  m.def(
      "triple_norm_surrogate", [](const Weights& a) { return triple_norm_surrogate(WeightVector(a)); }, py::arg("a"));
  m.def("bound_18", [](const Weights& a) { return bound_18(WeightVector(a)); }, py::arg("a"));
  m.def(
      "triple_norm_chain_check", [](const Weights& a) { return triple_norm_chain_check(WeightVector(a)); },
      py::arg("a"));

  // Orlicz.
  m.def(
      "orlicz_norm",
      [](const DiscreteDistribution& d, const std::string& kind, double parameter) {
        return orlicz_norm(d, make_orlicz(kind, parameter));
      },
      py::arg("dist"), py::arg("kind") = "psi", py::arg("parameter") = 2.0);
  m.def(
      "check_equivalences",
      [](const DiscreteDistribution& d, double alpha, double p_max, const std::vector<double>& t_grid) {
        return check_equivalences(d, alpha, p_max, t_grid);
      },
      py::arg("dist"), py::arg("alpha"), py::arg("p_max"), py::arg("t_grid"));
  m.def("standard_distribution_suite", &standard_distribution_suite);

  // Concentration.
  m.def(
      "theorem1_check",
      [](const Weights& a, const std::vector<double>& p_grid, bool mc, std::uint64_t samples, std::uint64_t seed) {
        Theorem1Options opts;
        opts.monte_carlo = mc;
        opts.samples = samples;
        opts.seed = seed;
        return theorem1_check(WeightVector(a), p_grid, opts);
      },
      py::arg("a"), py::arg("p_grid"), py::arg("monte_carlo") = false, py::arg("samples") = 100'000,
      py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());
  m.def(
      "eq16_check",
      [](const Weights& a, const std::vector<double>& t_grid, double prefactor) {
        return eq16_check(WeightVector(a), t_grid, prefactor);
      },
      py::arg("a"), py::arg("t_grid"), py::arg("prefactor") = 3.0);
  m.def(
      "tail_bound_check",
      [](const ReversibleChain& c, const std::vector<double>& f, const std::vector<double>& t_grid) {
        return tail_bound_check(c, f, t_grid);
      },
      py::arg("chain"), py::arg("fvals"), py::arg("t_grid"));
  m.def("moment_tail_integral_check", &moment_tail_integral_check, py::arg("dist"), py::arg("p"));
  m.def("log_gamma", &log_gamma, py::arg("x"));
  m.def(
      "gamma_bound_check", [](const std::vector<double>& xs) { return gamma_bound_check(xs); }, py::arg("x_grid"));
}
