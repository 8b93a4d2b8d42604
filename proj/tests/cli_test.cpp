#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rlab/cli.hpp"

namespace rlab::cli {
namespace {

using Json = nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<Json> records(const std::string& text) {
  std::vector<Json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(Json::parse(line));
  return out;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

TEST(Grid, RangeAndList) {
  EXPECT_EQ(parse_grid("1:2:0.5"), (std::vector<double>{1.0, 1.5, 2.0}));
  EXPECT_EQ(parse_grid("0.25:3:0.25").size(), 12u);
  EXPECT_EQ(parse_grid("2:20:1").size(), 19u);
  EXPECT_EQ(parse_grid("1:50:0.1").size(), 491u);
  EXPECT_EQ(parse_grid("1,2,3,4,7.5"), (std::vector<double>{1, 2, 3, 4, 7.5}));
  EXPECT_EQ(parse_grid("5"), std::vector<double>{5});
}

TEST(Grid, Rejects) {
  for (const char* bad : {"", "1:2", "1:2:0", "2:1:1", "3,2", "1,1", "1,,2", "a:b:c", "1:2:3:4", "nan"}) {
    EXPECT_THROW(parse_grid(bad), std::invalid_argument) << bad;
  }
}

TEST(ValuesFile, SkipsCommentsAndBlanks) {
  const auto p = temp_file("rlab_values.txt", "# weights\n1\n\n  -2.5 \n3\n");
  EXPECT_EQ(read_values_file(p.string()), (std::vector<double>{1, -2.5, 3}));
  const auto bad = temp_file("rlab_values_bad.txt", "1\nx\n");
  EXPECT_THROW(read_values_file(bad.string()), std::invalid_argument);
  EXPECT_THROW(read_values_file("/nonexistent/rlab"), std::runtime_error);
}

TEST(Run, Theorem1Example) {
  const auto r = invoke({"theorem1", "--n", "2", "--weights", "1,1,0,0", "--p-grid", "2:20:1"});
  EXPECT_EQ(r.code, kAllHold) << r.err;
  const auto recs = records(r.out);
  ASSERT_EQ(recs.size(), 20u);
  for (std::size_t k = 0; k < 19; ++k) {
    EXPECT_EQ(recs[k]["record"], "point");
    EXPECT_EQ(recs[k]["name"], "theorem1");
    EXPECT_TRUE(recs[k]["holds"].get<bool>());
    EXPECT_EQ(recs[k]["input"].get<double>(), 2.0 + k);
    for (const char* key : {"lhs", "rhs", "margin", "tool_version", "subcommand", "seed", "config"}) {
      EXPECT_TRUE(recs[k].contains(key)) << key;
    }
  }
  EXPECT_EQ(recs.back()["record"], "summary");
  EXPECT_TRUE(recs.back()["all_hold"].get<bool>());
}

TEST(Run, SpectralExample) {
  const auto r = invoke({"spectral", "--walk", "transposition", "--n", "2"});
  EXPECT_EQ(r.code, kAllHold) << r.err;
  const auto s = records(r.out).back();
  EXPECT_NEAR(s["gap"].get<double>(), 0.5, 1e-9);
  EXPECT_EQ(s["states"], 24);
  EXPECT_EQ(s["method"], "dense-full");
}

TEST(Run, MomentsExample) {
  const auto r = invoke({"moments", "--n", "2", "--weights", "1,1,1,1", "--p", "2"});
  EXPECT_EQ(r.code, kAllHold) << r.err;
  const auto s = records(r.out).back();
  EXPECT_EQ(s["value"].get<double>(), 0.0);
  EXPECT_EQ(s["method"], "exact");
}

TEST(Run, MomentsMonteCarlo) {
  const auto r = invoke({"moments", "--weights", "1,1,0,0", "--mc", "--samples", "50000", "--seed", "9"});
  EXPECT_EQ(r.code, kAllHold) << r.err;
  const auto s = records(r.out).back();
  EXPECT_EQ(s["method"], "monte-carlo");
  EXPECT_EQ(s["seed"], 9);
  EXPECT_LE(std::abs(s["value"].get<double>() - 4.0 / 3.0), 4.0 * s["std_error"].get<double>());
}

TEST(Run, WeightsFile) {
  const auto p = temp_file("rlab_weights.txt", "1\n1\n0\n0\n");
  const auto r = invoke({"moments", "--weights-file", p.string()});
  EXPECT_EQ(r.code, kAllHold) << r.err;
  EXPECT_NEAR(records(r.out).back()["value"].get<double>(), 4.0 / 3.0, 1e-15);
}

TEST(Run, EverySubcommandSucceeds) {
  const std::vector<std::vector<std::string>> cases = {
      {"spectral", "--walk", "lumped", "--n", "4"},
      {"spectral", "--walk", "cycle", "--cycle", "9"},
      {"tripnorm", "--weights", "0.3,-0.1,0.7,0.2,0.5,-0.4"},
      {"tripnorm", "--cycle", "4", "--fvals", "1,0,0,0"},
      {"orlicz", "--builtin", "uniform-5", "--alpha", "2"},
      {"orlicz", "--builtin", "rademacher", "--kind", "phi", "--p", "3"},
      {"tail", "--weights", "0.3,-0.1,0.7,0.2,0.5,-0.4"},
      {"tail", "--cycle", "6", "--fvals", "1,0,0,0,0,0", "--t-grid", "0.1:1:0.1"},
      {"integral", "--builtin", "truncated-geometric"},
      {"integral", "--weights", "1,1,0,0"},
      {"gamma"},
  };
  for (const auto& args : cases) {
    const auto r = invoke(args);
    EXPECT_EQ(r.code, kAllHold) << args[0] << ": " << r.err;
    EXPECT_TRUE(records(r.out).back()["all_hold"].get<bool>());
  }
}

TEST(Run, IntegralDefaultGrid) {
  const auto r = invoke({"integral", "--builtin", "rademacher"});
  const auto recs = records(r.out);
  ASSERT_EQ(recs.size(), 6u);
  EXPECT_EQ(recs[4]["input"].get<double>(), 7.5);
  EXPECT_EQ(recs.back()["config"]["p_grid"], "1,2,3,4,7.5");
}

TEST(Run, GraphAndDistributionFiles) {
  const auto g = temp_file("rlab_graph.txt", "4 4\n0 1\n1 2\n2 3\n3 0\n");
  const auto r = invoke({"spectral", "--walk", "graph", "--graph", g.string()});
  EXPECT_EQ(r.code, kAllHold) << r.err;
  EXPECT_NEAR(records(r.out).back()["gap"].get<double>(), 1.0, 1e-12);

  const auto d = temp_file("rlab_dist.txt", "# rademacher\n-1 0.5\n1 0.5\n");
  const auto o = invoke({"orlicz", "--dist", d.string(), "--alpha", "2"});
  EXPECT_EQ(o.code, kAllHold) << o.err;
  EXPECT_NEAR(records(o.out).back()["norm"].get<double>(), 1.0 / std::sqrt(std::log(2.0)), 1e-8);
}

TEST(Run, ViolationExitsOne) {
  const auto r = invoke({"tail", "--weights", "1,1,0,0", "--prefactor", "0.01", "--t-grid", "0.5"});
  EXPECT_EQ(r.code, kViolation);
  const auto s = records(r.out).back();
  EXPECT_FALSE(s["all_hold"].get<bool>());
  EXPECT_GE(s["violations"].get<int>(), 1);
}

TEST(Run, UsageErrorsExitTwo) {
  const std::vector<std::vector<std::string>> cases = {
      {},
      {"nonsense"},
      {"moments"},
      {"moments", "--weights", "1,2,3"},
      {"moments", "--weights", "1,1", "--weights-file", "x"},
      {"moments", "--weights", "1,1,0,0", "--n", "3"},
      {"theorem1", "--weights", "1,1,0,0", "--p-grid", "3:2:1"},
      {"theorem1", "--weights", "1,1,1,1,1,1", "--enum-cap", "2"},
      {"spectral", "--walk", "transposition", "--n", "5"},
      {"orlicz", "--builtin", "cauchy"},
      {"tripnorm", "--cycle", "4", "--fvals", "1,0"},
      {"moments", "--weights-file", "/nonexistent/rlab"},
      {"gamma", "--format", "xml"},
  };
  for (const auto& args : cases) {
    const auto r = invoke(args);
    EXPECT_EQ(r.code, kUsageError) << (args.empty() ? "<none>" : args[0]);
    EXPECT_FALSE(r.err.empty());
  }
}

TEST(Run, EnvironmentCap) {
  ::setenv(kEnumCapEnv, "2", 1);
  const auto capped = invoke({"moments", "--weights", "1,2,3,4,5,6"});
  ::setenv(kEnumCapEnv, "bogus", 1);
  const auto bogus = invoke({"moments", "--weights", "1,2,3,4"});
  ::unsetenv(kEnumCapEnv);
  EXPECT_EQ(capped.code, kUsageError);
  EXPECT_NE(capped.err.find("cap = 2"), std::string::npos);
  EXPECT_EQ(bogus.code, kUsageError);
  EXPECT_EQ(invoke({"moments", "--weights", "1,2,3,4,5,6"}).code, kAllHold);
}

TEST(Run, RerunsAreByteIdentical) {
  const std::vector<std::string> args = {"theorem1", "--weights", "0.2,0.5,-0.3,0.1", "--mc", "--samples", "5000",
                                         "--seed", "17"};
  EXPECT_EQ(invoke(args).out, invoke(args).out);
}

TEST(Run, CsvAndJsonCarrySameNumbers) {
  const std::vector<std::string> base = {"tail", "--weights", "0.3,-0.1,0.7,0.2"};
  auto json_args = base;
  auto csv_args = base;
  csv_args.insert(csv_args.end(), {"--format", "csv"});
  const auto js = records(invoke(json_args).out);
  const auto csv = invoke(csv_args).out;

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# rlab ", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "name,input,lhs,rhs,holds,margin");
  for (std::size_t k = 0; k + 1 < js.size(); ++k) {
    ASSERT_TRUE(std::getline(in, line));
    const auto& p = js[k];
    const std::string expected = p["name"].get<std::string>() + "," + p["input"].dump() + "," + p["lhs"].dump() +
                                 "," + p["rhs"].dump() + "," + p["holds"].dump() + "," + p["margin"].dump();
    EXPECT_EQ(line, expected);
  }
  std::getline(in, line);
  EXPECT_EQ(line, "# summary");
}

TEST(Run, HelpAndVersion) {
  const auto h = invoke({"--help"});
  EXPECT_EQ(h.code, kAllHold);
  EXPECT_NE(h.out.find("theorem1"), std::string::npos);
  const auto v = invoke({"--version"});
  EXPECT_EQ(v.code, kAllHold);
  EXPECT_EQ(v.out, std::string(RLAB_VERSION) + "\n");
}

}  // namespace
}  // namespace rlab::cli
