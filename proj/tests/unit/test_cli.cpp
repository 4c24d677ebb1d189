#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "experiments.hpp"

namespace {

using namespace mvsde::cli;
namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mvsde_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

TEST(Config, ParsesKeyValueLines) {
  const auto c = Config::parse("# comment\nmodel.sigma = 0.2  # trailing\n\n method.K_list = 1-3,7\nname = \"a b\"\n");
  EXPECT_DOUBLE_EQ(c.get_double("model.sigma", 0.0), 0.2);
  EXPECT_EQ(c.get_int_list("method.K_list", {}), (std::vector<int>{1, 2, 3, 7}));
  EXPECT_EQ(c.get_string("name", ""), "a b");
  EXPECT_EQ(c.get_int("missing", 4), 4);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(Config::parse("just text\n"), ConfigError);
  EXPECT_THROW(Config::parse("= 3\n"), ConfigError);
  const auto c = Config::parse("a = x1\nb = 5-2\nc = 1.5\n");
  EXPECT_THROW(c.get_double("a", 0.0), ConfigError);
  EXPECT_THROW(c.get_int_list("b", {}), ConfigError);
  EXPECT_THROW(c.get_int("c", 0), ConfigError);
  EXPECT_THROW(c.check_known({"a", "b"}), ConfigError);
  EXPECT_THROW(Config::load("/nonexistent/file.cfg"), ConfigError);
}

TEST(Config, IntegersAcceptExponentForm) {
  EXPECT_EQ(parse_int("N", "1e5"), 100000);
  EXPECT_EQ(parse_int("N", "42"), 42);
  EXPECT_EQ(parse_seed("18446744073709551615"), 18446744073709551615ull);
  EXPECT_THROW(parse_seed("-1"), ConfigError);
}

TEST(Experiment, ValidatesFields) {
  EXPECT_THROW(experiment_from(Config::parse("method.L = 3\nmethod.h = 0.1\n")), ConfigError);
  EXPECT_THROW(experiment_from(Config::parse("method.eps = 0.5\n")), ConfigError);
  EXPECT_THROW(experiment_from(Config::parse("model.kernel = other\n")), ConfigError);
  EXPECT_THROW(experiment_from(Config::parse("unknown.key = 1\n")), ConfigError);
  EXPECT_THROW(experiment_from(Config::parse("method.methods = ppm,foo\n")), ConfigError);
  const auto e = experiment_from(Config::parse("method.N = 1e3\nmodel.init = gaussian\nrun.seed = 9\n"));
  EXPECT_EQ(e.N.value(), 1000u);
  EXPECT_EQ(require_seed(e), 9u);
  EXPECT_THROW(require_seed(experiment_from(Config{})), ConfigError);
  EXPECT_THROW(particle_grid(experiment_from(Config::parse("method.h = 0.3\n"))), ConfigError);
  EXPECT_EQ(particle_grid(experiment_from(Config::parse("method.L = 4\n"))).num_steps(), 16);
}

TEST(Experiment, CustomKernelUsesQuadrature) {
  auto e = experiment_from(Config::parse("model.kernel = custom\n"));
  EXPECT_EQ(make_projected(e, 5).provenance, mvsde::Provenance::quadrature);
  e = experiment_from(Config{});
  EXPECT_EQ(make_projected(e, 5).provenance, mvsde::Provenance::closed_form);
}

TEST(Csv, ShortestRoundTripFormatting) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, WritesHeaderAndRows) {
  const auto dir = scratch_dir("csv");
  CsvWriter w((dir / "t.csv").string(), {"a", "b", "c"});
  w.row({std::string("x"), 1.5, 3LL});
  EXPECT_THROW(w.row({1.0}), std::logic_error);
  w.close();
  EXPECT_EQ(slurp(dir / "t.csv"), "a,b,c\nx,1.5,3\n");
}

TEST(Cli, ExitCodesForBadInput) {
  const auto dir = scratch_dir("codes");
  EXPECT_EQ(run({}), kConfigError);
  EXPECT_EQ(run({"nosuch"}), kConfigError);
  EXPECT_EQ(run({"ppm", "--out-dir", dir.string()}), kConfigError);
  EXPECT_EQ(run({"ppm", "--seed", "1", "--L", "3", "--h", "0.1", "--out-dir", dir.string()}), kConfigError);
  EXPECT_EQ(run({"ppm", "--seed", "1", "--config", "/nonexistent.cfg"}), kConfigError);
  EXPECT_EQ(run({"picard", "--seed", "1", "--eps", "0.9", "--out-dir", dir.string()}), kConfigError);
  EXPECT_EQ(run({"ppm", "--help"}), kSuccess);
}

TEST(Cli, NumericalFailureExitCode) {
  const auto dir = scratch_dir("blowup");
  std::string err;
  EXPECT_EQ(run({"chaos", "--seed", "1", "--kernel-scale", "1e308", "--T", "10", "--N", "4", "--out-dir",
                 dir.string()},
                nullptr, &err),
            kNumericalFailure);
  EXPECT_NE(err.find("numerical"), std::string::npos);
}

TEST(Cli, ChaosWithoutNoiseIsDeterministicOde) {
  const auto dir = scratch_dir("ode");
  ASSERT_EQ(run({"chaos", "--N", "1", "--sigma", "0", "--seed", "1", "--out-dir", dir.string()}), kSuccess);
  const auto rows = lines(slurp(dir / "summary.csv"));
  ASSERT_EQ(rows.size(), 102u);
  EXPECT_EQ(rows.front(), "t_index,t,mean,variance");
  const auto last = rows.back();
  EXPECT_EQ(last.rfind("100,1,", 0), 0u);
  EXPECT_NEAR(std::stod(last.substr(6, last.find(',', 6) - 6)), 1.5, 1e-12);
  for (const char* f : {"gamma.csv", "density.csv", "cost.csv"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(Cli, RerunGivesIdenticalFiles) {
  const auto a = scratch_dir("rerun_a");
  const auto b = scratch_dir("rerun_b");
  const std::vector<std::string> base{"ppm", "--N", "300", "--K", "6", "--seed", "4", "--out-dir"};
  auto args = base;
  args.push_back(a.string());
  ASSERT_EQ(run(args), kSuccess);
  args = base;
  args.push_back(b.string());
  args.insert(args.end(), {"--threads", "3"});
  ASSERT_EQ(run(args), kSuccess);
  for (const char* f : {"gamma.csv", "density.csv", "summary.csv", "cost.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Cli, SeedPrecedence) {
  const auto dir = scratch_dir("seed");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "run.seed = 3\nmethod.N = 50\nmethod.K = 3\n";
  }
  const auto a = dir / "a";
  const auto b = dir / "b";
  ASSERT_EQ(run({"ppm", "--config", (dir / "run.cfg").string(), "--out-dir", a.string()}), kSuccess);
  ASSERT_EQ(run({"ppm", "--config", (dir / "run.cfg").string(), "--seed", "4", "--out-dir", b.string()}), kSuccess);
  EXPECT_NE(slurp(a / "gamma.csv"), slurp(b / "gamma.csv"));
}

TEST(Cli, StrongErrorDeduplicatesAndWarns) {
  const auto dir = scratch_dir("strong");
  std::string out, err;
  ASSERT_EQ(run({"strong-error", "--K-range", "2,2,4", "--N", "60", "--seed", "1", "--out-dir", dir.string()}, &out,
                &err),
            kSuccess);
  EXPECT_NE(err.find("duplicate"), std::string::npos);
  const auto rows = lines(slurp(dir / "strong_error.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "K,E_NK,cost_gain");
  EXPECT_EQ(rows[1].substr(0, 2), "2,");
  EXPECT_EQ(rows[2].substr(0, 2), "4,");

  ASSERT_EQ(run({"strong-error", "--K-range", "3", "--N", "60", "--seed", "1", "--out-dir", dir.string()}, &out, &err),
            kSuccess);
  EXPECT_NE(err.find("no fit"), std::string::npos);
  EXPECT_EQ(lines(slurp(dir / "strong_error.csv")).size(), 2u);
}

TEST(Cli, PicardWritesTablesAndEstimate) {
  const auto dir = scratch_dir("picard");
  std::string out;
  ASSERT_EQ(run({"picard", "--eps", "0.1", "--seed", "2", "--out-dir", dir.string()}, &out), kSuccess);
  EXPECT_NE(out.find("M_T(P)"), std::string::npos);
  const auto est = lines(slurp(dir / "estimate.csv"));
  ASSERT_EQ(est.size(), 2u);
  EXPECT_EQ(est[0], "epsilon,K,L,picard_steps,estimate,standard_error,total_cost");
  EXPECT_EQ(lines(slurp(dir / "gamma.csv"))[0], "picard_step,k,t_index,t,value");
  EXPECT_TRUE(fs::exists(dir / "picard.csv"));
}

}  // namespace
