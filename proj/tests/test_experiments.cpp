#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stathedge/experiments.hpp"
#include "stathedge/quadrature.hpp"
#include "test_util.hpp"

using namespace stathedge;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("stathedge_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d.string();
}

config::ExperimentConfig example(const std::string& file) {
  return config::parse_file(std::string(STATHEDGE_CONFIG_DIR) + "/" + file);
}

}  // namespace

TEST(Experiments, ResolveConstraint) {
  auto cfg = experiments::fig1_config(0.7);
  EXPECT_FALSE(experiments::resolve_constraint(cfg, 0.3));
  cfg.cost_fraction = 0.5;
  EXPECT_DOUBLE_EQ(experiments::resolve_constraint(cfg, 0.3)->C, 0.15);
  cfg.cost_fraction.reset();
  cfg.cost_cap = 0.01;
  EXPECT_DOUBLE_EQ(experiments::resolve_constraint(cfg, 0.3)->C, 0.01);
}

TEST(Experiments, DiscreteOutputsAreDeterministic) {
  const auto cfg = example("fig2_correlated_discrete.toml");
  experiments::Context a{fresh_dir("det_a"), 11, 0}, b{fresh_dir("det_b"), 11, 1};
  const auto ra = experiments::hedge_discrete(cfg, a);
  const auto rb = experiments::hedge_discrete(cfg, b);
  EXPECT_TRUE(ra.ok());
  ASSERT_EQ(ra.files.size(), 3u);
  for (std::size_t i = 0; i < ra.files.size(); ++i) {
    const auto x = slurp(ra.files[i]);
    EXPECT_FALSE(x.empty());
    EXPECT_EQ(x, slurp(rb.files[i])) << ra.files[i];
    EXPECT_EQ(x.find('\r'), std::string::npos);
  }
  EXPECT_NE(slurp(ra.files[0]).find("# lambda="), std::string::npos);
}

TEST(Experiments, ContinuousConstrainedRun) {
  const auto cfg = example("fig1_correlated_continuous.toml");
  const auto r = experiments::hedge_continuous(cfg, {fresh_dir("cont"), 11, 0});
  EXPECT_TRUE(r.ok());
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_EQ(r.checks[0].name, "constrained-cost");
  for (const auto& f : r.files) EXPECT_TRUE(fs::exists(f)) << f;
  const auto text = slurp(r.files[0]);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5 + 1 + 401);
}

TEST(Experiments, ProfileGrid) {
  const auto cfg = example("quadratic_gbm.toml");
  const auto r = experiments::profile(cfg, {fresh_dir("prof"), 1, 0});
  ASSERT_EQ(r.files.size(), 1u);
  std::ifstream in(r.files[0]);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "S_T,Phi");
  int rows = 0;
  double worst = 0.0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double s = std::stod(line.substr(0, comma)), phi = std::stod(line.substr(comma + 1));
    worst = std::max(worst, std::abs(phi - (s - 1) * (s - 1)));
    ++rows;
  }
  EXPECT_EQ(rows, 201);
  EXPECT_LT(worst, 1e-4);
}

TEST(Experiments, ValidateFigureTwo) {
  testutil::use_all_cores();
  const auto cfg = example("fig2_correlated_discrete.toml");
  const auto r = experiments::validate(cfg, {fresh_dir("val"), cfg.seed, 0});
  EXPECT_GE(r.checks.size(), 4u);
  for (const auto& c : r.checks) EXPECT_TRUE(c.ok) << c.name << ": " << c.detail;
}

TEST(Experiments, InverseLetfProfileDecreasesBelowStrike) {
  const auto run = experiments::run_discrete(experiments::fig3_config(-3.0));
  const auto s = quad::linspace(0.8, 1.2, 81);
  const auto phi = hedge::portfolio_profile(run.portfolio, 1.0, s);
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] <= 1.0) EXPECT_LE(phi[i], phi[i - 1]) << s[i];
    else EXPECT_LT(std::abs(phi[i]), 0.05) << s[i];
  }
  EXPECT_GT(phi.front(), 0.5);
}

TEST(Experiments, ReportOk) {
  experiments::Report r;
  EXPECT_TRUE(r.ok());
  r.checks.push_back({"x", false, ""});
  EXPECT_FALSE(r.ok());
}
