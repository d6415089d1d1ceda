#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "geosensor/count_glm.hpp"
#include "geosensor/error.hpp"
#include "geosensor/io.hpp"
#include "test_support.hpp"

using namespace geosensor;

namespace {

std::vector<RegionPanel> tb_world_panel() {
  return parse_panel_csv(testing_support::slurp(testing_support::source_dir() / "tests/data/tb_world_panel.csv"));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Stars, Thresholds) {
  EXPECT_EQ(significance_stars(0.0), "***");
  EXPECT_EQ(significance_stars(0.000999), "***");
  EXPECT_EQ(significance_stars(0.001), "**");
  EXPECT_EQ(significance_stars(0.00999), "**");
  EXPECT_EQ(significance_stars(0.01), "*");
  EXPECT_EQ(significance_stars(0.0499), "*");
  EXPECT_EQ(significance_stars(0.05), "");
  EXPECT_EQ(significance_stars(0.9), "");
}

TEST(Format, Coefficients) {
  EXPECT_EQ(format_coefficient(2.63e-07), "2.63e-07");
  EXPECT_EQ(format_coefficient(2.6349e-07), "2.63e-07");
  EXPECT_EQ(format_coefficient(-0.0123), "-1.23e-02");
  EXPECT_EQ(format_coefficient(1.5), "1.50e+00");
  EXPECT_EQ(format_sample_size(126, RegionKind::Country), "n=126 countries");
  EXPECT_EQ(format_sample_size(44, RegionKind::UsState), "n=44 US states");
}

// Reference values from statsmodels GLM(Poisson) on the same panel
// (tests/oracle/statsmodels_freeze.py), frozen here.
TEST(FitPanel, MatchesFrozenReference) {
  PanelModel m = fit_panel(tb_world_panel(), RegionKind::Country);
  const GlmFit& f = m.fit;
  ASSERT_TRUE(f.converged);
  EXPECT_EQ(f.n, 10);
  const double beta[] = {1.8551447416436193, 3.8323766182477888e-05, 0.0024499004640449705};
  const double se[] = {0.1679426697415429, 5.8178334556674225e-06, 0.0027902788477608058};
  const double z[] = {11.046297790184076, 6.5872917254351657, 0.87801277137982525};
  const double p[] = {2.2844256717429865e-28, 4.4792166140928342e-11, 0.37993678797004815};
  for (Eigen::Index j = 0; j < 3; ++j) {
    EXPECT_LT(rel(f.beta(j), beta[j]), 1e-8) << j;
    EXPECT_LT(rel(f.se(j), se[j]), 1e-8) << j;
    EXPECT_LT(rel(f.z(j), z[j]), 1e-8) << j;
    EXPECT_LT(rel(f.p(j), p[j]), 1e-6) << j;
  }
  EXPECT_LT(rel(f.deviance, 42.13476637515469), 1e-9);
  EXPECT_LT(rel(f.loglik, -41.701377974375326), 1e-9);
}

TEST(FitPanel, PctChangeUsesSampleSd) {
  auto panel = tb_world_panel();
  PanelModel m = fit_panel(panel, RegionKind::Country);
  double mean = 0;
  for (const auto& r : panel) mean += r.burden;
  mean /= static_cast<double>(panel.size());
  double ss = 0;
  for (const auto& r : panel) ss += (r.burden - mean) * (r.burden - mean);
  double sd = std::sqrt(ss / static_cast<double>(panel.size() - 1));
  EXPECT_NEAR(m.fit.sds(0), sd, 1e-9 * sd);
  EXPECT_NEAR(m.fit.pct_change(0), 100 * std::expm1(m.fit.beta(1) * sd), 1e-9);
}

TEST(FitPanel, EmptyPanelRejected) {
  EXPECT_THROW(fit_panel({}, RegionKind::Country), Error);
}

TEST(Summarize, TableLayout) {
  PanelModel m = fit_panel(tb_world_panel(), RegionKind::Country, "Number of incident tuberculosis cases");
  std::string table = summarize(m.fit, m.labels, m.region_kind);
  auto lines = lines_of(table);
  ASSERT_GE(lines.size(), 8u);
  EXPECT_EQ(lines[0], "Poisson regression, number of tweets as dependent variable (n=10 countries)");
  EXPECT_EQ(lines[3].rfind("Number of incident tuberculosis cases", 0), 0u);
  EXPECT_NE(lines[3].find("3.83e-05***"), std::string::npos);
  EXPECT_EQ(lines[3].substr(lines[3].size() - 4), "72.5");
  EXPECT_EQ(lines[4].rfind("Number of papers", 0), 0u);
  EXPECT_EQ(lines[4].substr(lines[4].size() - 3), "9.3");
  // Constant row: no percentage column.
  EXPECT_EQ(lines[5], "Constant                               1.86e+00***  1.68e-01");
  EXPECT_EQ(lines[7], "n=10 countries");
  EXPECT_EQ(table.find("Warning"), std::string::npos);

  // Columns line up: coefficients start at the same offset on every row.
  std::size_t offset = lines[2].find("Coefficient");
  for (std::size_t i = 3; i <= 5; ++i) EXPECT_NE(lines[i][offset], ' ') << i;
  EXPECT_EQ(lines[3][offset - 1], ' ');
}

TEST(Summarize, WarnsWhenNotConverged) {
  PanelModel m = fit_panel(tb_world_panel(), RegionKind::UsState);
  m.fit.converged = false;
  m.fit.diagnostic = "iteration cap of 50 reached";
  std::string table = summarize(m.fit, m.labels, m.region_kind);
  EXPECT_NE(table.find("n=10 US states"), std::string::npos);
  EXPECT_NE(table.find("Warning: iteration cap of 50 reached\n"), std::string::npos);
}

TEST(FitCsv, FullPrecisionRoundTrip) {
  PanelModel m = fit_panel(tb_world_panel(), RegionKind::Country);
  auto lines = lines_of(fit_csv(m.fit, m.labels));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "term,coefficient,se,z,p,pct_change,sd");
  EXPECT_EQ(lines[1].rfind("Constant,", 0), 0u);
  EXPECT_EQ(lines[1].substr(lines[1].size() - 2), ",,");
  std::string burden = lines[2].substr(lines[2].find(',') + 1);
  EXPECT_EQ(std::stod(burden.substr(0, burden.find(','))), m.fit.beta(1));
}

TEST(FitPanelProperty, ScaleInvarianceOfTable) {
  // Reporting burden per 1,000 changes coefficients but not the rest of the table.
  std::mt19937_64 rng(4);
  for (int round = 0; round < 20; ++round) {
    std::vector<RegionPanel> panel;
    for (int i = 0; i < 25; ++i) {
      double b = 100 + static_cast<double>(rng() % 100000);
      std::int64_t papers = static_cast<std::int64_t>(1 + rng() % 80);
      std::int64_t tweets = static_cast<std::int64_t>(1 + rng() % 30);
      panel.push_back({"R" + std::to_string(i), tweets, b, papers});
    }
    auto scaled = panel;
    for (auto& r : scaled) r.burden /= 1000;
    auto a = fit_panel(panel, RegionKind::Country).fit;
    auto b = fit_panel(scaled, RegionKind::Country).fit;
    ASSERT_LT(rel(b.beta(1), a.beta(1) * 1000), 1e-8);
    ASSERT_LT(rel(b.pct_change(0), a.pct_change(0)), 1e-8);
    ASSERT_LT(rel(b.z(1), a.z(1)), 1e-8);
    ASSERT_EQ(b.n, static_cast<long>(panel.size()));
  }
}
