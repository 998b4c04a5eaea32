#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "mscan/bench.hpp"

namespace mscan {
namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg = desk_error_preset({"tiny", 40, 48, 7, 6});
  cfg.theta_grid = {0.0, 2.0, 4.0};
  cfg.replications = 3;
  cfg.adaptive.restarts = 4;
  cfg.gss.m_bar = 20;
  cfg.gss.n_bar = 20;
  return cfg;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_results_csv(os, rows, false);
  return os.str();
}

TEST(ThetaGrid, InclusiveEndpointsWithoutDrift) {
  const auto g = theta_grid(1.0, 4.0, 0.1);
  ASSERT_EQ(g.size(), 31u);
  EXPECT_EQ(g.front(), 1.0);
  EXPECT_EQ(g.back(), 4.0);
  EXPECT_EQ(g[13], 2.3);
  EXPECT_EQ(theta_grid(1.0, 4.0, 0.5).size(), 7u);
}

TEST(Presets, MatchTheDocumentedDesigns) {
  const auto p = paper_error_preset();
  EXPECT_EQ(p.design.M, 1000u);
  EXPECT_EQ(p.design.n_star, 140u);
  EXPECT_EQ(p.replications, 30u);
  EXPECT_EQ(p.theta_grid.size(), 31u);
  const auto t = paper_timing_preset();
  EXPECT_EQ(t.theta_grid, std::vector<double>{2.5});
  EXPECT_EQ(t.replications, 100u);
  EXPECT_EQ(t.adaptive.m0, 5u);
  EXPECT_NO_THROW(validate(desk_error_preset(designs::desk_imbalanced())));
  EXPECT_NO_THROW(validate(desk_timing_preset()));
}

TEST(ErrorCurve, RowCountOrderAndHeader) {
  const auto cfg = tiny_config();
  const auto rows = run_error_curve(cfg);
  ASSERT_EQ(rows.size(), 3u * 3u * 3u * 4u);
  EXPECT_EQ(rows[0].method, Method::adaptive_las);
  EXPECT_EQ(rows[3].method, Method::gmg);
  EXPECT_EQ(rows[4].rep, 1u);
  EXPECT_EQ(rows.back().family, Family::rademacher);
  const std::string csv = to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kResultsCsvHeader);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(rows.size() + 1));
}

TEST(ErrorCurve, ByteIdenticalAcrossThreadCounts) {
  auto cfg = tiny_config();
  const std::string serial = to_csv(run_error_curve(cfg));
  cfg.threads = 4;
  EXPECT_EQ(serial, to_csv(run_error_curve(cfg)));
}

TEST(ErrorCurve, CellsAreReproducibleInIsolation) {
  const auto cfg = tiny_config();
  const auto rows = run_error_curve(cfg);
  const auto cell = run_cell(cfg, 1, 2, 1);
  const std::size_t offset = ((1 * 3 + 2) * 3 + 1) * 4;
  for (std::size_t k = 0; k < cell.size(); ++k) {
    EXPECT_EQ(cell[k].err, rows[offset + k].err);
    EXPECT_EQ(cell[k].method, rows[offset + k].method);
  }
}

TEST(ErrorCurve, NoSignalMeansNoExactRecovery) {
  const auto cfg = tiny_config();
  for (const auto& row : run_error_curve(cfg)) {
    if (row.theta_mult != 0.0) continue;
    EXPECT_GT(row.err, 0.0) << to_string(row.method);
  }
}

TEST(Timing, RecordsWallTimeAndGmgIsFastest) {
  auto cfg = desk_timing_preset();
  cfg.replications = 3;
  const auto rows = run_timing(cfg);
  std::ostringstream os;
  write_results_csv(os, rows, true);
  EXPECT_EQ(os.str().substr(0, kResultsCsvHeader.size()), kResultsCsvHeader);
  double gmg = 0, adaptive = 0;
  for (const auto& p : summarize(rows)) {
    if (p.method == Method::gmg) gmg = p.median_millis;
    if (p.method == Method::adaptive_las) adaptive = p.median_millis;
  }
  EXPECT_GT(adaptive, 0.0);
  EXPECT_LT(gmg, adaptive);
}

TEST(Summarize, MeansAndMedians) {
  std::vector<ResultRow> rows(4);
  for (Index k = 0; k < 4; ++k) {
    rows[k].err = static_cast<double>(k);
    rows[k].millis = static_cast<double>(10 * k);
  }
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].mean_err, 1.5);
  EXPECT_EQ(s[0].min_err, 0.0);
  EXPECT_EQ(s[0].max_err, 3.0);
  EXPECT_EQ(s[0].median_millis, 15.0);
}

TEST(Landscape, ShapeArgmaxAndDisplay) {
  const LandscapeDesign d{"small", 60, 70, 8, 10, 20, 25, 3.0};
  const auto grid = unimodality_grid(d, 2, 3);
  EXPECT_EQ(grid.values.size(), 20u * 25u);
  for (double v : grid.values) ASSERT_TRUE(std::isfinite(v));
  const auto [m, n] = grid.argmax();
  EXPECT_LE(std::max(m > 8 ? m - 8 : 8 - m, n > 10 ? n - 10 : 10 - n), 3u);
  const auto shown = grid.display();
  EXPECT_EQ(*std::min_element(shown.begin(), shown.end()), 0.0);
  EXPECT_EQ(unimodality_grid(d, 2, 3, 3).values, grid.values);
}

TEST(Landscape, InvalidBoundsAreDomainErrors) {
  const DataMatrix X(10, 10);
  EXPECT_THROW(unimodality_grid(X, 11, 5, 1, 0), std::domain_error);
  EXPECT_THROW(unimodality_grid(X, 5, 5, 0, 0), std::domain_error);
}

TEST(Methods, NamesRoundTrip) {
  for (Method m : all_methods()) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_FALSE(parse_method("kmeans"));
}

}  // namespace
}  // namespace mscan
