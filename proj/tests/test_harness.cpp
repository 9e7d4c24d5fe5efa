#include <atomic>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "vqhd/harness.hpp"

using namespace vqhd;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_results_csv(os, rows);
  return os.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Config, ParsesKeysAndComments) {
  const ExperimentConfig c = parse(
      "# sample\n"
      "family=RTH\n"
      "n=2,3\n"
      "seeds=1,2\n"
      "beta=0.1, 0.2\n"
      "dtau=0.01\n"
      "k=4  # trailing comment\n"
      "q=1,0.5\n"
      "eta=0.05\n"
      "optimizer=adam\n"
      "restarts=2\n"
      "depth=1,3\n"
      "jobs=2\n"
      "out=tmp_results\n");
  EXPECT_EQ(c.families, std::vector<Family>{Family::RTH});
  EXPECT_EQ(c.sizes, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(c.betas, (std::vector<double>{0.1, 0.2}));
  EXPECT_DOUBLE_EQ(c.dtau, 0.01);
  EXPECT_EQ(c.k, 4u);
  EXPECT_EQ(c.q_weights, (std::vector<double>{1.0, 0.5}));
  EXPECT_DOUBLE_EQ(c.eta, 0.05);
  EXPECT_EQ(c.optimizer, Optimizer::Adam);
  EXPECT_EQ(c.restarts, 2u);
  EXPECT_EQ(c.varqite_depths, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(c.jobs, 2u);
  EXPECT_EQ(c.out_dir, "tmp_results");
}

TEST(Config, LaterSettingsOverride) {
  ExperimentConfig c = parse("eta=0.3\n");
  apply_setting(c, "eta", "0.2");
  EXPECT_DOUBLE_EQ(c.eta, 0.2);
  std::istringstream is("n=4\n");
  const ExperimentConfig d = parse_config(is, c);
  EXPECT_DOUBLE_EQ(d.eta, 0.2);
  EXPECT_EQ(d.sizes, std::vector<std::size_t>{4});
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse("colour=blue\n"), InvalidArgument);
  EXPECT_THROW(parse("eta\n"), InvalidArgument);
  EXPECT_THROW(parse("n=two\n"), InvalidArgument);
  EXPECT_THROW(parse("family=XYZ\n"), InvalidArgument);
  EXPECT_THROW(parse("optimizer=newton\n"), InvalidArgument);

  ExperimentConfig c;
  c.dtau = 0.003;
  c.betas = {0.1};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.sizes = {7};
  EXPECT_THROW(c.validate(), std::exception);
  c = {};
  c.domain_size = 3;
  EXPECT_THROW(c.validate(), std::exception);
  c = {};
  c.eta = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  EXPECT_NO_THROW(ExperimentConfig{}.validate());
}

TEST(Grids, BetaGrids) {
  EXPECT_EQ(fig2_betas(), (std::vector<double>{0.01, 0.02, 0.05, 0.1, 0.2}));
  const auto g = fig3_betas();
  ASSERT_EQ(g.size(), 21u);
  EXPECT_DOUBLE_EQ(g.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
}

TEST(Table1, ReproducesReferenceCounts) {
  const auto cells = run_table1();
  ASSERT_EQ(cells.size(), 8u);
  for (const auto& c : cells) EXPECT_TRUE(c.matches()) << to_string(c.family) << " n=" << c.n;
  std::ostringstream os;
  write_table1_csv(os, cells);
  EXPECT_EQ(first_line(os.str()), "family,n,d,N_m,N_p,varqite,qite");
  std::ostringstream pretty;
  print_table1(pretty, cells);
  EXPECT_NE(pretty.str().find("53625"), std::string::npos);
  EXPECT_NE(pretty.str().find("5120"), std::string::npos);
}

TEST(ParallelFor, EveryIndexOnceAndErrorsPropagate) {
  for (std::size_t workers : {1u, 3u, 8u}) {
    std::vector<int> hits(17, 0);
    parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
  EXPECT_THROW(parallel_for(4, 2,
                            [](std::size_t i) {
                              if (i == 2) throw InvalidArgument("boom");
                            }),
               InvalidArgument);
}

TEST(Fig3, TwoSpinTrajectory) {
  ExperimentConfig cfg;
  cfg.sizes = {2};
  const auto rows = run_fig3(cfg);
  std::set<Metric> seen;
  for (const auto& r : rows) {
    seen.insert(r.metric);
    if (r.beta == 0.0 && (r.metric == Metric::ExactEntropy || r.metric == Metric::QiteEntropy))
      EXPECT_NEAR(r.value, 0.0, 1e-9);
    if (r.metric == Metric::EnergyGap || r.metric == Metric::ExactEnergyGap) EXPECT_GE(r.value, -1e-12);
    if (r.metric == Metric::QiteFidelity) EXPECT_GE(r.value, 0.99);
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_EQ(rows.size(), 2u * 21u * 5u);
  EXPECT_EQ(first_line(csv(rows)), "experiment,family,n,seed,depth,beta,metric,value,diagnostic");
}

TEST(Fig2, SmallRunIsReproducibleAcrossWorkerCounts) {
  ExperimentConfig cfg;
  cfg.sizes = {2};
  cfg.betas = {0.05};
  cfg.max_iters = 200;
  cfg.restarts = 2;
  cfg.jobs = 1;
  const std::string serial = csv(run_fig2(cfg));
  cfg.jobs = 2;
  EXPECT_EQ(csv(run_fig2(cfg)), serial);
  EXPECT_NE(serial.find("average_fidelity"), std::string::npos);
}

TEST(Fig4, RowsAndReferenceColumn) {
  ExperimentConfig cfg;
  cfg.families = {Family::RTH};
  cfg.sizes = {2};
  cfg.varqite_depths = {1};
  cfg.betas = {0.1};
  const auto rows = run_fig4(cfg);
  std::ostringstream os;
  write_results_csv(os, rows, kRelativeFidelityReference);
  EXPECT_EQ(first_line(os.str()), "experiment,family,n,seed,depth,beta,metric,value,diagnostic,reference");
  bool relative = false;
  for (const auto& r : rows) relative |= r.metric == Metric::RelativeFidelity && r.depth == 1;
  EXPECT_TRUE(relative);

  std::ostringstream timing;
  write_timing_csv(timing, rows);
  EXPECT_EQ(first_line(timing.str()), "experiment,family,n,seed,depth,beta,metric,wall_seconds");
}
