#include <gtest/gtest.h>

#include "bloc/simulate.hpp"

using namespace bloc;

namespace {

SimulationConfig small() {
  SimulationConfig c;
  c.truth.design = TruthDesign::Toeplitz;
  c.truth.d = 4;
  c.n = 40;
  c.replications = 3;
  c.seed = 9;
  c.estimate.lambdas = {0.05, 0.2};
  c.estimate.optimizer.max_run = 2;
  c.estimate.optimizer.kappa = 1e-4;
  return c;
}

}  // namespace

TEST(Simulate, RowsAndSummary) {
  const SimulationResult r = run_simulation(small());
  ASSERT_EQ(r.rows.size(), 3u);
  double mean_tpr = 0.0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    EXPECT_EQ(row.replication, i);
    EXPECT_EQ(row.design, "toeplitz");
    EXPECT_EQ(row.method, "scad");
    EXPECT_EQ(row.d, 4u);
    EXPECT_TRUE(row.lambda == 0.05 || row.lambda == 0.2);
    EXPECT_GE(row.metrics.tpr, 0.0);
    EXPECT_LE(row.metrics.tpr, 1.0);
    mean_tpr += row.metrics.tpr / 3.0;
  }
  EXPECT_DOUBLE_EQ(r.summary.tpr.mean, mean_tpr);
}

TEST(Simulate, ParallelReplicationsMatchSerial) {
  SimulationConfig c = small();
  const SimulationResult a = run_simulation(c);
  c.parallelism = 3;
  const SimulationResult b = run_simulation(c);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].metrics.rmse, b.rows[i].metrics.rmse);
    EXPECT_EQ(a.rows[i].lambda, b.rows[i].lambda);
  }
}

TEST(Simulate, Validation) {
  SimulationConfig c = small();
  c.replications = 0;
  EXPECT_THROW(run_simulation(c), std::invalid_argument);
  c = small();
  c.truth.design = TruthDesign::BlockFixed;
  EXPECT_THROW(run_simulation(c), std::invalid_argument);
}
