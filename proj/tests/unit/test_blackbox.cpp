#include <string>

#include <gtest/gtest.h>

#include "bloc/blackbox.hpp"
#include "bloc/rmps.hpp"

using namespace bloc;

namespace {

std::string helper(const std::string& args) { return std::string(BLOC_BLACKBOX_HELPER) + " " + args; }

CorrelationMatrix corr3(double r) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(3, 3, r);
  m.diagonal().setOnes();
  return CorrelationMatrix::from_matrix(m);
}

}  // namespace

TEST(ChildProcess, AnswersEachRequest) {
  ChildProcessLoss loss(helper("3 0.2"));
  EXPECT_DOUBLE_EQ(loss(corr3(0.2)), 0.0);
  EXPECT_NEAR(loss(corr3(0.5)), 6 * 0.09, 1e-15);
  EXPECT_NEAR(loss(corr3(0.0)), 6 * 0.04, 1e-15);
}

TEST(ChildProcess, DrivesOptimizer) {
  ObjectiveSpec spec{child_process_loss(3, helper("3 0.3")), PenaltySpec::none()};
  EXPECT_FALSE(spec.loss.concurrency_safe);
  OptimizerConfig c;
  c.max_run = 2;
  c.parallelism = 4;
  const RunResult r = optimize(spec, CorrelationMatrix::identity(3), c);
  EXPECT_LT(r.best_value, 1e-8);
  EXPECT_NEAR(r.best_corr(0, 2), 0.3, 1e-4);
}

TEST(ChildProcess, FailuresSurface) {
  ChildProcessLoss dies(helper("3 die 1"));
  EXPECT_NO_THROW(dies(corr3(0.1)));
  EXPECT_THROW(dies(corr3(0.1)), std::runtime_error);

  ChildProcessLoss garbage(helper("3 garbage"));
  EXPECT_THROW(garbage(corr3(0.1)), std::runtime_error);

  ChildProcessLoss missing("/nonexistent/loss-binary");
  EXPECT_THROW(missing(corr3(0.1)), std::runtime_error);
}

TEST(ChildProcess, IteratesAbortWhenChildDies) {
  ObjectiveSpec spec{child_process_loss(3, helper("3 die 0")), PenaltySpec::none()};
  EXPECT_THROW(optimize(spec, CorrelationMatrix::identity(3), OptimizerConfig{}),
               OptimizationAborted);
}
