#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "bloc/datagen.hpp"
#include "bloc/estimate.hpp"
#include "oracles.hpp"

using namespace bloc;

namespace {

DataMatrix data(const Eigen::MatrixXd& values) {
  DataMatrix x;
  x.values = values;
  return x;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(SampleMoments, IdenticalColumns) {
  Eigen::MatrixXd v(4, 2);
  v << 1, 1, 2, 2, 4, 4, 7, 7;
  const SampleMoments m = sample_moments(data(v));
  EXPECT_NEAR(m.correlation(0, 1), 1.0, 1e-15);
  EXPECT_FALSE(validate_corr(m.correlation, 1e-10).ok());
}

TEST(SampleMoments, OrthogonalColumns) {
  Eigen::MatrixXd v(4, 2);
  v << 1, 1, -1, 1, 1, -1, -1, -1;
  const SampleMoments m = sample_moments(data(v));
  EXPECT_EQ(m.correlation, Eigen::MatrixXd::Identity(2, 2));
}

TEST(SampleMoments, LinearToy) {
  Eigen::MatrixXd v(3, 2);
  v << 1, 2, 2, 4, 3, 6;
  const SampleMoments m = sample_moments(data(v));
  EXPECT_NEAR(m.correlation(0, 1), 1.0, 1e-15);
  EXPECT_EQ(m.correlation(0, 0), 1.0);
  EXPECT_NEAR(m.covariance(0, 0), 1.0, 1e-15);  // n - 1 denominator
  EXPECT_NEAR(sample_moments(data(v), CovarianceDenominator::N).covariance(0, 0), 2.0 / 3.0,
              1e-15);
  EXPECT_NEAR(m.scale(1), 2.0, 1e-15);
}

TEST(SampleMoments, Errors) {
  Eigen::MatrixXd v(3, 2);
  v << 1, 5, 2, 5, 3, 5;
  DataMatrix x = data(v);
  x.names = {"a", "flat"};
  try {
    sample_moments(x);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("flat"), std::string::npos);
  }
  EXPECT_THROW(sample_moments(data(Eigen::MatrixXd::Ones(1, 3))), std::invalid_argument);
  Eigen::MatrixXd nan = Eigen::MatrixXd::Random(4, 2);
  nan(1, 1) = std::nan("");
  EXPECT_THROW(sample_moments(data(nan)), std::invalid_argument);
}

TEST(RecoverSigma, Examples) {
  const Eigen::Vector2d w(2.0, 3.0);
  const Eigen::MatrixXd s = recover_sigma(CorrelationMatrix::identity(2), w);
  EXPECT_EQ(s, Eigen::Vector2d(4.0, 9.0).asDiagonal().toDenseMatrix());

  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
  g(0, 1) = g(1, 0) = 0.5;
  const auto gamma = CorrelationMatrix::from_matrix(g);
  EXPECT_DOUBLE_EQ(recover_sigma(gamma, w)(0, 1), 3.0);
  EXPECT_EQ(recover_sigma(gamma, Eigen::Vector2d::Ones()), g);
  EXPECT_THROW(recover_sigma(gamma, Eigen::Vector2d(1.0, 0.0)), std::invalid_argument);
  EXPECT_THROW(recover_sigma(gamma, Eigen::Vector3d::Ones()), std::invalid_argument);
}

TEST(RecoverSigma, CongruencePreservesDefiniteness) {
  std::mt19937_64 rng(1);
  const auto g = CorrelationMatrix::from_matrix(oracle::random_correlation(6, rng));
  const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(6, 0.5, 4.0);
  const Eigen::MatrixXd s = recover_sigma(g, w);
  EXPECT_EQ(s, s.transpose());
  EXPECT_GT(oracle::min_eigenvalue(s), 0.0);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(s(i, i), w(i) * w(i));
}

TEST(SupportOf, ThresholdAndShape) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(3, 3);
  c(0, 1) = c(1, 0) = 0.002;
  c(0, 2) = c(2, 0) = -0.0005;
  const Eigen::MatrixXi s = support_of(c, 1e-3);
  EXPECT_EQ(s(0, 1), 1);
  EXPECT_EQ(s(0, 2), 0);
  EXPECT_EQ(s.diagonal().sum(), 0);
  EXPECT_EQ(s, s.transpose());
  EXPECT_EQ(support_of(c, 0.0).sum(), 4);
}

TEST(Estimate, FrobeniusLambdaZeroRecoversSample) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd truth = oracle::random_correlation(4, rng);
  const DataMatrix x = sample_mvn(truth, 80, 3);
  EstimateOptions o;
  o.loss = LossKind::FrobeniusSq;
  o.penalty = PenaltyFamily::None;
  o.lambdas = {0.0};
  o.optimizer.kappa = 1e-9;
  o.optimizer.tau1 = 1e-14;
  const EstimateResult r = estimate(x, o);
  const SampleMoments m = sample_moments(x);
  EXPECT_LT((r.gamma_hat.matrix() - m.correlation).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_TRUE(r.initialized_at_sample);
  EXPECT_TRUE(r.sigma_hat.diagonal().isApprox(m.covariance.diagonal(), 1e-15));
  EXPECT_EQ(r.scale, m.scale);
}

TEST(Estimate, IdentityTruthGivesEmptySupport) {
  const DataMatrix x = sample_mvn(Eigen::MatrixXd::Identity(5, 5), 500, 11);
  EstimateOptions o;
  o.lambdas = {0.1};
  const EstimateResult r = estimate(x, o);
  EXPECT_EQ(r.support.sum(), 0);
  EXPECT_LT((r.gamma_hat.matrix() - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 0.01);
  EXPECT_EQ(r.lambda_used, 0.1);
}

TEST(Estimate, LambdaGridPath) {
  std::mt19937_64 rng(4);
  const DataMatrix x = sample_mvn(oracle::random_correlation(4, rng), 60, 5);
  EstimateOptions o;
  o.lambdas = {0.0, 0.1, 0.3};
  o.optimizer.max_run = 3;
  const EstimateResult r = estimate(x, o);
  ASSERT_EQ(r.path.size(), 3u);
  double best = r.path[0].score;
  double chosen = r.path[0].lambda;
  for (const auto& p : r.path) {
    const double n = 60.0;
    EXPECT_NEAR(p.score, n * p.loss + std::log(n) * p.support_size, 1e-9);
    if (p.score < best) best = p.score, chosen = p.lambda;
  }
  EXPECT_EQ(r.lambda_used, chosen);
}

TEST(Estimate, SparsityTrendsDownInLambda) {
  const std::vector<double> grid = {0.0, 0.05, 0.1, 0.2, 0.4};
  std::vector<double> mean_support(grid.size(), 0.0);
  for (std::uint64_t rep = 0; rep < 3; ++rep) {
    const Truth t = gen_truth({TruthDesign::BlockRandom5, 5, 0.95, 10 + rep});
    const DataMatrix x = sample_mvn(t.matrix, 100, 20 + rep);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EstimateOptions o;
      o.lambdas = {grid[i]};
      o.zero_tol = 1e-2;
      o.optimizer.max_run = 3;
      o.optimizer.tau1 = 1e-6;
      mean_support[i] += estimate(x, o).support.sum() / 2;
    }
  }
  EXPECT_LT(spearman(grid, mean_support), 0.0);
}

TEST(Estimate, SingularSampleNeedsFrobenius) {
  const DataMatrix x = sample_mvn(Eigen::MatrixXd::Identity(6, 6), 4, 1);
  EstimateOptions o;
  try {
    estimate(x, o);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("frobenius"), std::string::npos);
  }
  o.loss = LossKind::FrobeniusSq;
  o.optimizer.max_run = 1;
  o.optimizer.kappa = 1e-3;
  const EstimateResult r = estimate(x, o);
  EXPECT_FALSE(r.initialized_at_sample);
  EXPECT_TRUE(r.gamma_hat.matrix().diagonal().isOnes(0.0));
}

TEST(Estimate, RejectsBadOptions) {
  const DataMatrix x = sample_mvn(Eigen::MatrixXd::Identity(3, 3), 20, 1);
  EstimateOptions o;
  o.lambdas = {};
  EXPECT_THROW(estimate(x, o), std::invalid_argument);
  o.lambdas = {-0.1};
  EXPECT_THROW(estimate(x, o), std::invalid_argument);
  o.lambdas = {0.1};
  o.zero_tol = -1.0;
  EXPECT_THROW(estimate(x, o), std::invalid_argument);
}
