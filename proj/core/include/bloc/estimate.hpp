#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bloc/corrspace.hpp"
#include "bloc/objective.hpp"
#include "bloc/penalty.hpp"
#include "bloc/rmps.hpp"

namespace bloc {

/// n observations (rows) of d variables (columns).
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> names;  ///< optional, empty or one per column

  std::size_t n() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(values.cols()); }

  /// Throws std::invalid_argument unless n >= 2, d >= 1 and all values finite.
  void validate() const;
};

enum class CovarianceDenominator { NMinusOne, N };

struct SampleMoments {
  Eigen::MatrixXd covariance;   ///< S
  Eigen::MatrixXd correlation;  ///< D^-1/2 S D^-1/2, exact unit diagonal
  Eigen::VectorXd scale;        ///< sqrt(diag S)
};

/// Throws std::invalid_argument naming the first zero-variance column.
SampleMoments sample_moments(const DataMatrix& x,
                             CovarianceDenominator denominator = CovarianceDenominator::NMinusOne);

/// Sigma_ij = w_i * gamma_ij * w_j.
Eigen::MatrixXd recover_sigma(const CorrelationMatrix& gamma, const Eigen::VectorXd& w);

/// Symmetric 0/1 off-diagonal adjacency: 1 where |c_ij| >= zero_tol and
/// c_ij != 0, zero diagonal.
Eigen::MatrixXi support_of(const Eigen::MatrixXd& c, double zero_tol);

inline constexpr double kDefaultZeroTol = 1e-3;

struct EstimateOptions {
  LossKind loss = LossKind::GaussianNLL;
  PenaltyFamily penalty = PenaltyFamily::SCAD;
  double shape = 0.0;          ///< 0 selects the family default
  std::vector<double> lambdas = {0.1};
  std::optional<Eigen::MatrixXd> mask;
  OptimizerConfig optimizer;
  double zero_tol = kDefaultZeroTol;
  CovarianceDenominator denominator = CovarianceDenominator::NMinusOne;
  /// Required for LossKind::BlackBox; ignored otherwise.
  std::optional<LossSpec> black_box;
};

/// Score of one lambda on the grid: n * loss + log(n) * |support|.
struct LambdaScore {
  double lambda = 0.0;
  double loss = 0.0;
  double objective = 0.0;
  int support_size = 0;  ///< unordered pairs
  double score = 0.0;
  std::int64_t evaluations = 0;
  bool monotone = true;  ///< best-ever trace non-increasing
};

struct EstimateResult {
  CorrelationMatrix gamma_hat = CorrelationMatrix::identity(1);
  Eigen::MatrixXd sigma_hat;
  Eigen::MatrixXi support;
  Eigen::VectorXd scale;
  double lambda_used = 0.0;
  double zero_tol = kDefaultZeroTol;
  RunResult optimizer;
  std::vector<LambdaScore> path;
  bool initialized_at_sample = false;
};

/// Penalized estimation: sample moments, optimization over the lambda grid,
/// selection by score, support thresholding and covariance recovery.
EstimateResult estimate(const DataMatrix& x, const EstimateOptions& options);

}  // namespace bloc
