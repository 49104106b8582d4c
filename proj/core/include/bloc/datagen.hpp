#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

#include "bloc/estimate.hpp"

namespace bloc {

enum class TruthDesign {
  BlockRandom5,   ///< disjoint 5x5 random correlation blocks on the diagonal
  UniformSparse,  ///< random off-diagonal support, values ~ U[0.3, 0.6]
  BlockFixed,     ///< d/10 equal blocks, within-block 0.8
  Toeplitz,       ///< 0.75^|i-j|
  Banded,         ///< (1 - |i-j|/10) for |i-j| <= 10
};

TruthDesign parse_truth_design(std::string_view name);
std::string_view to_string(TruthDesign design) noexcept;

struct TruthSpec {
  TruthDesign design = TruthDesign::BlockRandom5;
  std::size_t d = 20;
  double sparsity = 0.95;  ///< fraction of zero off-diagonal pairs (UniformSparse)
  std::uint64_t seed = 0;

  void validate() const;
};

struct Truth {
  Eigen::MatrixXd matrix;   ///< unit-diagonal, positive definite
  Eigen::MatrixXi support;  ///< symmetric 0/1, zero diagonal
};

inline constexpr int kUniformSparseMaxAttempts = 10000;

/// Throws std::runtime_error when UniformSparse cannot reach a positive
/// definite draw within kUniformSparseMaxAttempts.
Truth gen_truth(const TruthSpec& spec);

/// n rows of N(0, sigma): X = Z L^T with L the Cholesky factor of sigma.
DataMatrix sample_mvn(const Eigen::MatrixXd& sigma, std::size_t n, std::uint64_t seed);

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;
};

struct MetricsReport {
  ConfusionCounts counts;
  double tpr = 0.0;
  double fpr = 0.0;
  double mcc = 0.0;
  double rmse = 0.0;       ///< over off-diagonal pairs
  double mad = 0.0;        ///< over off-diagonal pairs
  double frob_err = 0.0;   ///< ||truth - estimate||_F
  double spec_err = 0.0;   ///< largest |eigenvalue| of truth - estimate
};

/// Matthews correlation coefficient; 0 when the denominator vanishes.
double matthews(const ConfusionCounts& c);

/// Confusion counts over unordered off-diagonal pairs.
ConfusionCounts confusion(const Eigen::MatrixXi& truth_support,
                          const Eigen::MatrixXi& estimate_support);

MetricsReport compute_metrics(const Eigen::MatrixXd& truth, const Eigen::MatrixXi& truth_support,
                              const Eigen::MatrixXd& estimate,
                              const Eigen::MatrixXi& estimate_support);

}  // namespace bloc
