#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bloc {

/// Raised when a matrix fails one or more correlation-matrix invariants.
/// Every violated invariant is listed separately in issues().
class CorrelationError : public std::runtime_error {
 public:
  explicit CorrelationError(std::vector<std::string> issues);

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Number of free angles of a d x d correlation matrix, d(d-1)/2.
constexpr std::size_t angle_count(std::size_t d) noexcept {
  return d < 2 ? 0 : d * (d - 1) / 2;
}

/// Inverse of angle_count. Throws std::invalid_argument if n is not triangular.
std::size_t dimension_for_angle_count(std::size_t n);

/// 1-based position (m, k) of an angle: row m of the Cholesky factor, k-th
/// angle of that row, 2 <= m <= d, 1 <= k <= m - 1.
struct AnglePosition {
  std::size_t m;
  std::size_t k;

  friend bool operator==(const AnglePosition&, const AnglePosition&) = default;
};

/// Flat 1-based index n -> (m, k), row-major (m ascending, then k ascending).
AnglePosition index_to_position(std::size_t n, std::size_t d);

/// (m, k) -> flat 1-based index n. Inverse of index_to_position.
std::size_t position_to_index(AnglePosition pos, std::size_t d);

/// The four folding rules of the wrapping map, one per angle role.
enum class WrapKind {
  FirstRow,   ///< m = 2, k = 1: folds onto [-pi/2, pi/2)
  Leading,    ///< m >= 3, k = 1: reflects onto [0, pi/2]
  Interior,   ///< m >= 3, 2 <= k <= m - 2: reflects onto [0, pi]
  Trailing,   ///< m >= 3, k = m - 1: reduces onto [0, 2 pi)
};

WrapKind wrap_kind(AnglePosition pos);

/// Period of the wrap rule: pi for FirstRow and Leading, 2 pi otherwise.
double wrap_period(WrapKind kind) noexcept;

/// Applies one component of the wrapping map. theta must be finite.
double wrap_angle(double theta, WrapKind kind);

/// Wrap kinds for all N angles of a d x d matrix, in flat-index order.
std::vector<WrapKind> wrap_kinds(std::size_t d);

/// Angles of the unit-row Cholesky factor, stored flat in row-major order.
/// Construction checks the (closed) angular domain.
class AngularVector {
 public:
  AngularVector(std::size_t d, Eigen::VectorXd angles);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(angles_.size()); }
  const Eigen::VectorXd& values() const noexcept { return angles_; }

  /// Angle at 1-based position (m, k).
  double at(std::size_t m, std::size_t k) const;

  /// True when every angle lies in the domain of its wrap rule.
  static bool in_domain(std::size_t d, const Eigen::VectorXd& angles);

 private:
  std::size_t dim_;
  Eigen::VectorXd angles_;
};

/// Lower-triangular factor with unit-norm rows and nonnegative diagonal.
struct CholeskyFactor {
  Eigen::MatrixXd lower;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(lower.rows()); }
};

class CorrelationMatrix;
struct ValidationResult;

/// Checks squareness, entries in [-1, 1], symmetry within tol, unit diagonal
/// within tol and smallest eigenvalue > tol. On success the returned matrix is
/// symmetrized and its diagonal snapped to exactly 1.
ValidationResult validate_corr(const Eigen::MatrixXd& m, double tol);

/// Angles -> correlation matrix L L^T, with exact unit diagonal and symmetry.
CorrelationMatrix phi_to_corr(const AngularVector& omega);

/// Symmetric matrix with exact unit diagonal. Instances built from raw data
/// pass through validate_corr (positive definite); instances produced by
/// phi_to_corr are positive semidefinite by construction and may sit on the
/// rank-deficient boundary, which is_positive_definite() reports.
class CorrelationMatrix {
 public:
  static CorrelationMatrix identity(std::size_t d);

  /// Validates M (see validate_corr) and throws CorrelationError on failure.
  static CorrelationMatrix from_matrix(const Eigen::MatrixXd& m, double tol = 1e-8);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  double min_eigenvalue() const;
  bool is_positive_definite() const;

 private:
  friend CorrelationMatrix phi_to_corr(const AngularVector& omega);
  friend ValidationResult validate_corr(const Eigen::MatrixXd& m, double tol);

  explicit CorrelationMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}

  Eigen::MatrixXd values_;
};

struct ValidationResult {
  std::vector<std::string> issues;
  std::optional<CorrelationMatrix> accepted;

  bool ok() const noexcept { return issues.empty(); }
  const CorrelationMatrix& value() const;
};

/// Row m - 1 (0-based) of the angular Cholesky factor from its m - 1 wrapped
/// angles; returns the m entries in columns 0 .. m - 1.
Eigen::VectorXd cholesky_row(const Eigen::Ref<const Eigen::VectorXd>& row_angles);

/// Angles -> unit-row Cholesky factor.
CholeskyFactor angles_to_cholesky(const AngularVector& omega);

/// Correlation matrix -> angles. Throws CorrelationError when the Cholesky
/// factorization fails (matrix not positive definite). When a running sine
/// product vanishes, all later angles of that row are set to 0.
AngularVector corr_to_phi(const CorrelationMatrix& c);

/// The wrapping map: arbitrary finite phi -> angular domain.
AngularVector wrap(const Eigen::VectorXd& phi);

/// phi_to_corr(wrap(phi)).
CorrelationMatrix corr_from_unconstrained(const Eigen::VectorXd& phi);

}  // namespace bloc
