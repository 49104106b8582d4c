#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "bloc/corrspace.hpp"
#include "bloc/penalty.hpp"

namespace bloc {

/// Value substituted for numerically infeasible evaluations. Compares greater
/// than every other finite objective value, so polling never selects it.
inline constexpr double kInfeasible = std::numeric_limits<double>::max();

enum class LossKind { GaussianNLL, FrobeniusSq, BlackBox };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind) noexcept;

using LossCallback = std::function<double(const CorrelationMatrix&)>;

/// Loss h(C). The built-in losses compare C with a sample correlation target;
/// BlackBox delegates to a user callback, which must be a pure function of C.
/// Callbacks that are not safe to call concurrently must leave
/// concurrency_safe = false, which forces serial polling in the optimizer.
struct LossSpec {
  LossKind kind = LossKind::FrobeniusSq;
  std::size_t dim = 0;
  Eigen::MatrixXd target;
  LossCallback callback;
  bool concurrency_safe = true;

  /// tr(C^-1 T) + log det C. Throws CorrelationError if T is not positive definite.
  static LossSpec gaussian(const CorrelationMatrix& target);
  /// ||C - T||_F^2.
  static LossSpec frobenius(const CorrelationMatrix& target);
  static LossSpec black_box(std::size_t dim, LossCallback callback, bool concurrency_safe);
};

struct ObjectiveSpec {
  LossSpec loss;
  PenaltySpec penalty;

  /// Throws std::invalid_argument when loss, target and mask dimensions disagree.
  void validate() const;
  std::size_t dim() const noexcept { return loss.dim; }
};

/// Raised by loss_value when the Gaussian loss meets a matrix whose Cholesky
/// factorization fails.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double loss_value(const LossSpec& loss, const CorrelationMatrix& c);

/// g(C) = loss_value + penalty_sum.
double objective_value(const ObjectiveSpec& spec, const CorrelationMatrix& c);

/// f(phi) = g(phi_to_corr(wrap(phi))). A singular matrix under the Gaussian
/// loss yields kInfeasible instead of an exception.
double pullback_value(const ObjectiveSpec& spec, const Eigen::VectorXd& phi);

}  // namespace bloc
