#include "bloc/objective.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace bloc {

LossKind parse_loss_kind(std::string_view name) {
  if (name == "gaussian") return LossKind::GaussianNLL;
  if (name == "frobenius") return LossKind::FrobeniusSq;
  if (name == "blackbox" || name == "blackbox-cmd") return LossKind::BlackBox;
  throw std::invalid_argument("unknown loss '" + std::string(name) +
                              "' (expected gaussian, frobenius or blackbox-cmd)");
}

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::GaussianNLL: return "gaussian";
    case LossKind::FrobeniusSq: return "frobenius";
    case LossKind::BlackBox: return "blackbox-cmd";
  }
  return "?";
}

LossSpec LossSpec::gaussian(const CorrelationMatrix& target) {
  if (!target.is_positive_definite()) {
    throw CorrelationError(
        {"Gaussian loss needs a positive definite sample correlation matrix; "
         "use the Frobenius loss when the sample correlation is singular (d >= n)"});
  }
  LossSpec spec;
  spec.kind = LossKind::GaussianNLL;
  spec.dim = target.dim();
  spec.target = target.matrix();
  return spec;
}

LossSpec LossSpec::frobenius(const CorrelationMatrix& target) {
  LossSpec spec;
  spec.kind = LossKind::FrobeniusSq;
  spec.dim = target.dim();
  spec.target = target.matrix();
  return spec;
}

LossSpec LossSpec::black_box(std::size_t dim, LossCallback callback, bool concurrency_safe) {
  if (!callback) throw std::invalid_argument("black-box loss needs a callback");
  LossSpec spec;
  spec.kind = LossKind::BlackBox;
  spec.dim = dim;
  spec.callback = std::move(callback);
  spec.concurrency_safe = concurrency_safe;
  return spec;
}

void ObjectiveSpec::validate() const {
  const auto d = static_cast<Eigen::Index>(loss.dim);
  if (loss.dim == 0) throw std::invalid_argument("objective dimension must be positive");
  if (loss.kind != LossKind::BlackBox && (loss.target.rows() != d || loss.target.cols() != d)) {
    throw std::invalid_argument("loss target does not match the objective dimension");
  }
  if (loss.kind == LossKind::BlackBox && !loss.callback) {
    throw std::invalid_argument("black-box loss has no callback");
  }
  penalty.validate();
  if (penalty.mask && (penalty.mask->rows() != d)) {
    throw std::invalid_argument("penalty mask is " + std::to_string(penalty.mask->rows()) +
                                "x" + std::to_string(penalty.mask->cols()) +
                                " but the objective dimension is " + std::to_string(d));
  }
}

double loss_value(const LossSpec& loss, const CorrelationMatrix& c) {
  switch (loss.kind) {
    case LossKind::GaussianNLL: {
      Eigen::LLT<Eigen::MatrixXd> llt(c.matrix());
      const double min_pivot =
          llt.info() == Eigen::Success ? llt.matrixLLT().diagonal().minCoeff() : 0.0;
      if (llt.info() != Eigen::Success || !(min_pivot > 0.0)) {
        std::ostringstream os;
        os << "Gaussian loss: Cholesky factorization failed (d = " << c.dim()
           << ", smallest eigenvalue " << c.min_eigenvalue() << ")";
        throw SingularMatrixError(os.str());
      }
      const double trace = llt.solve(loss.target).trace();
      const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
      return trace + log_det;
    }
    case LossKind::FrobeniusSq:
      return (c.matrix() - loss.target).squaredNorm();
    case LossKind::BlackBox:
      return loss.callback(c);
  }
  return 0.0;
}

double objective_value(const ObjectiveSpec& spec, const CorrelationMatrix& c) {
  return loss_value(spec.loss, c) + penalty_sum(spec.penalty, c);
}

double pullback_value(const ObjectiveSpec& spec, const Eigen::VectorXd& phi) {
  const CorrelationMatrix c = corr_from_unconstrained(phi);
  try {
    return objective_value(spec, c);
  } catch (const SingularMatrixError&) {
    return kInfeasible;
  }
}

}  // namespace bloc
