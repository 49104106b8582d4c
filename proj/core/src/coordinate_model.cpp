#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>

#include "bloc/rmps.hpp"

namespace bloc {

namespace {

// Candidate values are base value plus the change caused by replacing one
// row of the Cholesky factor L. Only row r and column r of C = L L^T change.
//
// Gaussian: with T = R R^T and X = L^-1 R, tr(C^-1 T) = ||X||_F^2. Replacing
// row r by L_r + delta is the rank-one update L + e_r delta^T, so
//   X' = X - u w^T / den,  u = L^-1 e_r,  w = X^T delta,  den = L'_rr / L_rr
// and ||X'||^2 = ||X||^2 - 2 (X^T u).w / den + ||u||^2 ||w||^2 / den^2.
class RowUpdateModel final : public CoordinateModel {
 public:
  explicit RowUpdateModel(const ObjectiveSpec& spec)
      : spec_(spec),
        d_(static_cast<Eigen::Index>(spec.dim())) {
    for (Eigen::Index r = 1; r < d_; ++r) {
      for (Eigen::Index k = 0; k < r; ++k) {
        row_of_.push_back(r);
        slot_of_.push_back(k);
      }
    }
    weights_ = Eigen::MatrixXd::Ones(d_, d_);
    if (spec_.penalty.mask) weights_ = *spec_.penalty.mask;
    weights_ = weights_ + weights_.transpose().eval();
    if (spec_.loss.kind == LossKind::GaussianNLL) {
      Eigen::LLT<Eigen::MatrixXd> llt(spec_.loss.target);
      target_factor_ = llt.matrixL();
    }
  }

  bool prepare(const Eigen::VectorXd& phi) override {
    angles_ = wrap(phi).values();
    l_ = angles_to_cholesky(AngularVector(static_cast<std::size_t>(d_), angles_)).lower;
    c_ = l_ * l_.transpose();
    c_.diagonal().setOnes();

    pen_ = Eigen::MatrixXd::Zero(d_, d_);
    for (Eigen::Index i = 0; i < d_; ++i) {
      for (Eigen::Index j = 0; j < d_; ++j) {
        if (i != j) pen_(i, j) = penalty_value(spec_.penalty, std::abs(c_(i, j)));
      }
    }
    base_penalty_ = 0.0;
    for (Eigen::Index i = 0; i < d_; ++i) {
      for (Eigen::Index j = i + 1; j < d_; ++j) base_penalty_ += weights_(i, j) * pen_(i, j);
    }

    if (spec_.loss.kind == LossKind::GaussianNLL) {
      if (!(l_.diagonal().minCoeff() > 0.0)) return false;
      linv_ = l_.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d_, d_));
      x_ = linv_.triangularView<Eigen::Lower>() * target_factor_;
      g_ = x_.transpose() * linv_;
      u_norm2_ = linv_.colwise().squaredNorm().transpose();
      x_norm2_ = x_.squaredNorm();
      log_det_ = 2.0 * l_.diagonal().array().log().sum();
      base_loss_ = x_norm2_ + log_det_;
    } else {
      base_loss_ = (c_ - spec_.loss.target).squaredNorm();
    }
    return std::isfinite(base_loss_) && std::isfinite(base_penalty_);
  }

  double candidate(std::size_t index, double angle) const override {
    const Eigen::Index r = row_of_[index];
    Eigen::VectorXd row_angles = angles_.segment(r * (r - 1) / 2, r);
    row_angles(slot_of_[index]) = angle;
    const Eigen::VectorXd row = cholesky_row(row_angles);

    double loss_delta = 0.0;
    double penalty_delta = 0.0;
    const Eigen::MatrixXd& t = spec_.loss.target;
    const bool frobenius = spec_.loss.kind == LossKind::FrobeniusSq;
    for (Eigen::Index j = 0; j < d_; ++j) {
      if (j == r) continue;
      const Eigen::Index len = std::min(j, r) + 1;
      const double v = row.head(len).dot(l_.row(j).head(len));
      penalty_delta +=
          weights_(r, j) * (penalty_value(spec_.penalty, std::abs(v)) - pen_(r, j));
      if (frobenius) {
        const double old = c_(r, j);
        loss_delta += (v - t(r, j)) * (v - t(r, j)) - (old - t(r, j)) * (old - t(r, j)) +
                      (v - t(j, r)) * (v - t(j, r)) - (old - t(j, r)) * (old - t(j, r));
      }
    }

    if (!frobenius) {
      const double pivot = row(r);
      if (!(pivot > 0.0)) return kInfeasible;
      const Eigen::VectorXd delta = row - l_.row(r).head(r + 1).transpose();
      const Eigen::VectorXd w = x_.topRows(r + 1).transpose() * delta;
      const double den = pivot / l_(r, r);
      const double trace = x_norm2_ - 2.0 * g_.col(r).dot(w) / den +
                           u_norm2_(r) * w.squaredNorm() / (den * den);
      const double log_det = log_det_ + 2.0 * (std::log(pivot) - std::log(l_(r, r)));
      loss_delta = trace + log_det - base_loss_;
    }
    return base_loss_ + loss_delta + base_penalty_ + penalty_delta;
  }

 private:
  ObjectiveSpec spec_;
  Eigen::Index d_;
  std::vector<Eigen::Index> row_of_;
  std::vector<Eigen::Index> slot_of_;
  Eigen::MatrixXd weights_;  ///< w_ij + w_ji
  Eigen::MatrixXd target_factor_;

  Eigen::VectorXd angles_;
  Eigen::MatrixXd l_;
  Eigen::MatrixXd c_;
  Eigen::MatrixXd pen_;
  double base_penalty_ = 0.0;
  double base_loss_ = 0.0;

  Eigen::MatrixXd linv_;
  Eigen::MatrixXd x_;
  Eigen::MatrixXd g_;
  Eigen::VectorXd u_norm2_;
  double x_norm2_ = 0.0;
  double log_det_ = 0.0;
};

}  // namespace

CoordinateModelFactory make_coordinate_model(const ObjectiveSpec& spec) {
  if (spec.loss.kind == LossKind::BlackBox || spec.dim() < 2) return {};
  return [spec] { return std::make_unique<RowUpdateModel>(spec); };
}

}  // namespace bloc
