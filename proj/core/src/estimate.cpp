#include "bloc/estimate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bloc {

void DataMatrix::validate() const {
  if (values.rows() < 2) throw std::invalid_argument("data needs at least 2 observations");
  if (values.cols() < 1) throw std::invalid_argument("data needs at least 1 variable");
  if (!values.allFinite()) throw std::invalid_argument("data contains missing or non-finite values");
  if (!names.empty() && names.size() != d()) {
    throw std::invalid_argument("data has " + std::to_string(names.size()) + " names for " +
                                std::to_string(d()) + " columns");
  }
}

SampleMoments sample_moments(const DataMatrix& x, CovarianceDenominator denominator) {
  x.validate();
  const auto n = static_cast<double>(x.n());
  const Eigen::RowVectorXd mean = x.values.colwise().mean();
  const Eigen::MatrixXd centered = x.values.rowwise() - mean;
  const double denom = denominator == CovarianceDenominator::NMinusOne ? n - 1.0 : n;

  SampleMoments m;
  m.covariance = (centered.transpose() * centered) / denom;
  m.covariance = 0.5 * (m.covariance + m.covariance.transpose());
  const Eigen::Index d = m.covariance.rows();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(m.covariance(j, j) > 0.0)) {
      const std::string name = x.names.empty() ? "column " + std::to_string(j + 1)
                                               : "column '" + x.names[static_cast<std::size_t>(j)] + "'";
      throw std::invalid_argument(name + " has zero variance");
    }
  }
  m.scale = m.covariance.diagonal().cwiseSqrt();
  m.correlation = m.covariance;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      m.correlation(i, j) = i == j ? 1.0 : m.covariance(i, j) / (m.scale(i) * m.scale(j));
    }
  }
  return m;
}

Eigen::MatrixXd recover_sigma(const CorrelationMatrix& gamma, const Eigen::VectorXd& w) {
  if (static_cast<std::size_t>(w.size()) != gamma.dim()) {
    throw std::invalid_argument("recover_sigma: scale length does not match dimension");
  }
  if (!(w.minCoeff() > 0.0)) throw std::invalid_argument("recover_sigma: scales must be > 0");
  Eigen::MatrixXd sigma = w.asDiagonal() * gamma.matrix() * w.asDiagonal();
  sigma.diagonal() = w.array().square().matrix();
  return sigma.selfadjointView<Eigen::Upper>();
}

Eigen::MatrixXi support_of(const Eigen::MatrixXd& c, double zero_tol) {
  const Eigen::Index d = c.rows();
  Eigen::MatrixXi s = Eigen::MatrixXi::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      // Decide on the upper entry only so the report stays symmetric.
      const double v = c(i, j);
      const int on = (v != 0.0 && std::abs(v) >= zero_tol) ? 1 : 0;
      s(i, j) = on;
      s(j, i) = on;
    }
  }
  return s;
}

namespace {

LossSpec make_loss(const EstimateOptions& options, const CorrelationMatrix& target) {
  switch (options.loss) {
    case LossKind::GaussianNLL:
      try {
        return LossSpec::gaussian(target);
      } catch (const CorrelationError&) {
        throw std::invalid_argument(
            "sample correlation matrix is singular; the Gaussian loss needs n > d and "
            "linearly independent columns, use --loss frobenius instead");
      }
    case LossKind::FrobeniusSq: return LossSpec::frobenius(target);
    case LossKind::BlackBox:
      if (!options.black_box) throw std::invalid_argument("black-box loss not configured");
      return *options.black_box;
  }
  throw std::invalid_argument("unknown loss kind");
}

}  // namespace

EstimateResult estimate(const DataMatrix& x, const EstimateOptions& options) {
  if (options.lambdas.empty()) throw std::invalid_argument("estimate: empty lambda grid");
  for (double lam : options.lambdas) {
    if (!(lam >= 0.0)) throw std::invalid_argument("estimate: lambda must be >= 0");
  }
  if (!(options.zero_tol >= 0.0)) throw std::invalid_argument("estimate: zero_tol must be >= 0");

  const SampleMoments moments = sample_moments(x, options.denominator);
  const std::size_t d = x.d();

  // The sample correlation may be singular (d >= n); keep it as a raw target
  // for the Frobenius loss, which does not need definiteness.
  auto sample = validate_corr(moments.correlation, 1e-10);
  bool sample_pd = sample.ok();
  CorrelationMatrix init = sample_pd ? *sample.accepted : CorrelationMatrix::identity(d);
  if (sample_pd) {
    try {
      (void)corr_to_phi(init);
    } catch (const CorrelationError&) {
      sample_pd = false;
      init = CorrelationMatrix::identity(d);
    }
  }

  LossSpec loss;
  if (options.loss == LossKind::GaussianNLL) {
    if (!sample_pd) {
      throw std::invalid_argument(
          "sample correlation matrix is singular; the Gaussian loss needs n > d and "
          "linearly independent columns, use --loss frobenius instead");
    }
    loss = make_loss(options, init);
  } else if (options.loss == LossKind::FrobeniusSq) {
    loss.kind = LossKind::FrobeniusSq;
    loss.dim = d;
    loss.target = moments.correlation;
  } else {
    loss = make_loss(options, init);
  }

  // Selection score uses the Gaussian loss when fitting with it, and the
  // Frobenius loss against the sample correlation otherwise.
  LossSpec score_loss = loss;
  if (options.loss == LossKind::BlackBox) {
    score_loss = LossSpec{};
    score_loss.kind = LossKind::FrobeniusSq;
    score_loss.dim = d;
    score_loss.target = moments.correlation;
  }

  const double n = static_cast<double>(x.n());
  EstimateResult best;
  std::optional<std::size_t> best_index;

  for (double lam : options.lambdas) {
    ObjectiveSpec spec{loss, PenaltySpec::make(options.penalty, lam, options.shape)};
    spec.penalty.mask = options.mask;
    spec.validate();

    RunResult run = optimize(spec, init, options.optimizer);
    Eigen::MatrixXi support = support_of(run.best_corr.matrix(), options.zero_tol);

    LambdaScore score;
    score.lambda = lam;
    score.objective = run.best_value;
    score.loss = loss_value(score_loss, run.best_corr);
    score.support_size = support.sum() / 2;
    score.score = n * score.loss + std::log(n) * score.support_size;
    score.evaluations = run.evaluations;
    score.monotone = trace_monotone(run);
    best.path.push_back(score);

    if (!best_index || score.score < best.path[*best_index].score) {
      best_index = best.path.size() - 1;
      best.gamma_hat = run.best_corr;
      best.support = std::move(support);
      best.lambda_used = lam;
      best.optimizer = std::move(run);
    }
  }

  best.scale = moments.scale;
  best.sigma_hat = recover_sigma(best.gamma_hat, moments.scale);
  best.zero_tol = options.zero_tol;
  best.initialized_at_sample = sample_pd;
  return best;
}

}  // namespace bloc
