#include "bloc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "bloc/corrspace.hpp"

namespace bloc {

TruthDesign parse_truth_design(std::string_view name) {
  if (name == "block5" || name == "block-random") return TruthDesign::BlockRandom5;
  if (name == "uniform-sparse") return TruthDesign::UniformSparse;
  if (name == "block" || name == "block-fixed") return TruthDesign::BlockFixed;
  if (name == "toeplitz") return TruthDesign::Toeplitz;
  if (name == "banded") return TruthDesign::Banded;
  throw std::invalid_argument("unknown design '" + std::string(name) +
                              "' (expected block5, uniform-sparse, block, toeplitz or banded)");
}

std::string_view to_string(TruthDesign design) noexcept {
  switch (design) {
    case TruthDesign::BlockRandom5: return "block5";
    case TruthDesign::UniformSparse: return "uniform-sparse";
    case TruthDesign::BlockFixed: return "block";
    case TruthDesign::Toeplitz: return "toeplitz";
    case TruthDesign::Banded: return "banded";
  }
  return "?";
}

void TruthSpec::validate() const {
  if (d < 2) throw std::invalid_argument("truth dimension must be >= 2");
  if (design == TruthDesign::BlockRandom5 && d % 5 != 0) {
    throw std::invalid_argument("block5 design needs d divisible by 5");
  }
  if (design == TruthDesign::BlockFixed && d % 10 != 0) {
    throw std::invalid_argument("block design needs d divisible by 10");
  }
  if (design == TruthDesign::UniformSparse && !(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw std::invalid_argument("sparsity must lie in [0, 1]");
  }
}

namespace {

Eigen::MatrixXi off_diagonal_support(const Eigen::MatrixXd& m) {
  const Eigen::Index d = m.rows();
  Eigen::MatrixXi s = Eigen::MatrixXi::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) s(i, j) = (i != j && m(i, j) != 0.0) ? 1 : 0;
  }
  return s;
}

bool cholesky_ok(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0;
}

// Uniform angles over the chart of the angular domain, mapped through phi_to_corr.
Eigen::MatrixXd random_block(std::size_t size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<WrapKind> kinds = wrap_kinds(size);
  Eigen::VectorXd phi(static_cast<Eigen::Index>(kinds.size()));
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const double lo = kinds[i] == WrapKind::FirstRow ? -std::numbers::pi / 2 : 0.0;
    phi(static_cast<Eigen::Index>(i)) = lo + wrap_period(kinds[i]) * unit(rng);
  }
  // Leading angles only span [0, pi/2]; folding the period keeps them uniform.
  return corr_from_unconstrained(phi).matrix();
}

Eigen::MatrixXd uniform_sparse(const TruthSpec& spec, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(spec.d);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  }
  const auto nonzero = static_cast<std::size_t>(
      std::llround((1.0 - spec.sparsity) * static_cast<double>(pairs.size())));
  std::uniform_real_distribution<double> value(0.3, 0.6);

  for (int attempt = 0; attempt < kUniformSparseMaxAttempts; ++attempt) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
    for (std::size_t p = 0; p < nonzero; ++p) {
      const double v = value(rng);
      m(pairs[p].first, pairs[p].second) = v;
      m(pairs[p].second, pairs[p].first) = v;
    }
    if (cholesky_ok(m)) return m;
  }
  throw std::runtime_error("uniform-sparse generator: no positive definite draw after " +
                           std::to_string(kUniformSparseMaxAttempts) + " attempts");
}

}  // namespace

Truth gen_truth(const TruthSpec& spec) {
  spec.validate();
  const auto d = static_cast<Eigen::Index>(spec.d);
  std::mt19937_64 rng(spec.seed);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);

  switch (spec.design) {
    case TruthDesign::BlockRandom5:
      for (Eigen::Index b = 0; b < d; b += 5) m.block(b, b, 5, 5) = random_block(5, rng);
      break;
    case TruthDesign::UniformSparse:
      m = uniform_sparse(spec, rng);
      break;
    case TruthDesign::BlockFixed: {
      const Eigen::Index size = 10;
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          const bool same = i / size == j / size;
          m(i, j) = (i == j ? 0.2 : 0.0) + (same ? 0.8 : 0.0);
        }
      }
      break;
    }
    case TruthDesign::Toeplitz:
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          m(i, j) = std::pow(0.75, static_cast<double>(std::abs(i - j)));
        }
      }
      break;
    case TruthDesign::Banded:
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          const auto gap = static_cast<double>(std::abs(i - j));
          m(i, j) = gap <= 10.0 ? 1.0 - gap / 10.0 : 0.0;
        }
      }
      break;
  }
  return {m, off_diagonal_support(m)};
}

DataMatrix sample_mvn(const Eigen::MatrixXd& sigma, std::size_t n, std::uint64_t seed) {
  if (sigma.rows() != sigma.cols()) throw std::invalid_argument("sample_mvn: sigma must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > 0.0)) {
    throw std::invalid_argument("sample_mvn: sigma is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), sigma.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = normal(rng);
  }
  DataMatrix x;
  x.values = z * l.transpose();
  return x;
}

double matthews(const ConfusionCounts& c) {
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn);
  const auto fn = static_cast<double>(c.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

ConfusionCounts confusion(const Eigen::MatrixXi& truth_support,
                          const Eigen::MatrixXi& estimate_support) {
  if (truth_support.rows() != estimate_support.rows() ||
      truth_support.cols() != estimate_support.cols()) {
    throw std::invalid_argument("confusion: support dimensions differ");
  }
  ConfusionCounts c;
  const Eigen::Index d = truth_support.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const bool t = truth_support(i, j) != 0;
      const bool e = estimate_support(i, j) != 0;
      if (t && e) ++c.tp;
      else if (!t && e) ++c.fp;
      else if (t && !e) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

MetricsReport compute_metrics(const Eigen::MatrixXd& truth, const Eigen::MatrixXi& truth_support,
                              const Eigen::MatrixXd& estimate,
                              const Eigen::MatrixXi& estimate_support) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols() ||
      truth.rows() != truth.cols() || truth_support.rows() != truth.rows()) {
    throw std::invalid_argument("compute_metrics: dimension mismatch");
  }
  MetricsReport r;
  r.counts = confusion(truth_support, estimate_support);
  const auto& c = r.counts;
  r.tpr = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  r.fpr = (c.fp + c.tn) > 0 ? static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn) : 0.0;
  r.mcc = matthews(c);

  const Eigen::MatrixXd delta = truth - estimate;
  const Eigen::Index d = truth.rows();
  double sq = 0.0;
  double abs = 0.0;
  std::int64_t pairs = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      sq += delta(i, j) * delta(i, j);
      abs += std::abs(delta(i, j));
      ++pairs;
    }
  }
  if (pairs > 0) {
    r.rmse = std::sqrt(sq / static_cast<double>(pairs));
    r.mad = abs / static_cast<double>(pairs);
  }
  r.frob_err = delta.norm();
  const Eigen::MatrixXd sym = 0.5 * (delta + delta.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  r.spec_err = solver.eigenvalues().cwiseAbs().maxCoeff();
  return r;
}

}  // namespace bloc
