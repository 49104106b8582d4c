#include "bloc/corrspace.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace bloc {

namespace {

constexpr double kPi = std::numbers::pi;

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream os;
  os << "invalid correlation matrix:";
  for (const auto& issue : issues) os << "\n  - " << issue;
  return os.str();
}

// Remainder in [0, p). fmod is exact; only the shift by p can round up to p.
double positive_mod(double x, double p) {
  double r = std::fmod(x, p);
  if (r < 0.0) r += p;
  if (r >= p) r = 0.0;
  return r + 0.0;  // normalizes -0.0
}

// atan2 with the boundary convention: a vanished tail yields angle 0.
double tail_angle(double tail_norm, double head) {
  if (tail_norm == 0.0 && head == 0.0) return 0.0;
  return std::atan2(tail_norm, head);
}

bool angle_in_domain(double a, WrapKind kind) {
  switch (kind) {
    case WrapKind::FirstRow: return a >= -kPi / 2 && a <= kPi / 2;
    case WrapKind::Leading: return a >= 0.0 && a <= kPi / 2;
    case WrapKind::Interior: return a >= 0.0 && a <= kPi;
    case WrapKind::Trailing: return a >= 0.0 && a < 2 * kPi;
  }
  return false;
}

}  // namespace

CorrelationError::CorrelationError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::size_t dimension_for_angle_count(std::size_t n) {
  if (n == 0) return 1;
  std::size_t d = 2;
  while (angle_count(d) < n) ++d;
  if (angle_count(d) != n) {
    throw std::invalid_argument("angle vector length " + std::to_string(n) +
                                " is not d(d-1)/2 for any dimension d");
  }
  return d;
}

AnglePosition index_to_position(std::size_t n, std::size_t d) {
  if (d < 2 || n < 1 || n > angle_count(d)) {
    throw std::out_of_range("angle index " + std::to_string(n) + " out of range for d = " +
                            std::to_string(d));
  }
  std::size_t m = 2;
  while (angle_count(m) < n) ++m;
  return {m, n - angle_count(m - 1)};
}

std::size_t position_to_index(AnglePosition pos, std::size_t d) {
  if (pos.m < 2 || pos.m > d || pos.k < 1 || pos.k >= pos.m) {
    throw std::out_of_range("angle position (" + std::to_string(pos.m) + ", " +
                            std::to_string(pos.k) + ") out of range for d = " +
                            std::to_string(d));
  }
  return angle_count(pos.m - 1) + pos.k;
}

WrapKind wrap_kind(AnglePosition pos) {
  if (pos.m == 2) return WrapKind::FirstRow;
  if (pos.k == 1) return WrapKind::Leading;
  if (pos.k == pos.m - 1) return WrapKind::Trailing;
  return WrapKind::Interior;
}

double wrap_period(WrapKind kind) noexcept {
  return (kind == WrapKind::FirstRow || kind == WrapKind::Leading) ? kPi : 2 * kPi;
}

double wrap_angle(double theta, WrapKind kind) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("wrap: non-finite angle parameter");
  }
  switch (kind) {
    case WrapKind::FirstRow: return positive_mod(theta + kPi / 2, kPi) - kPi / 2;
    case WrapKind::Leading: return kPi / 2 - std::abs(positive_mod(theta, kPi) - kPi / 2);
    case WrapKind::Interior: return kPi - std::abs(positive_mod(theta, 2 * kPi) - kPi);
    case WrapKind::Trailing: return positive_mod(theta, 2 * kPi);
  }
  return theta;
}

std::vector<WrapKind> wrap_kinds(std::size_t d) {
  std::vector<WrapKind> kinds;
  kinds.reserve(angle_count(d));
  for (std::size_t m = 2; m <= d; ++m) {
    for (std::size_t k = 1; k < m; ++k) kinds.push_back(wrap_kind({m, k}));
  }
  return kinds;
}

AngularVector::AngularVector(std::size_t d, Eigen::VectorXd angles)
    : dim_(d), angles_(std::move(angles)) {
  if (d < 1) throw std::invalid_argument("AngularVector: dimension must be positive");
  if (static_cast<std::size_t>(angles_.size()) != angle_count(d)) {
    throw std::invalid_argument("AngularVector: expected " + std::to_string(angle_count(d)) +
                                " angles for d = " + std::to_string(d) + ", got " +
                                std::to_string(angles_.size()));
  }
  if (!in_domain(d, angles_)) {
    throw std::domain_error("AngularVector: angle outside the angular domain");
  }
}

double AngularVector::at(std::size_t m, std::size_t k) const {
  return angles_(static_cast<Eigen::Index>(position_to_index({m, k}, dim_) - 1));
}

bool AngularVector::in_domain(std::size_t d, const Eigen::VectorXd& angles) {
  if (static_cast<std::size_t>(angles.size()) != angle_count(d)) return false;
  Eigen::Index n = 0;
  for (std::size_t m = 2; m <= d; ++m) {
    for (std::size_t k = 1; k < m; ++k, ++n) {
      if (!angle_in_domain(angles(n), wrap_kind({m, k}))) return false;
    }
  }
  return true;
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return CorrelationMatrix(Eigen::MatrixXd::Identity(n, n));
}

CorrelationMatrix CorrelationMatrix::from_matrix(const Eigen::MatrixXd& m, double tol) {
  auto result = validate_corr(m, tol);
  if (!result.ok()) throw CorrelationError(std::move(result.issues));
  return std::move(*result.accepted);
}

double CorrelationMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(values_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

bool CorrelationMatrix::is_positive_definite() const {
  Eigen::LLT<Eigen::MatrixXd> llt(values_);
  if (llt.info() != Eigen::Success) return false;
  return llt.matrixLLT().diagonal().minCoeff() > 0.0;
}

const CorrelationMatrix& ValidationResult::value() const {
  if (!accepted) throw CorrelationError(issues);
  return *accepted;
}

ValidationResult validate_corr(const Eigen::MatrixXd& m, double tol) {
  ValidationResult result;
  if (m.rows() != m.cols() || m.rows() == 0) {
    result.issues.push_back("matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected non-empty square");
    return result;
  }
  if (!m.allFinite()) {
    result.issues.push_back("matrix contains non-finite entries");
    return result;
  }
  const Eigen::Index d = m.rows();

  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    std::ostringstream os;
    os << "not symmetric: max |m_ij - m_ji| = " << asym << " > tol " << tol;
    result.issues.push_back(os.str());
  }
  const double diag_dev = (m.diagonal().array() - 1.0).abs().maxCoeff();
  if (diag_dev > tol) {
    std::ostringstream os;
    os << "diagonal not unit: max |m_ii - 1| = " << diag_dev << " > tol " << tol;
    result.issues.push_back(os.str());
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j && std::abs(m(i, j)) > 1.0 + tol) {
        std::ostringstream os;
        os << "entry (" << i + 1 << ", " << j + 1 << ") = " << m(i, j) << " outside [-1, 1]";
        result.issues.push_back(os.str());
      }
    }
  }

  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  sym.diagonal().setOnes();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues()(0);
  if (!(min_eig > tol)) {
    std::ostringstream os;
    os << "not positive definite: smallest eigenvalue " << min_eig << " <= tol " << tol;
    result.issues.push_back(os.str());
  }

  if (result.ok()) result.accepted = CorrelationMatrix(std::move(sym));
  return result;
}

Eigen::VectorXd cholesky_row(const Eigen::Ref<const Eigen::VectorXd>& row_angles) {
  const Eigen::Index m = row_angles.size();
  Eigen::VectorXd row(m + 1);
  // Columns are filled from the diagonal leftwards, each taking a cosine of
  // the next angle times the running product of sines.
  double prod = 1.0;
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    row(m - j) = prod * std::cos(row_angles(j));
    prod *= std::sin(row_angles(j));
  }
  if (m == 0) {
    row(0) = 1.0;
    return row;
  }
  row(1) = prod * std::cos(row_angles(m - 1));
  row(0) = prod * std::sin(row_angles(m - 1));
  return row;
}

CholeskyFactor angles_to_cholesky(const AngularVector& omega) {
  const auto n = static_cast<Eigen::Index>(omega.dim());
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  lower(0, 0) = 1.0;
  const Eigen::VectorXd& w = omega.values();
  Eigen::Index offset = 0;
  for (Eigen::Index m = 1; m < n; ++m) {
    lower.row(m).head(m + 1) = cholesky_row(w.segment(offset, m)).transpose();
    offset += m;
  }
  return {std::move(lower)};
}

CorrelationMatrix phi_to_corr(const AngularVector& omega) {
  const Eigen::MatrixXd l = angles_to_cholesky(omega).lower;
  const Eigen::Index n = l.rows();
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = l.row(i).head(j + 1).dot(l.row(j).head(j + 1));
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return CorrelationMatrix(std::move(c));
}

AngularVector corr_to_phi(const CorrelationMatrix& c) {
  const Eigen::Index n = static_cast<Eigen::Index>(c.dim());
  Eigen::LLT<Eigen::MatrixXd> llt(c.matrix());
  if (llt.info() != Eigen::Success) {
    throw CorrelationError({"Cholesky factorization failed: matrix is not positive definite"});
  }
  const Eigen::MatrixXd l = llt.matrixL();
  if (n > 1 && !(l.diagonal().minCoeff() > 0.0)) {
    throw CorrelationError({"Cholesky factor has a zero pivot: matrix is singular"});
  }

  Eigen::VectorXd angles(static_cast<Eigen::Index>(angle_count(c.dim())));
  Eigen::Index offset = 0;
  for (Eigen::Index m = 1; m < n; ++m) {
    // tail(g) = norm of row entries in columns [0, g].
    Eigen::VectorXd tail(m + 1);
    double acc = 0.0;
    for (Eigen::Index g = 0; g <= m; ++g) {
      acc += l(m, g) * l(m, g);
      tail(g) = std::sqrt(acc);
    }
    for (Eigen::Index j = 0; j + 1 < m; ++j) {
      angles(offset + j) = tail_angle(tail(m - j - 1), l(m, m - j));
    }
    double last = tail_angle(std::abs(l(m, 0)), l(m, 1));
    if (l(m, 0) < 0.0) last = -last;
    if (m >= 2) last = positive_mod(last, 2 * kPi);
    angles(offset + m - 1) = last;
    offset += m;
  }
  return AngularVector(c.dim(), std::move(angles));
}

AngularVector wrap(const Eigen::VectorXd& phi) {
  const std::size_t d = dimension_for_angle_count(static_cast<std::size_t>(phi.size()));
  Eigen::VectorXd out(phi.size());
  Eigen::Index n = 0;
  for (std::size_t m = 2; m <= d; ++m) {
    for (std::size_t k = 1; k < m; ++k, ++n) out(n) = wrap_angle(phi(n), wrap_kind({m, k}));
  }
  return AngularVector(d, std::move(out));
}

CorrelationMatrix corr_from_unconstrained(const Eigen::VectorXd& phi) {
  return phi_to_corr(wrap(phi));
}

}  // namespace bloc
