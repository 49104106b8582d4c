#include "bloc/penalty.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bloc {

PenaltyFamily parse_penalty_family(std::string_view name) {
  if (name == "none") return PenaltyFamily::None;
  if (name == "l1" || name == "lasso") return PenaltyFamily::L1;
  if (name == "scad") return PenaltyFamily::SCAD;
  if (name == "mcp") return PenaltyFamily::MCP;
  throw std::invalid_argument("unknown penalty family '" + std::string(name) +
                              "' (expected none, l1, scad or mcp)");
}

std::string_view to_string(PenaltyFamily family) noexcept {
  switch (family) {
    case PenaltyFamily::None: return "none";
    case PenaltyFamily::L1: return "l1";
    case PenaltyFamily::SCAD: return "scad";
    case PenaltyFamily::MCP: return "mcp";
  }
  return "?";
}

PenaltySpec PenaltySpec::none() { return {}; }

PenaltySpec PenaltySpec::l1(double lambda) { return make(PenaltyFamily::L1, lambda); }

PenaltySpec PenaltySpec::scad(double lambda, double a) {
  return make(PenaltyFamily::SCAD, lambda, a);
}

PenaltySpec PenaltySpec::mcp(double lambda, double gamma) {
  return make(PenaltyFamily::MCP, lambda, gamma);
}

PenaltySpec PenaltySpec::make(PenaltyFamily family, double lambda, double shape) {
  PenaltySpec spec;
  spec.family = family;
  spec.lambda = lambda;
  if (shape <= 0.0) {
    shape = family == PenaltyFamily::SCAD  ? kDefaultScadShape
            : family == PenaltyFamily::MCP ? kDefaultMcpShape
                                           : 0.0;
  }
  spec.shape = shape;
  spec.validate();
  return spec;
}

void validate_mask(const Eigen::MatrixXd& mask) {
  if (mask.rows() != mask.cols()) throw std::invalid_argument("penalty mask must be square");
  if (!mask.allFinite()) throw std::invalid_argument("penalty mask has non-finite entries");
  if ((mask - mask.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument("penalty mask must be symmetric");
  }
  if (mask.minCoeff() < 0.0) throw std::invalid_argument("penalty mask must be nonnegative");
  if (mask.rows() > 0 && mask.diagonal().cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument("penalty mask must have a zero diagonal");
  }
}

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("penalty lambda must be finite and >= 0");
  }
  if (family == PenaltyFamily::SCAD && !(shape > 2.0)) {
    throw std::invalid_argument("SCAD shape a must be > 2");
  }
  if (family == PenaltyFamily::MCP && !(shape > 1.0)) {
    throw std::invalid_argument("MCP shape gamma must be > 1");
  }
  if (mask) validate_mask(*mask);
}

double penalty_value(const PenaltySpec& spec, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("penalty_value: argument must be >= 0");
  const double lam = spec.lambda;
  switch (spec.family) {
    case PenaltyFamily::None: return 0.0;
    case PenaltyFamily::L1: return lam * t;
    case PenaltyFamily::SCAD: {
      const double a = spec.shape;
      if (t <= lam) return lam * t;
      if (t <= a * lam) return (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0));
      return lam * lam * (a + 1.0) / 2.0;
    }
    case PenaltyFamily::MCP: {
      const double g = spec.shape;
      if (t <= g * lam) return lam * t - t * t / (2.0 * g);
      return g * lam * lam / 2.0;
    }
  }
  return 0.0;
}

double penalty_derivative(const PenaltySpec& spec, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("penalty_derivative: argument must be > 0");
  const double lam = spec.lambda;
  switch (spec.family) {
    case PenaltyFamily::None: return 0.0;
    case PenaltyFamily::L1: return lam;
    case PenaltyFamily::SCAD: {
      const double a = spec.shape;
      if (t <= lam) return lam;
      if (t <= a * lam) return (a * lam - t) / (a - 1.0);
      return 0.0;
    }
    case PenaltyFamily::MCP: {
      const double g = spec.shape;
      if (t <= g * lam) return lam - t / g;
      return 0.0;
    }
  }
  return 0.0;
}

double penalty_sum(const PenaltySpec& spec, const Eigen::MatrixXd& c) {
  if (spec.mask && (spec.mask->rows() != c.rows() || spec.mask->cols() != c.cols())) {
    throw std::invalid_argument("penalty mask is " + std::to_string(spec.mask->rows()) + "x" +
                                std::to_string(spec.mask->cols()) + " but matrix is " +
                                std::to_string(c.rows()) + "x" + std::to_string(c.cols()));
  }
  if (spec.family == PenaltyFamily::None || spec.lambda == 0.0) return 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < c.rows(); ++i) {
      const double w = spec.mask ? (*spec.mask)(i, j) : 1.0;
      if (w == 0.0) continue;
      total += w * penalty_value(spec, std::abs(c(i, j)));
    }
  }
  // Each unordered pair appears twice in the sum over i != j.
  return 2.0 * total;
}

double penalty_sum(const PenaltySpec& spec, const CorrelationMatrix& c) {
  return penalty_sum(spec, c.matrix());
}

}  // namespace bloc
