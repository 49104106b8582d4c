#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "bloc/corrspace.hpp"

namespace bloc {

enum class PenaltyFamily { None, L1, SCAD, MCP };

PenaltyFamily parse_penalty_family(std::string_view name);
std::string_view to_string(PenaltyFamily family) noexcept;

inline constexpr double kDefaultScadShape = 3.7;
inline constexpr double kDefaultMcpShape = 3.0;

/// Coordinate-wise penalty applied to off-diagonal correlations.
///
/// `shape` is the SCAD `a` (> 2) or the MCP `gamma` (> 1) and is ignored by the
/// other families. `mask`, when present, holds nonnegative pair weights with a
/// zero diagonal; a 0/1 mask selects which pairs are penalized at all.
struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::None;
  double lambda = 0.0;
  double shape = 0.0;
  std::optional<Eigen::MatrixXd> mask;

  static PenaltySpec none();
  static PenaltySpec l1(double lambda);
  static PenaltySpec scad(double lambda, double a = kDefaultScadShape);
  static PenaltySpec mcp(double lambda, double gamma = kDefaultMcpShape);

  /// Builds a spec with the family's default shape when shape <= 0.
  static PenaltySpec make(PenaltyFamily family, double lambda, double shape = 0.0);

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

/// Throws std::invalid_argument unless the mask is square, symmetric,
/// nonnegative and has a zero diagonal.
void validate_mask(const Eigen::MatrixXd& mask);

/// p_lambda(t) for t >= 0.
double penalty_value(const PenaltySpec& spec, double t);

/// Sum over ordered pairs i != j of w_ij * p_lambda(|c_ij|).
double penalty_sum(const PenaltySpec& spec, const CorrelationMatrix& c);

/// Same as above on a raw symmetric matrix (no correlation checks).
double penalty_sum(const PenaltySpec& spec, const Eigen::MatrixXd& c);

/// d/dt p_lambda(t) for t > 0; one-sided (left) value at kinks.
double penalty_derivative(const PenaltySpec& spec, double t);

}  // namespace bloc
