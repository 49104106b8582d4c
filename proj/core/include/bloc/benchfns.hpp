#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bloc/corrspace.hpp"
#include "bloc/rmps.hpp"

namespace bloc {

enum class BenchmarkFunction { Ackley, Griewank, Rosenbrock, Rastrigin };

BenchmarkFunction parse_benchmark_function(std::string_view name);
std::string_view to_string(BenchmarkFunction fn) noexcept;

/// Multiplier applied to the off-diagonal entries before evaluation.
double default_scale(BenchmarkFunction fn) noexcept;

struct BenchmarkSpec {
  BenchmarkFunction fn = BenchmarkFunction::Ackley;
  std::size_t d = 5;
  double scale = 10.0;

  static BenchmarkSpec make(BenchmarkFunction fn, std::size_t d);
};

/// Classical test functions on R^n.
double ackley(const Eigen::VectorXd& x);
double griewank(const Eigen::VectorXd& x);
double rastrigin(const Eigen::VectorXd& x);
double rosenbrock(const Eigen::VectorXd& x);
double classical_value(BenchmarkFunction fn, const Eigen::VectorXd& x);

/// All ordered off-diagonal entries c_pq, p != q, row-major; length d(d-1).
Eigen::VectorXd ordered_off_diagonal(const Eigen::MatrixXd& c);

double bench_value(const BenchmarkSpec& spec, const CorrelationMatrix& c);
double bench_value(const BenchmarkSpec& spec, const Eigen::MatrixXd& c);

/// Evaluator over unconstrained angles for the optimizer.
Evaluator bench_evaluator(const BenchmarkSpec& spec);

/// Uniform angles over one period per coordinate, folded into the domain.
Eigen::VectorXd random_angles(std::size_t d, std::uint64_t seed);

struct BenchmarkRep {
  double value = 0.0;
  double seconds = 0.0;
  std::int64_t evaluations = 0;
  bool monotone = true;  ///< best-ever trace non-increasing
};

struct BenchmarkSummary {
  BenchmarkSpec spec;
  std::vector<BenchmarkRep> reps;
  double min_value = 0.0;
  double stderr_value = 0.0;   ///< standard error of the per-rep values
  double mean_seconds = 0.0;
  double stderr_seconds = 0.0;
};

/// Runs reps independent optimizations from random initial angles; rep r
/// uses seed + r for its start and restart draws.
BenchmarkSummary run_benchmark(const BenchmarkSpec& spec, std::size_t reps,
                               const OptimizerConfig& config, std::uint64_t seed);

/// Mean and standard error; the standard error is 0 for fewer than two values.
std::pair<double, double> mean_stderr(const std::vector<double>& values);

}  // namespace bloc
