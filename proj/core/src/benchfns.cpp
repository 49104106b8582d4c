#include "bloc/benchfns.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>

namespace bloc {

BenchmarkFunction parse_benchmark_function(std::string_view name) {
  if (name == "ackley") return BenchmarkFunction::Ackley;
  if (name == "griewank") return BenchmarkFunction::Griewank;
  if (name == "rosenbrock") return BenchmarkFunction::Rosenbrock;
  if (name == "rastrigin") return BenchmarkFunction::Rastrigin;
  throw std::invalid_argument("unknown benchmark function '" + std::string(name) +
                              "' (expected ackley, griewank, rosenbrock or rastrigin)");
}

std::string_view to_string(BenchmarkFunction fn) noexcept {
  switch (fn) {
    case BenchmarkFunction::Ackley: return "ackley";
    case BenchmarkFunction::Griewank: return "griewank";
    case BenchmarkFunction::Rosenbrock: return "rosenbrock";
    case BenchmarkFunction::Rastrigin: return "rastrigin";
  }
  return "?";
}

double default_scale(BenchmarkFunction fn) noexcept {
  switch (fn) {
    case BenchmarkFunction::Ackley: return 10.0;
    case BenchmarkFunction::Griewank: return 100.0;
    case BenchmarkFunction::Rosenbrock: return 100.0;
    case BenchmarkFunction::Rastrigin: return 10.0;
  }
  return 1.0;
}

BenchmarkSpec BenchmarkSpec::make(BenchmarkFunction fn, std::size_t d) {
  if (d < 2) throw std::invalid_argument("benchmark dimension must be >= 2");
  return {fn, d, default_scale(fn)};
}

double ackley(const Eigen::VectorXd& x) {
  const auto n = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / n;
  const double cs = (2.0 * std::numbers::pi * x.array()).cos().sum() / n;
  return -20.0 * std::exp(-0.2 * std::sqrt(sq)) - std::exp(cs) + 20.0 + std::numbers::e;
}

double griewank(const Eigen::VectorXd& x) {
  double prod = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    prod *= std::cos(x(i) / std::sqrt(static_cast<double>(i + 1)));
  }
  return x.squaredNorm() / 4000.0 - prod + 1.0;
}

double rastrigin(const Eigen::VectorXd& x) {
  const auto n = static_cast<double>(x.size());
  return 10.0 * n + (x.array().square() - 10.0 * (2.0 * std::numbers::pi * x.array()).cos()).sum();
}

double rosenbrock(const Eigen::VectorXd& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x(i + 1) - x(i) * x(i);
    const double b = 1.0 - x(i);
    sum += 100.0 * a * a + b * b;
  }
  return sum;
}

double classical_value(BenchmarkFunction fn, const Eigen::VectorXd& x) {
  switch (fn) {
    case BenchmarkFunction::Ackley: return ackley(x);
    case BenchmarkFunction::Griewank: return griewank(x);
    case BenchmarkFunction::Rosenbrock: return rosenbrock(x);
    case BenchmarkFunction::Rastrigin: return rastrigin(x);
  }
  throw std::invalid_argument("unknown benchmark function");
}

Eigen::VectorXd ordered_off_diagonal(const Eigen::MatrixXd& c) {
  const Eigen::Index d = c.rows();
  Eigen::VectorXd x(d * (d - 1));
  Eigen::Index k = 0;
  for (Eigen::Index p = 0; p < d; ++p) {
    for (Eigen::Index q = 0; q < d; ++q) {
      if (p != q) x(k++) = c(p, q);
    }
  }
  return x;
}

double bench_value(const BenchmarkSpec& spec, const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols() || static_cast<std::size_t>(c.rows()) != spec.d) {
    throw std::invalid_argument("bench_value: matrix does not match benchmark dimension");
  }
  return classical_value(spec.fn, spec.scale * ordered_off_diagonal(c));
}

double bench_value(const BenchmarkSpec& spec, const CorrelationMatrix& c) {
  return bench_value(spec, c.matrix());
}

Evaluator bench_evaluator(const BenchmarkSpec& spec) {
  return Evaluator{[spec](const Eigen::VectorXd& phi) {
                     return bench_value(spec, corr_from_unconstrained(phi));
                   },
                   true, {}};
}

Eigen::VectorXd random_angles(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<WrapKind> kinds = wrap_kinds(d);
  Eigen::VectorXd phi(static_cast<Eigen::Index>(kinds.size()));
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const double lo = kinds[i] == WrapKind::FirstRow ? -std::numbers::pi / 2 : 0.0;
    phi(static_cast<Eigen::Index>(i)) = wrap_angle(lo + wrap_period(kinds[i]) * unit(rng), kinds[i]);
  }
  return phi;
}

std::pair<double, double> mean_stderr(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

BenchmarkSummary run_benchmark(const BenchmarkSpec& spec, std::size_t reps,
                               const OptimizerConfig& config, std::uint64_t seed) {
  if (reps == 0) throw std::invalid_argument("run_benchmark: reps must be >= 1");
  BenchmarkSummary summary;
  summary.spec = spec;
  const Evaluator evaluator = bench_evaluator(spec);
  std::vector<double> values;
  std::vector<double> seconds;

  for (std::size_t r = 0; r < reps; ++r) {
    OptimizerConfig cfg = config;
    cfg.seed = seed + r;
    const Eigen::VectorXd phi0 = random_angles(spec.d, seed + r);
    const auto start = std::chrono::steady_clock::now();
    RunResult result = optimize(evaluator, phi0, cfg);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    BenchmarkRep rep;
    rep.value = result.best_value;
    rep.seconds = elapsed.count();
    rep.evaluations = result.evaluations;
    rep.monotone = trace_monotone(result);
    summary.reps.push_back(rep);
    values.push_back(rep.value);
    seconds.push_back(rep.seconds);
  }

  summary.min_value = *std::min_element(values.begin(), values.end());
  summary.stderr_value = mean_stderr(values).second;
  std::tie(summary.mean_seconds, summary.stderr_seconds) = mean_stderr(seconds);
  return summary;
}

}  // namespace bloc
