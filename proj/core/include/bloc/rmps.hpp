#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bloc/corrspace.hpp"
#include "bloc/objective.hpp"

namespace bloc {

enum class RestartMode {
  WarmBest,    ///< next run starts from the end point of the previous run
  GridRandom,  ///< next run starts from a uniform draw on a refining lattice
};

RestartMode parse_restart_mode(std::string_view name);
std::string_view to_string(RestartMode mode) noexcept;

/// Hyperparameters of the recursive modified pattern search.
struct OptimizerConfig {
  double s_initial = 1.0;  ///< step size at the start of every run
  double rho = 2.0;        ///< step divisor, > 1
  double kappa = 1e-6;     ///< step floor; a run stops once the step is <= kappa
  double tau1 = 1e-8;      ///< improvements below this shrink the step
  double tau2 = 1e-6;      ///< runs stop once consecutive run values differ by less
  int max_iter = 10000;    ///< iteration cap per run
  int max_run = 10;        ///< total number of runs allowed

  RestartMode restart_mode = RestartMode::WarmBest;
  double grid_mesh_initial = 0.5;  ///< lattice spacing used for run 2
  double grid_mesh_divisor = 2.0;  ///< spacing divisor applied per later run
  double grid_offset = 0.0;        ///< lattice phase, same for every coordinate

  std::uint64_t seed = 0;
  int parallelism = 0;  ///< worker threads for candidate polling; 0 or 1 = serial

  /// Shrink only after an iteration with no accepted move, instead of the
  /// default rule that also shrinks after a sub-tau1 improvement.
  bool strict_failure_shrink = false;
  /// Reuse the known value of the current point instead of re-evaluating it
  /// at the start of every iteration. Results are identical for pure objectives.
  bool cache_current_value = true;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

/// Fast path for polling: scores single-coordinate moves around a prepared
/// base point without a full evaluation. candidate() must be safe to call
/// concurrently between prepare() calls.
class CoordinateModel {
 public:
  virtual ~CoordinateModel() = default;
  /// Returns false when the base point is unsupported; polling then falls
  /// back to full evaluations.
  virtual bool prepare(const Eigen::VectorXd& phi) = 0;
  /// Objective with 0-based coordinate index set to the wrapped angle.
  virtual double candidate(std::size_t index, double angle) const = 0;
};

using CoordinateModelFactory = std::function<std::unique_ptr<CoordinateModel>()>;

/// Pullback objective over unconstrained angle parameters.
struct Evaluator {
  std::function<double(const Eigen::VectorXd&)> fn;
  bool concurrency_safe = true;
  CoordinateModelFactory model;  ///< optional
};

/// Row-update model for the Gaussian and Frobenius losses: one angle moves
/// one row of the Cholesky factor, so a candidate costs O(d^2) instead of a
/// full factorization. Empty for black-box losses.
CoordinateModelFactory make_coordinate_model(const ObjectiveSpec& spec);

/// Wraps pullback_value(spec, .) for the engine, with the row-update model
/// attached when available.
Evaluator make_evaluator(ObjectiveSpec spec);

struct TraceRow {
  int run = 0;
  int iteration = 0;  ///< 0 marks the starting point of a run
  double step_size = 0.0;
  double best_value = 0.0;     ///< best value seen so far across all runs
  double current_value = 0.0;  ///< value of the current iterate of this run
  std::int64_t evaluations = 0;
};

struct RunResult {
  Eigen::VectorXd best_phi;
  double best_value = kInfeasible;
  CorrelationMatrix best_corr = CorrelationMatrix::identity(1);
  std::vector<TraceRow> trace;
  std::vector<double> run_values;  ///< final value of each completed run
  std::int64_t evaluations = 0;
  int runs_completed = 0;
};

/// Raised when the objective fails at an iterate (not merely at a candidate).
/// Carries the partial result accumulated so far.
class OptimizationAborted : public std::runtime_error {
 public:
  OptimizationAborted(const std::string& what, RunResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  const RunResult& partial() const noexcept { return partial_; }

 private:
  RunResult partial_;
};

/// Outcome of one polling step. h_best is 1-based: candidate h perturbs
/// coordinate (h + 1) / 2 by (-1)^h * step.
struct PollResult {
  std::size_t h_best = 0;
  double f_best = kInfeasible;
  std::vector<double> values;
  std::size_t failures = 0;
};

/// True when the best-ever values of the trace never increase.
bool trace_monotone(const RunResult& result);

class WorkerPool;

/// Evaluates all 2N coordinate candidates around phi. Candidates whose
/// evaluation throws or returns NaN/+inf get kInfeasible; if every candidate
/// fails, std::runtime_error is thrown. The argmin takes the smallest h on
/// ties, independent of evaluation order.
/// A model prepared at phi, if given, replaces full evaluations.
PollResult poll_candidates(const Eigen::VectorXd& phi, double step, const Evaluator& evaluator,
                           WorkerPool* pool = nullptr, const CoordinateModel* model = nullptr);

/// Candidate h (1-based) around phi: one coordinate moved and re-wrapped.
Eigen::VectorXd make_candidate(const Eigen::VectorXd& phi, std::size_t h, double step,
                               const std::vector<WrapKind>& kinds);

/// Max-norm of the central finite-difference gradient of the evaluator at phi.
double stationarity_check(const Evaluator& evaluator, const Eigen::VectorXd& phi, double h = 1e-5);
double stationarity_check(const ObjectiveSpec& spec, const Eigen::VectorXd& phi, double h = 1e-5);

/// Runs the pattern search from an unconstrained starting point.
RunResult optimize(const Evaluator& evaluator, const Eigen::VectorXd& phi0,
                   const OptimizerConfig& config);

/// Runs the pattern search from a correlation matrix, converted to angles.
RunResult optimize(const Evaluator& evaluator, const CorrelationMatrix& init,
                   const OptimizerConfig& config);

RunResult optimize(const ObjectiveSpec& spec, const CorrelationMatrix& init,
                   const OptimizerConfig& config);

/// Fixed-size thread pool used for candidate polling.
class WorkerPool {
 public:
  explicit WorkerPool(int threads);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int threads() const noexcept { return threads_; }

  /// Calls body(i) for every i in [0, n); returns when all calls finished.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

 private:
  struct Impl;
  int threads_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bloc
