#include "bloc/rmps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace bloc {

RestartMode parse_restart_mode(std::string_view name) {
  if (name == "warm") return RestartMode::WarmBest;
  if (name == "grid") return RestartMode::GridRandom;
  throw std::invalid_argument("unknown restart mode '" + std::string(name) +
                              "' (expected warm or grid)");
}

std::string_view to_string(RestartMode mode) noexcept {
  return mode == RestartMode::WarmBest ? "warm" : "grid";
}

void OptimizerConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("optimizer: " + msg); };
  if (!(s_initial > 0.0) || !std::isfinite(s_initial)) fail("s_initial must be > 0");
  if (!(rho > 1.0) || !std::isfinite(rho)) fail("rho must be > 1");
  if (!(kappa > 0.0)) fail("kappa must be > 0");
  if (!(kappa < s_initial)) fail("kappa must be < s_initial");
  if (!(tau1 >= 0.0)) fail("tau1 must be >= 0");
  if (!(tau2 >= 0.0)) fail("tau2 must be >= 0");
  if (max_iter < 1) fail("max_iter must be >= 1");
  if (max_run < 1) fail("max_run must be >= 1");
  if (parallelism < 0) fail("parallelism must be >= 0");
  if (restart_mode == RestartMode::GridRandom) {
    if (!(grid_mesh_initial > 0.0)) fail("grid_mesh_initial must be > 0");
    if (!(grid_mesh_divisor >= 1.0)) fail("grid_mesh_divisor must be >= 1");
    if (!std::isfinite(grid_offset)) fail("grid_offset must be finite");
  }
}

Evaluator make_evaluator(ObjectiveSpec spec) {
  spec.validate();
  const bool safe = spec.loss.concurrency_safe;
  CoordinateModelFactory model = make_coordinate_model(spec);
  return Evaluator{[spec = std::move(spec)](const Eigen::VectorXd& phi) {
                     return pullback_value(spec, phi);
                   },
                   safe, std::move(model)};
}

// ---------------------------------------------------------------------------
// WorkerPool

struct WorkerPool::Impl {
  explicit Impl(int threads) : arena(threads) {}
  tbb::task_arena arena;
};

WorkerPool::WorkerPool(int threads)
    : threads_(std::max(threads, 1)), impl_(std::make_unique<Impl>(threads_)) {}

WorkerPool::~WorkerPool() = default;

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  impl_->arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 1),
                      [&](const tbb::blocked_range<std::size_t>& r) {
                        for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
                      });
  });
}

// ---------------------------------------------------------------------------
// Polling

namespace {

template <typename F>
double guarded(F&& f, bool& failed) {
  failed = false;
  try {
    const double v = f();
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      failed = true;
      return kInfeasible;
    }
    return v;
  } catch (const std::exception&) {
    failed = true;
    return kInfeasible;
  }
}

double guarded_value(const Evaluator& evaluator, const Eigen::VectorXd& phi, bool& failed) {
  return guarded([&] { return evaluator.fn(phi); }, failed);
}

}  // namespace

Eigen::VectorXd make_candidate(const Eigen::VectorXd& phi, std::size_t h, double step,
                               const std::vector<WrapKind>& kinds) {
  const std::size_t i = (h + 1) / 2 - 1;
  const double signed_step = (h % 2 == 0) ? step : -step;
  Eigen::VectorXd candidate = phi;
  const auto idx = static_cast<Eigen::Index>(i);
  candidate(idx) = wrap_angle(phi(idx) + signed_step, kinds[i]);
  return candidate;
}

PollResult poll_candidates(const Eigen::VectorXd& phi, double step, const Evaluator& evaluator,
                           WorkerPool* pool, const CoordinateModel* model) {
  if (!(step > 0.0)) throw std::invalid_argument("poll_candidates: step must be > 0");
  const std::size_t n = static_cast<std::size_t>(phi.size());
  const std::size_t d = dimension_for_angle_count(n);
  const std::vector<WrapKind> kinds = wrap_kinds(d);
  const std::size_t count = 2 * n;

  PollResult result;
  result.values.assign(count, kInfeasible);
  std::vector<char> failed(count, 0);

  auto evaluate = [&](std::size_t slot) {
    bool f = false;
    if (model != nullptr) {
      const std::size_t i = slot / 2;
      const double signed_step = slot % 2 == 1 ? step : -step;
      const auto idx = static_cast<Eigen::Index>(i);
      const double angle = wrap_angle(phi(idx) + signed_step, kinds[i]);
      result.values[slot] = guarded([&] { return model->candidate(i, angle); }, f);
    } else {
      const Eigen::VectorXd candidate = make_candidate(phi, slot + 1, step, kinds);
      result.values[slot] = guarded_value(evaluator, candidate, f);
    }
    failed[slot] = f ? 1 : 0;
  };

  if (pool != nullptr && pool->threads() > 1 && evaluator.concurrency_safe) {
    pool->parallel_for(count, evaluate);
  } else {
    for (std::size_t slot = 0; slot < count; ++slot) evaluate(slot);
  }

  result.failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  if (count > 0 && result.failures == count) {
    throw std::runtime_error("poll_candidates: objective failed at all " +
                             std::to_string(count) + " candidates");
  }
  // Serial reduction over the indexed buffer: strict < keeps the smallest h.
  for (std::size_t slot = 0; slot < count; ++slot) {
    if (result.h_best == 0 || result.values[slot] < result.f_best) {
      result.h_best = slot + 1;
      result.f_best = result.values[slot];
    }
  }
  return result;
}

bool trace_monotone(const RunResult& result) {
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    if (result.trace[i].best_value > result.trace[i - 1].best_value) return false;
  }
  return true;
}

double stationarity_check(const Evaluator& evaluator, const Eigen::VectorXd& phi, double h) {
  double norm = 0.0;
  Eigen::VectorXd probe = phi;
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    probe(i) = phi(i) + h;
    const double up = evaluator.fn(probe);
    probe(i) = phi(i) - h;
    const double down = evaluator.fn(probe);
    probe(i) = phi(i);
    norm = std::max(norm, std::abs(up - down) / (2.0 * h));
  }
  return norm;
}

double stationarity_check(const ObjectiveSpec& spec, const Eigen::VectorXd& phi, double h) {
  return stationarity_check(make_evaluator(spec), phi, h);
}

// ---------------------------------------------------------------------------
// Engine

namespace {

// Lower end of the one-period box for each wrap rule.
double box_lower(WrapKind kind) {
  return kind == WrapKind::FirstRow ? -std::numbers::pi / 2 : 0.0;
}

// Uniform draw from box ∩ (offset + mesh * Z^N), coordinate by coordinate.
Eigen::VectorXd draw_grid_point(const std::vector<WrapKind>& kinds, double mesh, double offset,
                                std::mt19937_64& rng) {
  Eigen::VectorXd point(static_cast<Eigen::Index>(kinds.size()));
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const double lo = box_lower(kinds[i]);
    const double hi = lo + wrap_period(kinds[i]);
    auto first = static_cast<std::int64_t>(std::ceil((lo - offset) / mesh));
    auto last = static_cast<std::int64_t>(std::ceil((hi - offset) / mesh)) - 1;
    while (offset + static_cast<double>(first) * mesh < lo) ++first;
    while (last >= first && offset + static_cast<double>(last) * mesh >= hi) --last;
    if (last < first) last = first;  // mesh wider than the box: single point
    std::uniform_int_distribution<std::int64_t> pick(first, last);
    point(static_cast<Eigen::Index>(i)) = offset + static_cast<double>(pick(rng)) * mesh;
  }
  return point;
}

class Engine {
 public:
  Engine(const Evaluator& evaluator, const OptimizerConfig& config, std::size_t n)
      : evaluator_(evaluator),
        config_(config),
        kinds_(wrap_kinds(dimension_for_angle_count(n))),
        rng_(config.seed) {
    if (config.parallelism > 1 && evaluator.concurrency_safe) {
      pool_ = std::make_unique<WorkerPool>(config.parallelism);
    }
    if (evaluator.model) model_ = evaluator.model();
  }

  RunResult run(const Eigen::VectorXd& phi0) {
    result_.best_phi = phi0;
    Eigen::VectorXd start = phi0;
    double previous_run_value = 0.0;

    for (int r = 1;; ++r) {
      if (r > 1) start = restart_point(r);
      const auto [end_phi, end_value] = single_run(r, start);
      result_.runs_completed = r;
      result_.run_values.push_back(end_value);
      start = end_phi;

      if (r >= config_.max_run) break;
      if (r > 1 && std::abs(end_value - previous_run_value) < config_.tau2) break;
      previous_run_value = end_value;
    }
    result_.best_corr = corr_from_unconstrained(result_.best_phi);
    return std::move(result_);
  }

 private:
  double evaluate_iterate(const Eigen::VectorXd& phi) {
    ++result_.evaluations;
    bool failed = false;
    const double v = guarded_value(evaluator_, phi, failed);
    if (failed) {
      abort("objective evaluation failed at the current iterate");
    }
    note(phi, v);
    return v;
  }

  void note(const Eigen::VectorXd& phi, double v) {
    if (v < result_.best_value) {
      result_.best_value = v;
      result_.best_phi = phi;
    }
  }

  const CoordinateModel* prepared_model(const Eigen::VectorXd& phi) {
    if (!model_) return nullptr;
    if (!model_ready_ || model_phi_.size() != phi.size() || model_phi_ != phi) {
      model_phi_ = phi;
      model_ready_ = model_->prepare(phi);
    }
    return model_ready_ ? model_.get() : nullptr;
  }

  [[noreturn]] void abort(const std::string& why) {
    if (result_.best_value < kInfeasible) {
      result_.best_corr = corr_from_unconstrained(result_.best_phi);
    }
    throw OptimizationAborted(why, result_);
  }

  Eigen::VectorXd restart_point(int r) {
    if (config_.restart_mode == RestartMode::WarmBest) return last_run_end_;
    const double mesh = config_.grid_mesh_initial / std::pow(config_.grid_mesh_divisor, r - 2);
    return draw_grid_point(kinds_, mesh, config_.grid_offset, rng_);
  }

  std::pair<Eigen::VectorXd, double> single_run(int r, Eigen::VectorXd phi) {
    double step = config_.s_initial;
    double current = kInfeasible;
    bool have_current = false;
    if (config_.cache_current_value) {
      current = evaluate_iterate(phi);
      have_current = true;
    }
    result_.trace.push_back({r, 0, step, result_.best_value, current, result_.evaluations});

    for (int j = 1; j <= config_.max_iter && step > config_.kappa; ++j) {
      const double f1 = config_.cache_current_value ? current : evaluate_iterate(phi);

      PollResult poll;
      try {
        poll = poll_candidates(phi, step, evaluator_, pool_.get(), prepared_model(phi));
      } catch (const std::runtime_error& e) {
        result_.evaluations += static_cast<std::int64_t>(2 * phi.size());
        abort(e.what());
      }
      result_.evaluations += static_cast<std::int64_t>(poll.values.size());
      const double f2 = poll.f_best;

      bool accepted = false;
      if (f2 < f1) {
        phi = make_candidate(phi, poll.h_best, step, kinds_);
        current = f2;
        accepted = true;
        note(phi, f2);
      } else {
        current = f1;
      }
      have_current = true;

      const bool shrink = config_.strict_failure_shrink
                              ? !accepted
                              : (j > 1 && std::abs(f1 - std::min(f1, f2)) < config_.tau1);
      if (shrink && step > config_.kappa) step /= config_.rho;

      result_.trace.push_back({r, j, step, result_.best_value, current, result_.evaluations});
    }

    if (!config_.cache_current_value || !have_current) current = evaluate_iterate(phi);
    last_run_end_ = phi;
    return {phi, current};
  }

  const Evaluator& evaluator_;
  const OptimizerConfig& config_;
  std::vector<WrapKind> kinds_;
  std::mt19937_64 rng_;
  std::unique_ptr<WorkerPool> pool_;
  std::unique_ptr<CoordinateModel> model_;
  Eigen::VectorXd model_phi_;
  bool model_ready_ = false;
  RunResult result_;
  Eigen::VectorXd last_run_end_;
};

}  // namespace

RunResult optimize(const Evaluator& evaluator, const Eigen::VectorXd& phi0,
                   const OptimizerConfig& config) {
  config.validate();
  if (!evaluator.fn) throw std::invalid_argument("optimize: evaluator has no function");
  if (!phi0.allFinite()) throw std::invalid_argument("optimize: starting point is not finite");
  const std::size_t n = static_cast<std::size_t>(phi0.size());
  if (n == 0) throw std::invalid_argument("optimize: nothing to optimize for d = 1");
  Engine engine(evaluator, config, n);
  return engine.run(phi0);
}

RunResult optimize(const Evaluator& evaluator, const CorrelationMatrix& init,
                   const OptimizerConfig& config) {
  return optimize(evaluator, corr_to_phi(init).values(), config);
}

RunResult optimize(const ObjectiveSpec& spec, const CorrelationMatrix& init,
                   const OptimizerConfig& config) {
  if (init.dim() != spec.dim()) {
    throw std::invalid_argument("optimize: initial matrix dimension does not match objective");
  }
  return optimize(make_evaluator(spec), init, config);
}

}  // namespace bloc
