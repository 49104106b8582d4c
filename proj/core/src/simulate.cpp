#include "bloc/simulate.hpp"

#include <chrono>
#include <stdexcept>

#include "bloc/benchfns.hpp"

namespace bloc {

namespace {

SimulationRow replicate(const SimulationConfig& config, std::size_t r) {
  TruthSpec truth_spec = config.truth;
  truth_spec.seed = config.seed + 2 * r;
  const Truth truth = gen_truth(truth_spec);
  const DataMatrix x = sample_mvn(truth.matrix, config.n, config.seed + 2 * r + 1);

  const auto start = std::chrono::steady_clock::now();
  const EstimateResult fit = estimate(x, config.estimate);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  SimulationRow row;
  row.replication = r;
  row.design = std::string(to_string(config.truth.design));
  row.d = config.truth.d;
  row.n = config.n;
  row.method = std::string(to_string(config.estimate.penalty));
  row.lambda = fit.lambda_used;
  row.metrics = compute_metrics(truth.matrix, truth.support, fit.gamma_hat.matrix(), fit.support);
  row.seconds = elapsed.count();
  for (const LambdaScore& s : fit.path) row.monotone = row.monotone && s.monotone;
  return row;
}

MeanStderr column(const std::vector<SimulationRow>& rows, double (*get)(const SimulationRow&)) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& row : rows) v.push_back(get(row));
  const auto [mean, se] = mean_stderr(v);
  return {mean, se};
}

}  // namespace

SimulationSummary summarize(const std::vector<SimulationRow>& rows) {
  SimulationSummary s;
  s.tpr = column(rows, [](const SimulationRow& r) { return r.metrics.tpr; });
  s.fpr = column(rows, [](const SimulationRow& r) { return r.metrics.fpr; });
  s.mcc = column(rows, [](const SimulationRow& r) { return r.metrics.mcc; });
  s.rmse = column(rows, [](const SimulationRow& r) { return r.metrics.rmse; });
  s.mad = column(rows, [](const SimulationRow& r) { return r.metrics.mad; });
  s.frob = column(rows, [](const SimulationRow& r) { return r.metrics.frob_err; });
  s.spec = column(rows, [](const SimulationRow& r) { return r.metrics.spec_err; });
  s.seconds = column(rows, [](const SimulationRow& r) { return r.seconds; });
  return s;
}

SimulationResult run_simulation(const SimulationConfig& config) {
  if (config.replications == 0) throw std::invalid_argument("simulate: replications must be >= 1");
  if (config.n < 2) throw std::invalid_argument("simulate: n must be >= 2");
  config.truth.validate();

  SimulationResult result;
  result.rows.resize(config.replications);
  if (config.parallelism > 1) {
    WorkerPool pool(config.parallelism);
    pool.parallel_for(config.replications,
                      [&](std::size_t r) { result.rows[r] = replicate(config, r); });
  } else {
    for (std::size_t r = 0; r < config.replications; ++r) result.rows[r] = replicate(config, r);
  }
  result.summary = summarize(result.rows);
  return result;
}

}  // namespace bloc
