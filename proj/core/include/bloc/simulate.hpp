#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bloc/datagen.hpp"
#include "bloc/estimate.hpp"

namespace bloc {

struct SimulationConfig {
  TruthSpec truth;             ///< truth.seed is ignored; each replication derives its own
  std::size_t n = 50;
  std::size_t replications = 10;
  std::uint64_t seed = 0;
  EstimateOptions estimate;
  int parallelism = 1;         ///< replications run concurrently when > 1
};

struct SimulationRow {
  std::size_t replication = 0;
  std::string design;
  std::size_t d = 0;
  std::size_t n = 0;
  std::string method;
  double lambda = 0.0;
  MetricsReport metrics;
  double seconds = 0.0;
  bool monotone = true;  ///< every optimizer trace on the lambda path
};

struct MeanStderr {
  double mean = 0.0;
  double stderr_value = 0.0;
};

struct SimulationSummary {
  MeanStderr tpr, fpr, mcc, rmse, mad, frob, spec, seconds;
};

struct SimulationResult {
  std::vector<SimulationRow> rows;
  SimulationSummary summary;
};

/// Replication r draws its truth with seed + 2r and its sample with seed + 2r + 1.
SimulationResult run_simulation(const SimulationConfig& config);

SimulationSummary summarize(const std::vector<SimulationRow>& rows);

}  // namespace bloc
