#include <random>

#include <benchmark/benchmark.h>

#include "bloc/benchfns.hpp"
#include "bloc/corrspace.hpp"
#include "bloc/objective.hpp"
#include "bloc/rmps.hpp"

using namespace bloc;

namespace {

ObjectiveSpec gaussian_problem(std::size_t d) {
  const CorrelationMatrix target = corr_from_unconstrained(random_angles(d, 11));
  return {LossSpec::gaussian(target), PenaltySpec::scad(0.1)};
}

void BM_PhiToCorr(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const AngularVector omega = wrap(random_angles(d, 1));
  for (auto _ : state) benchmark::DoNotOptimize(phi_to_corr(omega));
}
BENCHMARK(BM_PhiToCorr)->Arg(5)->Arg(20)->Arg(50);

void BM_CorrToPhi(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const CorrelationMatrix c = corr_from_unconstrained(random_angles(d, 2));
  for (auto _ : state) benchmark::DoNotOptimize(corr_to_phi(c));
}
BENCHMARK(BM_CorrToPhi)->Arg(5)->Arg(20)->Arg(50);

void BM_Pullback(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const ObjectiveSpec spec = gaussian_problem(d);
  const Eigen::VectorXd phi = random_angles(d, 3);
  for (auto _ : state) benchmark::DoNotOptimize(pullback_value(spec, phi));
}
BENCHMARK(BM_Pullback)->Arg(5)->Arg(20);

void BM_Poll(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const bool with_model = state.range(1) != 0;
  const Evaluator ev = make_evaluator(gaussian_problem(d));
  const Eigen::VectorXd phi = random_angles(d, 4);
  std::unique_ptr<CoordinateModel> model;
  if (with_model) model = ev.model();
  for (auto _ : state) {
    if (model) model->prepare(phi);
    benchmark::DoNotOptimize(poll_candidates(phi, 0.1, ev, nullptr, model.get()));
  }
  state.SetLabel(with_model ? "row update" : "full evaluation");
}
BENCHMARK(BM_Poll)->Args({10, 0})->Args({10, 1})->Args({20, 0})->Args({20, 1});

}  // namespace
BENCHMARK_MAIN();
