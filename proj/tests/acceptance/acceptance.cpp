// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion ids as
// arguments to run a subset, e.g. `bloc_acceptance 1 2 3`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "bloc/benchfns.hpp"
#include "bloc/corrspace.hpp"
#include "bloc/datagen.hpp"
#include "bloc/penalty.hpp"
#include "bloc/rmps.hpp"
#include "bloc/simulate.hpp"
#include "oracles.hpp"

using namespace bloc;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Every optimizer run made by the suite, for the monotone-descent criterion.
struct RunLog {
  int runs = 0;
  std::vector<std::string> violations;

  void add(const std::string& label, bool monotone) {
    ++runs;
    if (!monotone) violations.push_back(label);
  }
  void add(const std::string& label, const RunResult& r) { add(label, trace_monotone(r)); }
};

RunLog g_runs;

void progress(const std::string& msg) {
  std::fprintf(stderr, "  .. %s\n", msg.c_str());
  std::fflush(stderr);
}

// ---------------------------------------------------------------------------

Verdict round_trip() {
  const Stopwatch clock;
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int d : {2, 3, 5, 10, 20}) {
    for (int rep = 0; rep < 100; ++rep) {
      const Eigen::MatrixXd c = oracle::random_correlation(d, rng);
      const CorrelationMatrix back = phi_to_corr(corr_to_phi(CorrelationMatrix::from_matrix(c)));
      worst = std::max(worst, (back.matrix() - c).cwiseAbs().maxCoeff());
    }
  }
  const double t = clock.seconds();
  return {worst < 1e-10 && t < 5.0,
          fmt("max error %.2e (< 1e-10) over 500 matrices, %.2f s (< 5 s)", worst, t)};
}

Verdict wrap_feasibility() {
  const Stopwatch clock;
  std::mt19937_64 rng(202);
  std::normal_distribution<double> wide(0.0, 20.0);
  double min_eig = INFINITY;
  int diag_bad = 0;
  int sym_bad = 0;
  for (int d : {3, 5, 10}) {
    const auto n = static_cast<Eigen::Index>(angle_count(static_cast<std::size_t>(d)));
    for (int rep = 0; rep < 1000; ++rep) {
      Eigen::VectorXd phi(n);
      for (auto& v : phi) v = wide(rng);
      const CorrelationMatrix corr = corr_from_unconstrained(phi);
      const Eigen::MatrixXd& c = corr.matrix();
      diag_bad += !(c.diagonal().array() == 1.0).all();
      sym_bad += !(c.array() == c.transpose().array()).all();
      min_eig = std::min(min_eig, oracle::min_eigenvalue(c));
    }
  }
  const double t = clock.seconds();
  return {diag_bad == 0 && sym_bad == 0 && min_eig >= -1e-12 && t < 10.0,
          fmt("3000 draws: %d diagonal and %d symmetry violations, min eigenvalue %.2e "
              "(>= -1e-12), %.2f s (< 10 s)",
              diag_bad, sym_bad, min_eig, t)};
}

Verdict wrap_laws() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  double worst_idem = 0.0;
  double worst_period = 0.0;
  for (WrapKind kind : {WrapKind::FirstRow, WrapKind::Leading, WrapKind::Interior,
                        WrapKind::Trailing}) {
    const double period = wrap_period(kind);
    for (int i = 0; i < 10000; ++i) {
      const double theta = u(rng);
      const double w = wrap_angle(theta, kind);
      worst_idem = std::max(worst_idem, std::abs(wrap_angle(w, kind) - w));
      double gap = std::abs(wrap_angle(theta + period, kind) - w);
      // 0 and 2 pi name the same trailing angle.
      if (kind == WrapKind::Trailing) gap = std::min(gap, 2 * std::numbers::pi - gap);
      worst_period = std::max(worst_period, gap);
    }
  }
  return {worst_idem <= 1e-12 && worst_period <= 1e-12,
          fmt("4 cases x 1e4 points: idempotence %.2e, periodicity %.2e (<= 1e-12)", worst_idem,
              worst_period)};
}

OptimizerConfig benchmark_config() {
  OptimizerConfig c;
  c.restart_mode = RestartMode::GridRandom;
  c.max_run = 20;
  c.max_iter = 10000;
  c.tau1 = 1e-8;
  c.tau2 = 0.0;
  c.kappa = 1e-14;
  return c;
}

Verdict benchmarks() {
  struct Case {
    BenchmarkFunction fn;
    std::size_t d;
    double limit;  // < 0 means reported only
    double budget;
  };
  const Case cases[] = {
      {BenchmarkFunction::Ackley, 5, 1e-8, 60.0},     {BenchmarkFunction::Ackley, 10, 1e-8, 600.0},
      {BenchmarkFunction::Griewank, 5, 1e-8, 60.0},   {BenchmarkFunction::Griewank, 10, 1e-8, 600.0},
      {BenchmarkFunction::Rastrigin, 5, 2.0, 60.0},   {BenchmarkFunction::Rosenbrock, 5, -1.0, 60.0},
  };
  bool pass = true;
  std::string detail;
  for (const Case& c : cases) {
    const auto s = run_benchmark(BenchmarkSpec::make(c.fn, c.d), 10, benchmark_config(), 1);
    double slowest = 0.0;
    for (std::size_t r = 0; r < s.reps.size(); ++r) {
      slowest = std::max(slowest, s.reps[r].seconds);
      g_runs.add(fmt("%s d=%zu rep %zu", std::string(to_string(c.fn)).c_str(), c.d, r),
                 s.reps[r].monotone);
    }
    const bool ok = c.limit < 0 || (s.min_value <= c.limit && slowest <= c.budget);
    pass = pass && ok;
    const std::string name = std::string(to_string(c.fn)) + " d=" + std::to_string(c.d);
    const std::string gate = c.limit < 0 ? "reported" : fmt("<= %g", c.limit);
    detail += fmt("%s%s best %.3g (%s) slowest rep %.1f s", detail.empty() ? "" : "; ",
                  name.c_str(), s.min_value, gate.c_str(), slowest);
    progress(name + " done");
  }
  return {pass, "best of 10: " + detail};
}

Verdict convex_recovery() {
  const Stopwatch clock;
  std::mt19937_64 rng(505);
  // The identity sits where row sines vanish, so single-start descent from it
  // stalls on the chart; lattice restarts move off that set.
  OptimizerConfig c;
  c.restart_mode = RestartMode::GridRandom;
  c.max_run = 20;
  c.kappa = 1e-10;
  c.tau1 = 1e-14;
  c.tau2 = 0.0;
  double worst_err = 0.0;
  double worst_grad = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const auto target = CorrelationMatrix::from_matrix(oracle::random_correlation(5, rng));
    const ObjectiveSpec spec{LossSpec::frobenius(target), PenaltySpec::none()};
    c.seed = static_cast<std::uint64_t>(rep);
    const RunResult r = optimize(spec, CorrelationMatrix::identity(5), c);
    g_runs.add(fmt("convex recovery %d", rep), r);
    worst_err = std::max(worst_err, (r.best_corr.matrix() - target.matrix()).cwiseAbs().maxCoeff());
    worst_grad = std::max(worst_grad, stationarity_check(spec, r.best_phi));
  }
  const double t = clock.seconds();
  return {worst_err <= 1e-4 && worst_grad <= 1e-3 && t < 30.0,
          fmt("10 targets: max entry error %.2e (<= 1e-4), stationarity %.2e (<= 1e-3), %.2f s "
              "(< 30 s)",
              worst_err, worst_grad, t)};
}

Verdict monotone_descent() {
  if (g_runs.runs == 0) {
    // Run alone: exercise a few problems so the check is not vacuous.
    std::mt19937_64 rng(606);
    for (int rep = 0; rep < 5; ++rep) {
      const auto t = CorrelationMatrix::from_matrix(oracle::random_correlation(6, rng));
      OptimizerConfig c;
      c.restart_mode = rep % 2 ? RestartMode::GridRandom : RestartMode::WarmBest;
      g_runs.add("standalone", optimize({LossSpec::gaussian(t), PenaltySpec::scad(0.1)},
                                        CorrelationMatrix::identity(6), c));
    }
  }
  std::string detail = fmt("%d optimizer runs checked, %zu with an increasing best value",
                           g_runs.runs, g_runs.violations.size());
  if (!g_runs.violations.empty()) detail += " (first: " + g_runs.violations.front() + ")";
  return {g_runs.violations.empty(), detail};
}

Verdict determinism() {
  std::mt19937_64 rng(707);
  const auto t = CorrelationMatrix::from_matrix(oracle::random_correlation(8, rng));
  const ObjectiveSpec spec{LossSpec::gaussian(t), PenaltySpec::scad(0.15)};
  auto run = [&](int parallelism) {
    OptimizerConfig c;
    c.restart_mode = RestartMode::GridRandom;
    c.max_run = 4;
    c.tau2 = 0.0;
    c.seed = 99;
    c.parallelism = parallelism;
    RunResult r = optimize(spec, CorrelationMatrix::identity(8), c);
    g_runs.add(fmt("determinism p=%d", parallelism), r);
    return r;
  };
  const RunResult a = run(1);
  const RunResult b = run(8);
  const RunResult c = run(8);
  auto same = [](const RunResult& x, const RunResult& y) {
    if (x.trace.size() != y.trace.size() || x.best_phi != y.best_phi) return false;
    for (std::size_t i = 0; i < x.trace.size(); ++i) {
      const TraceRow& p = x.trace[i];
      const TraceRow& q = y.trace[i];
      if (p.run != q.run || p.iteration != q.iteration || p.step_size != q.step_size ||
          p.best_value != q.best_value || p.current_value != q.current_value ||
          p.evaluations != q.evaluations) {
        return false;
      }
    }
    return true;
  };
  const bool ok = same(a, b) && same(b, c);
  return {ok, fmt("%zu trace rows, parallelism 1 vs 8 vs 8 %s", a.trace.size(),
                  ok ? "bit-identical" : "differ")};
}

Verdict rate_property() {
  std::mt19937_64 rng(808);
  const auto target = CorrelationMatrix::from_matrix(oracle::random_correlation(3, rng));
  const ObjectiveSpec spec{LossSpec::frobenius(target), PenaltySpec::none()};
  OptimizerConfig c;
  c.strict_failure_shrink = true;
  c.max_run = 1;
  c.kappa = 1e-12;
  const RunResult r = optimize(spec, CorrelationMatrix::identity(3), c);
  g_runs.add("rate property", r);

  // Value gap (minimum is 0 at the target) right after each step reduction.
  std::vector<double> gaps;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    if (r.trace[i].step_size < r.trace[i - 1].step_size) gaps.push_back(r.trace[i].current_value);
  }
  if (gaps.size() < 20) return {false, fmt("only %zu reductions recorded", gaps.size())};
  double bound = 0.0;
  for (std::size_t k = 0; k < 3; ++k) bound = std::max(bound, gaps[k] * static_cast<double>(k + 2));
  double worst = 0.0;
  for (std::size_t k = 0; k < 20; ++k) worst = std::max(worst, gaps[k] * static_cast<double>(k + 2));
  return {worst <= bound,
          fmt("max gap*(r+1) over r <= 20 is %.3e, fitted bound %.3e", worst, bound)};
}

Verdict simulation_band() {
  const Stopwatch clock;
  SimulationConfig c;
  c.truth.design = TruthDesign::BlockRandom5;
  c.truth.d = 20;
  c.n = 50;
  c.replications = 10;
  c.seed = 0;
  c.estimate.loss = LossKind::GaussianNLL;
  c.estimate.penalty = PenaltyFamily::SCAD;
  c.estimate.lambdas = {0.2, 0.25, 0.3};
  c.estimate.zero_tol = 1e-2;
  c.estimate.optimizer.tau1 = 1e-6;
  const SimulationResult r = run_simulation(c);
  for (const auto& row : r.rows) g_runs.add(fmt("simulation rep %zu", row.replication), row.monotone);
  const double tpr = r.summary.tpr.mean;
  const double mcc = r.summary.mcc.mean;
  const double t = clock.seconds();
  return {tpr >= 0.60 && tpr <= 0.95 && mcc >= 0.30 && t <= 1800.0,
          fmt("mean TPR %.3f in [0.60, 0.95], mean MCC %.3f (>= 0.30), mean FPR %.3f, %.0f s "
              "(<= 1800 s)",
              tpr, mcc, r.summary.fpr.mean, t)};
}

Verdict penalty_correctness() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int checked = 0;
  int plateau_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double lam = 0.01 + 0.3 * unit(rng);
    const bool scad = i % 2 == 0;
    const PenaltySpec spec = scad ? PenaltySpec::scad(lam, 2.1 + 3.0 * unit(rng))
                                  : PenaltySpec::mcp(lam, 1.1 + 3.0 * unit(rng));
    const double knee = spec.shape * lam;
    const double h = 1e-6;
    double t = 0.0;
    do {
      t = 1.5 * unit(rng);
    } while (t <= 2 * h || std::abs(t - lam) < 1e-4 || std::abs(t - knee) < 1e-4);
    const double fd = oracle::central_difference([&](double x) { return penalty_value(spec, x); }, t, h);
    worst = std::max(worst, std::abs(fd - penalty_derivative(spec, t)));
    ++checked;

    const double plateau = scad ? lam * lam * (spec.shape + 1.0) / 2.0 : spec.shape * lam * lam / 2.0;
    const double beyond = knee + (1.0 - knee > 0 ? (1.0 - knee) * unit(rng) : unit(rng));
    if (penalty_value(spec, beyond) != plateau || penalty_value(spec, knee + 1e-9) != plateau) {
      ++plateau_bad;
    }
  }
  return {worst <= 1e-6 && plateau_bad == 0,
          fmt("%d points: max |derivative - FD| %.2e (<= 1e-6), %d plateau mismatches", checked,
              worst, plateau_bad)};
}

Verdict generator_fidelity() {
  int mismatches = 0;
  int not_pd = 0;
  auto pd = [](const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    return llt.info() == Eigen::Success && oracle::min_eigenvalue(m) > 0.0;
  };
  for (std::size_t d : {10u, 20u, 40u}) {
    const auto t = gen_truth({TruthDesign::Toeplitz, d, 0.0, 0});
    const auto b = gen_truth({TruthDesign::Banded, d, 0.0, 0});
    const auto f = gen_truth({TruthDesign::BlockFixed, d, 0.0, 0});
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        const double gap = std::abs(static_cast<double>(i) - static_cast<double>(j));
        mismatches += t.matrix(ii, jj) != std::pow(0.75, gap);
        mismatches += b.matrix(ii, jj) != (gap <= 10 ? 1.0 - gap / 10.0 : 0.0);
        mismatches += f.matrix(ii, jj) != 0.2 * (i == j) + 0.8 * (i / 10 == j / 10);
      }
    }
    not_pd += !pd(t.matrix) + !pd(b.matrix) + !pd(f.matrix);
  }
  int count_bad = 0;
  int sparse_draws = 0;
  for (std::size_t d : {10u, 20u}) {
    for (double sparsity : {0.95, 0.9}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto u = gen_truth({TruthDesign::UniformSparse, d, sparsity, seed});
        const double pairs = static_cast<double>(d * (d - 1) / 2);
        count_bad += u.support.sum() / 2 != std::llround((1.0 - sparsity) * pairs);
        not_pd += !pd(u.matrix);
        ++sparse_draws;
      }
    }
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    not_pd += !pd(gen_truth({TruthDesign::BlockRandom5, 20, 0.0, seed}).matrix);
  }
  return {mismatches == 0 && count_bad == 0 && not_pd == 0,
          fmt("%d closed-form mismatches, %d/%d sparse support counts off, %d truths not PD",
              mismatches, count_bad, sparse_draws, not_pd)};
}

Verdict metrics_oracle() {
  std::mt19937_64 rng(1212);
  std::uniform_real_distribution<double> density(0.05, 0.9);
  int bad = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::MatrixXi truth = oracle::random_support(10, density(rng), rng);
    const Eigen::MatrixXi est = oracle::random_support(10, density(rng), rng);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(10, 10);
    const MetricsReport m = compute_metrics(id, truth, id, est);
    const oracle::Counts o = oracle::brute_force_confusion(truth, est);
    const auto tpr = o.tp + o.fn ? static_cast<double>(o.tp) / static_cast<double>(o.tp + o.fn) : 0.0;
    const auto fpr = o.fp + o.tn ? static_cast<double>(o.fp) / static_cast<double>(o.fp + o.tn) : 0.0;
    const bool ok = m.counts.tp == o.tp && m.counts.fp == o.fp && m.counts.tn == o.tn &&
                    m.counts.fn == o.fn && m.tpr == tpr && m.fpr == fpr &&
                    std::abs(m.mcc - oracle::mcc_from_labels(truth, est)) <= 1e-12;
    bad += !ok;
  }
  return {bad == 0, fmt("100 random support pairs at d=10: %d disagreements", bad)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria = {
      {1, {"bijection round trip", round_trip}},
      {2, {"feasibility under wrapping", wrap_feasibility}},
      {3, {"wrap laws", wrap_laws}},
      {4, {"benchmark reproduction", benchmarks}},
      {5, {"convex recovery", convex_recovery}},
      {6, {"monotone descent", monotone_descent}},
      {7, {"determinism across parallelism", determinism}},
      {8, {"rate under strict shrink", rate_property}},
      {9, {"simulation band", simulation_band}},
      {10, {"penalty correctness", penalty_correctness}},
      {11, {"generator fidelity", generator_fidelity}},
      {12, {"metrics oracle", metrics_oracle}},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [id, _] : criteria) selected.insert(id);
  }

  // Criterion 6 audits the runs made by the others, so it goes last.
  std::vector<int> order(selected.begin(), selected.end());
  std::stable_partition(order.begin(), order.end(), [](int id) { return id != 6; });

  std::map<int, Verdict> verdicts;
  for (int id : order) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    progress("criterion " + std::to_string(id) + ": " + it->second.first);
    const Stopwatch clock;
    try {
      verdicts[id] = it->second.second();
    } catch (const std::exception& e) {
      verdicts[id] = {false, std::string("exception: ") + e.what()};
    }
    progress(fmt("criterion %d took %.1f s", id, clock.seconds()));
  }

  int failed = 0;
  for (const auto& [id, v] : verdicts) {
    std::printf("%s criterion %2d  %-32s %s\n", v.pass ? "PASS" : "FAIL", id,
                criteria.at(id).first.c_str(), v.detail.c_str());
    failed += !v.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(verdicts.size()) - failed,
              verdicts.size());
  return failed == 0 ? 0 : 1;
}
