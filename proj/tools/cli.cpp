#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "bloc/benchfns.hpp"
#include "bloc/blackbox.hpp"
#include "bloc/corrspace.hpp"
#include "bloc/datagen.hpp"
#include "bloc/estimate.hpp"
#include "bloc/matrix_io.hpp"
#include "bloc/rmps.hpp"
#include "bloc/simulate.hpp"

namespace bloc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs a validation step and reports its failure as a usage error.
template <typename F>
void usage_check(F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct OptimizerFlags {
  OptimizerConfig config;
  std::string restart = "warm";
  bool strict_shrink = false;

  void attach(CLI::App* app) {
    app->add_option("--s-initial", config.s_initial, "Initial step size of every run")
        ->capture_default_str();
    app->add_option("--rho", config.rho, "Step divisor (> 1)")->capture_default_str();
    app->add_option("--kappa", config.kappa, "Step floor")->capture_default_str();
    app->add_option("--tau1", config.tau1, "Improvement below which the step shrinks")
        ->capture_default_str();
    app->add_option("--tau2", config.tau2, "Run-to-run change below which runs stop")
        ->capture_default_str();
    app->add_option("--max-iter", config.max_iter, "Iteration cap per run")->capture_default_str();
    app->add_option("--max-run", config.max_run, "Total number of runs")->capture_default_str();
    app->add_option("--restart", restart, "Restart mode")
        ->check(CLI::IsMember({"warm", "grid"}))
        ->capture_default_str();
    app->add_option("--grid-mesh", config.grid_mesh_initial, "Lattice spacing of the first restart")
        ->capture_default_str();
    app->add_option("--grid-divisor", config.grid_mesh_divisor, "Lattice refinement per restart")
        ->capture_default_str();
    app->add_option("--grid-offset", config.grid_offset, "Lattice phase")->capture_default_str();
    app->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    app->add_option("--parallelism", config.parallelism, "Worker threads (0 or 1 = serial)")
        ->capture_default_str();
    app->add_flag("--strict-shrink", strict_shrink,
                  "Shrink the step only after an iteration without an accepted move");
  }

  OptimizerConfig resolve() {
    config.restart_mode = parse_restart_mode(restart);
    config.strict_failure_shrink = strict_shrink;
    usage_check([&] { config.validate(); });
    return config;
  }
};

json optimizer_json(const OptimizerConfig& c) {
  return {{"s_initial", c.s_initial},         {"rho", c.rho},
          {"kappa", c.kappa},                 {"tau1", c.tau1},
          {"tau2", c.tau2},                   {"max_iter", c.max_iter},
          {"max_run", c.max_run},             {"restart", std::string(to_string(c.restart_mode))},
          {"grid_mesh", c.grid_mesh_initial}, {"grid_divisor", c.grid_mesh_divisor},
          {"grid_offset", c.grid_offset},     {"seed", c.seed},
          {"strict_shrink", c.strict_failure_shrink}};
}

struct ObjectiveFlags {
  std::string loss = "gaussian";
  std::string penalty = "scad";
  double shape = 0.0;
  std::vector<double> lambdas;
  std::string mask_path;
  std::string blackbox_cmd;

  void attach(CLI::App* app) {
    app->add_option("--loss", loss, "Loss function")
        ->check(CLI::IsMember({"gaussian", "frobenius", "blackbox-cmd"}))
        ->capture_default_str();
    app->add_option("--penalty", penalty, "Penalty family")
        ->check(CLI::IsMember({"none", "l1", "scad", "mcp"}))
        ->capture_default_str();
    app->add_option("--shape", shape, "SCAD a or MCP gamma (0 = family default)");
    auto* single = app->add_option("--lambda", lambdas, "Penalty level")->expected(1);
    app->add_option("--lambda-grid", lambdas, "Comma-separated lambda grid")
        ->delimiter(',')
        ->excludes(single);
    app->add_option("--mask", mask_path, "CSV penalty weights (symmetric, zero diagonal)")
        ->check(CLI::ExistingFile);
    app->add_option("--blackbox-cmd", blackbox_cmd,
                    "Shell command scoring matrices over stdin/stdout");
  }

  std::optional<Eigen::MatrixXd> read_mask() const {
    if (mask_path.empty()) return std::nullopt;
    Eigen::MatrixXd m = read_square(mask_path);
    usage_check([&] { validate_mask(m); });
    return m;
  }

  void check() const {
    if (loss == "blackbox-cmd" && blackbox_cmd.empty()) {
      throw UsageError("--loss blackbox-cmd needs --blackbox-cmd \"<command>\"");
    }
    for (double l : lambdas) {
      if (!(l >= 0.0)) throw UsageError("lambda values must be >= 0");
    }
  }
};

fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw UsageError("cannot create output directory '" + out + "'");
  }
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << j.dump(2) << '\n';
}

void write_trace(const fs::path& path, const RunResult& result) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << "run,iteration,step_size,best_value,evaluations\n";
  for (const TraceRow& t : result.trace) {
    f << t.run << ',' << t.iteration << ',' << format_double(t.step_size) << ','
      << format_double(t.best_value) << ',' << t.evaluations << '\n';
  }
}

std::string summary_line(double best, std::int64_t evaluations, double seconds) {
  std::ostringstream os;
  os << "best=" << format_double(best) << " evaluations=" << evaluations
     << " seconds=" << seconds;
  return os.str();
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeCommand {
  ObjectiveFlags objective;
  OptimizerFlags optimizer;
  std::string target_path;
  std::string init_path;
  std::size_t d = 0;
  std::string out = ".";

  void attach(CLI::App* app) {
    objective.attach(app);
    optimizer.attach(app);
    app->add_option("--target", target_path, "CSV target correlation matrix")
        ->check(CLI::ExistingFile);
    app->add_option("--init", init_path, "CSV starting correlation matrix (default identity)")
        ->check(CLI::ExistingFile);
    app->add_option("--d", d, "Dimension when neither --target nor --init is given");
    app->add_option("--out", out, "Output directory")->capture_default_str();
  }

  int run(std::ostream& out_stream) {
    objective.check();
    const OptimizerConfig cfg = optimizer.resolve();
    if (objective.lambdas.size() > 1) throw UsageError("optimize takes a single --lambda");
    const double lambda = objective.lambdas.empty() ? 0.0 : objective.lambdas.front();
    const LossKind kind = parse_loss_kind(objective.loss);
    if (kind != LossKind::BlackBox && target_path.empty()) {
      throw UsageError("--loss " + objective.loss + " needs --target");
    }
    const fs::path dir = prepare_out(out);

    std::optional<CorrelationMatrix> target;
    if (!target_path.empty()) target = CorrelationMatrix::from_matrix(read_square(target_path));
    std::optional<CorrelationMatrix> init;
    if (!init_path.empty()) init = CorrelationMatrix::from_matrix(read_square(init_path));
    std::size_t dim = d;
    if (target) dim = target->dim();
    else if (init) dim = init->dim();
    if (dim < 2) throw UsageError("dimension must be >= 2 (give --target, --init or --d)");
    if (init && init->dim() != dim) throw UsageError("--init dimension differs from --target");

    ObjectiveSpec spec;
    switch (kind) {
      case LossKind::GaussianNLL: spec.loss = LossSpec::gaussian(*target); break;
      case LossKind::FrobeniusSq: spec.loss = LossSpec::frobenius(*target); break;
      case LossKind::BlackBox: spec.loss = child_process_loss(dim, objective.blackbox_cmd); break;
    }
    spec.penalty = PenaltySpec::make(parse_penalty_family(objective.penalty), lambda,
                                     objective.shape);
    spec.penalty.mask = objective.read_mask();
    usage_check([&] { spec.validate(); });

    const Stopwatch clock;
    const RunResult result = optimize(spec, init ? *init : CorrelationMatrix::identity(dim), cfg);
    const double seconds = clock.seconds();

    write_csv(dir / "gamma_hat.csv", result.best_corr.matrix());
    write_angles(dir / "angles.txt", wrap(result.best_phi).values(), dim);
    write_trace(dir / "trace.csv", result);
    json summary = {{"command", "optimize"},
                    {"d", dim},
                    {"loss", objective.loss},
                    {"penalty", objective.penalty},
                    {"lambda", lambda},
                    {"best_value", result.best_value},
                    {"evaluations", result.evaluations},
                    {"runs", result.runs_completed},
                    {"run_values", result.run_values},
                    {"optimizer", optimizer_json(cfg)},
                    {"timing", {{"seconds", seconds}}}};
    write_json(dir / "summary.json", summary);
    out_stream << summary_line(result.best_value, result.evaluations, seconds) << '\n';
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// estimate

struct EstimateCommand {
  ObjectiveFlags objective;
  OptimizerFlags optimizer;
  std::string data_path;
  double zero_tol = kDefaultZeroTol;
  std::string out = ".";

  void attach(CLI::App* app) {
    objective.attach(app);
    optimizer.attach(app);
    app->add_option("--data", data_path, "CSV data, rows = observations")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--zero-tol", zero_tol, "Entries below this magnitude count as zero")
        ->capture_default_str();
    app->add_option("--out", out, "Output directory")->capture_default_str();
  }

  int run(std::ostream& out_stream) {
    objective.check();
    if (!(zero_tol >= 0.0)) throw UsageError("--zero-tol must be >= 0");
    EstimateOptions options;
    options.optimizer = optimizer.resolve();
    options.loss = parse_loss_kind(objective.loss);
    options.penalty = parse_penalty_family(objective.penalty);
    options.shape = objective.shape;
    if (!objective.lambdas.empty()) options.lambdas = objective.lambdas;
    options.zero_tol = zero_tol;
    const fs::path dir = prepare_out(out);

    const DataMatrix x = read_data(data_path);
    usage_check([&] { x.validate(); });
    options.mask = objective.read_mask();
    if (options.mask && static_cast<std::size_t>(options.mask->rows()) != x.d()) {
      throw UsageError("--mask is " + std::to_string(options.mask->rows()) + "x" +
                       std::to_string(options.mask->cols()) + " but the data has " +
                       std::to_string(x.d()) + " columns");
    }
    if (options.loss == LossKind::BlackBox) {
      options.black_box = child_process_loss(x.d(), objective.blackbox_cmd);
    }

    const Stopwatch clock;
    const EstimateResult fit = estimate(x, options);
    const double seconds = clock.seconds();

    write_csv(dir / "gamma_hat.csv", fit.gamma_hat.matrix(), x.names);
    write_csv(dir / "sigma_hat.csv", fit.sigma_hat, x.names);
    write_csv(dir / "support.csv", fit.support, x.names);
    write_trace(dir / "trace.csv", fit.optimizer);

    json path = json::array();
    for (const LambdaScore& s : fit.path) {
      path.push_back({{"lambda", s.lambda},
                      {"loss", s.loss},
                      {"objective", s.objective},
                      {"support_size", s.support_size},
                      {"score", s.score},
                      {"evaluations", s.evaluations}});
    }
    json summary = {{"command", "estimate"},
                    {"n", x.n()},
                    {"d", x.d()},
                    {"loss", objective.loss},
                    {"penalty", objective.penalty},
                    {"lambda", fit.lambda_used},
                    {"zero_tol", fit.zero_tol},
                    {"best_value", fit.optimizer.best_value},
                    {"evaluations", fit.optimizer.evaluations},
                    {"runs", fit.optimizer.runs_completed},
                    {"support_size", fit.support.sum() / 2},
                    {"initialized_at_sample", fit.initialized_at_sample},
                    {"lambda_path", path},
                    {"optimizer", optimizer_json(options.optimizer)},
                    {"timing", {{"seconds", seconds}}}};
    write_json(dir / "summary.json", summary);
    out_stream << summary_line(fit.optimizer.best_value, fit.optimizer.evaluations, seconds)
               << '\n';
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateCommand {
  ObjectiveFlags objective;
  OptimizerFlags optimizer;
  std::string design = "block5";
  std::size_t d = 20;
  std::size_t n = 50;
  std::size_t reps = 10;
  double sparsity = 0.95;
  double zero_tol = kDefaultZeroTol;
  std::string out = ".";

  void attach(CLI::App* app) {
    objective.attach(app);
    optimizer.attach(app);
    app->add_option("--design", design, "Truth design")
        ->check(CLI::IsMember({"block5", "uniform-sparse", "block", "toeplitz", "banded"}))
        ->capture_default_str();
    app->add_option("--d", d, "Dimension")->capture_default_str();
    app->add_option("--n", n, "Observations per replication")->capture_default_str();
    app->add_option("--reps", reps, "Replications")->capture_default_str();
    app->add_option("--sparsity", sparsity, "Zero fraction for uniform-sparse")
        ->capture_default_str();
    app->add_option("--zero-tol", zero_tol, "Entries below this magnitude count as zero")
        ->capture_default_str();
    app->add_option("--out", out, "Output directory")->capture_default_str();
  }

  int run(std::ostream& out_stream) {
    objective.check();
    if (objective.loss == "blackbox-cmd") throw UsageError("simulate supports gaussian or frobenius");
    SimulationConfig config;
    config.truth.design = parse_truth_design(design);
    config.truth.d = d;
    config.truth.sparsity = sparsity;
    usage_check([&] { config.truth.validate(); });
    if (reps == 0) throw UsageError("--reps must be >= 1");
    if (n < 2) throw UsageError("--n must be >= 2");
    config.n = n;
    config.replications = reps;
    config.estimate.optimizer = optimizer.resolve();
    config.seed = config.estimate.optimizer.seed;
    config.parallelism = std::max(config.estimate.optimizer.parallelism, 1);
    // Replications carry the parallelism; each fit polls serially.
    if (config.parallelism > 1) config.estimate.optimizer.parallelism = 1;
    config.estimate.loss = parse_loss_kind(objective.loss);
    config.estimate.penalty = parse_penalty_family(objective.penalty);
    config.estimate.shape = objective.shape;
    if (!objective.lambdas.empty()) config.estimate.lambdas = objective.lambdas;
    config.estimate.zero_tol = zero_tol;
    config.estimate.mask = objective.read_mask();
    const fs::path dir = prepare_out(out);

    const Stopwatch clock;
    const SimulationResult result = run_simulation(config);
    const double seconds = clock.seconds();

    {
      std::ofstream f(dir / "simulate.csv", std::ios::trunc);
      f << "replication,design,d,n,method,lambda,tpr,fpr,mcc,rmse,mad,frob,spec,seconds\n";
      for (const SimulationRow& r : result.rows) {
        const MetricsReport& m = r.metrics;
        f << r.replication << ',' << r.design << ',' << r.d << ',' << r.n << ',' << r.method << ','
          << format_double(r.lambda) << ',' << format_double(m.tpr) << ',' << format_double(m.fpr)
          << ',' << format_double(m.mcc) << ',' << format_double(m.rmse) << ','
          << format_double(m.mad) << ',' << format_double(m.frob_err) << ','
          << format_double(m.spec_err) << ',' << r.seconds << '\n';
      }
      if (!f) throw std::runtime_error("cannot write simulate.csv");
    }
    const SimulationSummary& s = result.summary;
    const std::vector<std::pair<std::string, MeanStderr>> columns = {
        {"tpr", s.tpr},   {"fpr", s.fpr},   {"mcc", s.mcc},   {"rmse", s.rmse},
        {"mad", s.mad},   {"frob", s.frob}, {"spec", s.spec}};
    {
      std::ofstream f(dir / "simulate_summary.csv", std::ios::trunc);
      f << "metric,mean,stderr\n";
      for (const auto& [name, v] : columns) {
        f << name << ',' << format_double(v.mean) << ',' << format_double(v.stderr_value) << '\n';
      }
      if (!f) throw std::runtime_error("cannot write simulate_summary.csv");
    }
    json metrics = json::object();
    for (const auto& [name, v] : columns) metrics[name] = {{"mean", v.mean}, {"stderr", v.stderr_value}};
    json summary = {{"command", "simulate"},
                    {"design", design},
                    {"d", d},
                    {"n", n},
                    {"reps", reps},
                    {"loss", objective.loss},
                    {"penalty", objective.penalty},
                    {"lambda_grid", config.estimate.lambdas},
                    {"zero_tol", zero_tol},
                    {"metrics", metrics},
                    {"optimizer", optimizer_json(config.estimate.optimizer)},
                    {"timing", {{"seconds", seconds}, {"mean_fit_seconds", s.seconds.mean}}}};
    write_json(dir / "summary.json", summary);
    out_stream << "tpr=" << s.tpr.mean << " fpr=" << s.fpr.mean << " mcc=" << s.mcc.mean
               << " reps=" << reps << " seconds=" << seconds << '\n';
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkCommand {
  OptimizerFlags optimizer;
  std::string fn = "ackley";
  std::size_t d = 5;
  std::size_t reps = 10;
  std::string out = ".";

  BenchmarkCommand() {
    optimizer.config.kappa = 1e-12;
    optimizer.config.tau2 = 0.0;
    optimizer.config.max_run = 20;
    optimizer.restart = "grid";
  }

  void attach(CLI::App* app) {
    optimizer.attach(app);
    app->add_option("--fn", fn, "Benchmark function")
        ->check(CLI::IsMember({"ackley", "griewank", "rosenbrock", "rastrigin"}))
        ->capture_default_str();
    app->add_option("--d", d, "Dimension")->capture_default_str();
    app->add_option("--reps", reps, "Random starts")->capture_default_str();
    app->add_option("--out", out, "Output directory")->capture_default_str();
  }

  int run(std::ostream& out_stream) {
    const OptimizerConfig cfg = optimizer.resolve();
    if (reps == 0) throw UsageError("--reps must be >= 1");
    BenchmarkSpec spec;
    usage_check([&] { spec = BenchmarkSpec::make(parse_benchmark_function(fn), d); });
    const fs::path dir = prepare_out(out);

    const Stopwatch clock;
    const BenchmarkSummary s = run_benchmark(spec, reps, cfg, cfg.seed);
    const double seconds = clock.seconds();

    std::int64_t evaluations = 0;
    {
      std::ofstream f(dir / "benchmark_reps.csv", std::ios::trunc);
      f << "rep,value,evaluations,seconds\n";
      for (std::size_t r = 0; r < s.reps.size(); ++r) {
        f << r << ',' << format_double(s.reps[r].value) << ',' << s.reps[r].evaluations << ','
          << s.reps[r].seconds << '\n';
        evaluations += s.reps[r].evaluations;
      }
    }
    {
      std::ofstream f(dir / "benchmark.csv", std::ios::trunc);
      f << "function,d,reps,min_value,stderr,mean_seconds,stderr_seconds\n";
      f << fn << ',' << d << ',' << reps << ',' << format_double(s.min_value) << ','
        << format_double(s.stderr_value) << ',' << s.mean_seconds << ',' << s.stderr_seconds
        << '\n';
      if (!f) throw std::runtime_error("cannot write benchmark.csv");
    }
    json values = json::array();
    for (const BenchmarkRep& r : s.reps) values.push_back(r.value);
    json summary = {{"command", "benchmark"},
                    {"function", fn},
                    {"d", d},
                    {"reps", reps},
                    {"min_value", s.min_value},
                    {"stderr", s.stderr_value},
                    {"values", values},
                    {"evaluations", evaluations},
                    {"optimizer", optimizer_json(cfg)},
                    {"timing", {{"seconds", seconds},
                                {"mean_seconds", s.mean_seconds},
                                {"stderr_seconds", s.stderr_seconds}}}};
    write_json(dir / "summary.json", summary);
    out_stream << summary_line(s.min_value, evaluations, seconds) << '\n';
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// roundtrip-check

struct RoundtripCommand {
  std::size_t d = 20;
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  double tolerance = 1e-10;

  void attach(CLI::App* app) {
    app->add_option("--d", d, "Dimension")->capture_default_str();
    app->add_option("--reps", reps, "Random matrices")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--tolerance", tolerance, "Largest accepted entrywise error")
        ->capture_default_str();
  }

  int run(std::ostream& out_stream) {
    if (d < 2) throw UsageError("--d must be >= 2");
    const Stopwatch clock;
    double worst = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const CorrelationMatrix c = corr_from_unconstrained(random_angles(d, seed + r));
      const CorrelationMatrix back = phi_to_corr(corr_to_phi(c));
      worst = std::max(worst, (back.matrix() - c.matrix()).cwiseAbs().maxCoeff());
    }
    const bool pass = worst < tolerance;
    out_stream << (pass ? "PASS" : "FAIL") << " max_error=" << format_double(worst)
               << " d=" << d << " reps=" << reps << " seconds=" << clock.seconds() << '\n';
    return pass ? kOk : kRuntime;
  }
};

bool is_flag_token(const std::string& s) { return s.size() > 2 && s.rfind("--", 0) == 0; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  std::string out = s.substr(b, e - b + 1);
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;

  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot open config file '" + config_path + "'");
  std::vector<std::string> given;
  for (const auto& a : rest) {
    if (is_flag_token(a)) given.push_back(a.substr(2, a.find('=') - 2));
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(config_path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw UsageError(config_path + ":" + std::to_string(lineno) + ": empty key");
    }
    if (std::find(given.begin(), given.end(), key) != given.end()) continue;
    if (value == "true") {
      rest.push_back("--" + key);
    } else if (value != "false") {
      rest.push_back("--" + key);
      rest.push_back(value);
    }
  }
  return rest;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse correlation estimation by pattern search over angular coordinates"};
  app.name("bloc");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");
  app.add_option("--config", "Flat key = value file of flag defaults (flags take precedence)");

  OptimizeCommand optimize_cmd;
  EstimateCommand estimate_cmd;
  SimulateCommand simulate_cmd;
  BenchmarkCommand benchmark_cmd;
  RoundtripCommand roundtrip_cmd;
  auto* optimize_app = app.add_subcommand("optimize", "Minimize a loss over correlation matrices");
  auto* estimate_app = app.add_subcommand("estimate", "Penalized correlation estimate from data");
  auto* simulate_app = app.add_subcommand("simulate", "Replicated simulation with support metrics");
  auto* benchmark_app = app.add_subcommand("benchmark", "Test-function benchmark from random starts");
  auto* roundtrip_app =
      app.add_subcommand("roundtrip-check", "Angle/correlation round-trip accuracy check");
  optimize_cmd.attach(optimize_app);
  estimate_cmd.attach(estimate_app);
  simulate_cmd.attach(simulate_app);
  benchmark_cmd.attach(benchmark_app);
  roundtrip_cmd.attach(roundtrip_app);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "bloc: " << e.what() << "\n" << "Run with --help for usage.\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "bloc: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*optimize_app) return optimize_cmd.run(out);
    if (*estimate_app) return estimate_cmd.run(out);
    if (*simulate_app) return simulate_cmd.run(out);
    if (*benchmark_app) return benchmark_cmd.run(out);
    if (*roundtrip_app) return roundtrip_cmd.run(out);
  } catch (const UsageError& e) {
    err << "bloc: " << e.what() << '\n';
    return kUsage;
  } catch (const CorrelationError& e) {
    err << "bloc: invalid correlation matrix:";
    for (const auto& issue : e.issues()) err << "\n  " << issue;
    err << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    err << "bloc: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace bloc::cli
