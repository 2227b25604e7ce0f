#include "adn/cli/run.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "adn/error.hpp"
#include "adn/metrics.hpp"

namespace adn::cli {

namespace {

enum class LogLevel { quiet, info, debug };

LogLevel log_level() {
  const char* env = std::getenv("ADN_LOG");
  if (env == nullptr) return LogLevel::info;
  const std::string_view v(env);
  if (v == "quiet" || v == "0" || v == "off") return LogLevel::quiet;
  if (v == "debug" || v == "2") return LogLevel::debug;
  return LogLevel::info;
}

Dataset load(const RunConfig& cfg) {
  if (cfg.synthetic) {
    SyntheticSpec spec = *cfg.synthetic;
    spec.layout = cfg.layout;
    return generate_synthetic(spec);
  }
  return parse_libsvm(std::filesystem::path(cfg.data), cfg.layout, cfg.normalize);
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::config_error, "cannot write " + path);
  f << body;
}

}  // namespace

RunResult execute(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto level = log_level();
  const Dataset data = load(cfg);
  const Problem problem = build_problem(data, cfg.problem);
  const auto partition = partition_columns(problem.matrix.cols(), cfg.workers, cfg.partition, cfg.partition_seed);

  SolverBudget budget;
  budget.epochs = cfg.epochs;
  StopCriteria stop;
  stop.max_rounds = cfg.max_rounds;
  stop.gap_tol = cfg.gap_tol;
  EngineOptions options;
  options.seed = cfg.seed;
  options.threading = cfg.multiplexed ? Threading::multiplexed : Threading::concurrent;
  if (level == LogLevel::debug) {
    options.observer = [&log](const RoundEvent& e) {
      log << "round " << e.round << " sigma=" << e.sigma << " rho="
          << (e.decision.rho ? std::to_string(*e.decision.rho) : std::string("degenerate"))
          << (e.decision.accepted ? " accepted" : " rejected") << " objective=" << e.objective_new << '\n';
    };
  }
  if (level != LogLevel::quiet) {
    log << "data: " << problem.matrix.rows() << "x" << problem.matrix.cols() << " nnz=" << problem.matrix.nnz()
        << " layout=" << to_string(cfg.layout) << " K=" << cfg.workers << " mode=" << to_string(cfg.mode) << '\n';
  }

  RunResult result;
  switch (cfg.mode) {
    case RunMode::adn: {
      TrustConfig trust = cfg.trust;
      if (trust.schedule == SigmaSchedule::fixed && cfg.sigma_fixed) trust.sigma0 = *cfg.sigma_fixed;
      result = run_adn(problem.spec, problem.matrix, partition, trust, budget, stop, options);
      break;
    }
    case RunMode::cocoa:
      result = run_cocoa(problem.spec, problem.matrix, partition, cfg.sigma_fixed, budget, stop, options);
      break;
    case RunMode::ls:
      result = run_line_search(problem.spec, problem.matrix, partition, budget, stop, cfg.ls, options);
      break;
  }

  if (!cfg.metrics.empty()) {
    std::ostringstream csv;
    write_metrics_csv(csv, result.metrics);
    write_file(cfg.metrics, csv.str());
  }
  if (!cfg.summary.empty()) write_file(cfg.summary, summary_json(result, to_string(cfg.mode), serialize_config(cfg)));
  return result;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive distributed Newton for generalized linear models"};
  app.require_subcommand(1);

  // Every flag is kept as text and applied on top of the config file, so the
  // file and the command line share one parser.
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
    std::string value;
  };
  std::vector<Flag> flags = {
      {"--data", "data", "LIBSVM input file", {}},
      {"--synthetic", "synthetic", "synthetic spec, e.g. d=50,n=200,density=0.1", {}},
      {"--layout", "layout", "primal (features are columns) or dual (examples are columns)", {}},
      {"--normalize", "normalize", "scale examples to unit norm (true/false)", {}},
      {"--loss", "loss", "least_squares | logistic", {}},
      {"--reg", "reg", "l2 | l1 | elastic_net", {}},
      {"--mu", "mu", "l2 weight", {}},
      {"--lambda", "lambda", "l1 weight", {}},
      {"--bound", "bound", "l1 support bound", {}},
      {"--workers", "workers", "number of parts K", {}},
      {"--partition", "partition", "contiguous | round_robin | random", {}},
      {"--partition-seed", "partition_seed", "seed for the random partition", {}},
      {"--mode", "mode", "adn | cocoa | ls", {}},
      {"--schedule", "schedule", "auto | threshold | fixed", {}},
      {"--sigma0", "sigma0", "initial sigma", {}},
      {"--sigma-fixed", "sigma_fixed", "sigma for the fixed schedule and for cocoa", {}},
      {"--gamma", "gamma", "threshold schedule factor", {}},
      {"--zeta", "zeta", "threshold schedule band", {}},
      {"--xi", "xi", "acceptance threshold on rho", {}},
      {"--sigma-max", "sigma_max", "upper clamp on sigma", {}},
      {"--allow-zero-xi", "allow_zero_xi", "allow xi = 0 (true/false)", {}},
      {"--epochs", "epochs", "local solver passes per round", {}},
      {"--seed", "seed", "run seed", {}},
      {"--threads", "threads", "concurrent | multiplexed", {}},
      {"--max-rounds", "max_rounds", "round limit", {}},
      {"--gap-tol", "gap_tol", "stop at this duality gap", {}},
      {"--metrics", "metrics", "metrics CSV output path", {}},
      {"--summary", "summary", "JSON summary output path", {}},
  };
  std::string config_path;

  auto* run = app.add_subcommand("run", "solve a problem and write metrics");
  run->add_option("--config", config_path, "key=value config file; flags override it");
  for (auto& f : flags) run->add_option(f.name, f.value, f.help);

  std::string gen_spec;
  std::string gen_out;
  std::string gen_layout = "primal";
  bool gen_regression = false;
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset in LIBSVM format");
  gen->add_option("--synthetic", gen_spec, "synthetic spec")->required();
  gen->add_option("--layout", gen_layout, "primal | dual");
  gen->add_option("--out", gen_out, "output path")->required();
  gen->add_flag("--regression", gen_regression, "write regression targets instead of labels");

  std::vector<const char*> argv{"adn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (gen->parsed()) {
      SyntheticSpec spec = parse_synthetic(gen_spec);
      RunConfig layout_cfg;
      apply_setting(layout_cfg, "layout", gen_layout);
      spec.layout = layout_cfg.layout;
      const auto data = generate_synthetic(spec);
      std::ofstream f(gen_out);
      if (!f) throw Error(ErrorCode::config_error, "cannot write " + gen_out);
      write_libsvm(f, data, gen_regression);
      out << "wrote " << data.num_examples() << " examples to " << gen_out << '\n';
      return kExitOk;
    }

    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw Error(ErrorCode::config_error, "cannot read " + config_path);
      std::stringstream body;
      body << f.rdbuf();
      cfg = parse_config(body.str());
    }
    for (const auto& f : flags) {
      if (run->count(f.name) > 0) apply_setting(cfg, f.key, f.value);
    }
    const auto result = execute(cfg, err);
    if (log_level() != LogLevel::quiet) out << summary_line(result) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::non_finite_value ? kExitNonFinite : kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace adn::cli
