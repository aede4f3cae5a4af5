#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "pathcause/harness.hpp"

namespace fs = std::filesystem;
using namespace pathcause;
using namespace pathcause::harness;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string direction;
  std::string filter;
  std::string format;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "YAML experiment config")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Generator seed");
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--direction", c.direction, "yx, xy or both")->check(CLI::IsMember({"yx", "xy", "both"}));
  sub->add_option("--filter", c.filter, "exact or paper-literal")->check(CLI::IsMember({"exact", "paper-literal"}));
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

// Without --config, commands that take data from a file run model-free;
// the others use the two-regime change-point setup.
ExperimentConfig resolve(const Common& c, bool model_free_default) {
  ExperimentConfig cfg = default_fig1_config();
  if (!c.config.empty()) {
    cfg = load_config(c.config);
  } else if (model_free_default) {
    cfg.model.reset();
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.direction == "yx") cfg.directions = DirectionSet::kYtoX;
  if (c.direction == "xy") cfg.directions = DirectionSet::kXtoY;
  if (c.direction == "both") cfg.directions = DirectionSet::kBoth;
  if (!c.filter.empty()) cfg.filter = parse_filter_variant(c.filter);
  if (c.format == "csv") cfg.format = Format::kCsv;
  if (c.format == "json") cfg.format = Format::kJson;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-path causal measures for binary processes"};
  app.require_subcommand(1);

  Common sim_opts, est_opts, eval_opts, fig_opts, sweep_opts;
  std::string est_input;
  std::vector<std::string> eval_inputs;
  std::string eval_reference;
  std::uint64_t ex1_seed = 1;
  std::size_t ex1_n = 10000;
  std::size_t sweep_seeds = 10;
  unsigned sweep_threads = std::max(1u, std::thread::hardware_concurrency());

  auto* sim = app.add_subcommand("simulate", "Draw x/y sequences from the configured model");
  add_common(sim, sim_opts);

  auto* est = app.add_subcommand("estimate", "Estimate per-round causal measures from a sequence file");
  add_common(est, est_opts);
  est->add_option("--input", est_input, "Sequence CSV (i,x,y[,z],regime)")->required()->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("evaluate", "Causality regret and bound checks for trace files");
  add_common(eval, eval_opts);
  eval->add_option("--input", eval_inputs, "Trace CSV files (direction from a _yx/_xy suffix)")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--reference", eval_reference, "Trace CSV whose estimates serve as the reference")
      ->check(CLI::ExistingFile);

  auto* ex1 = app.add_subcommand("reproduce-example1", "Closed-form and Monte Carlo values for the toy example");
  ex1->add_option("--seed", ex1_seed, "Generator seed")->capture_default_str();
  ex1->add_option("--n", ex1_n, "Monte Carlo rounds")->capture_default_str()->check(CLI::PositiveNumber);

  auto* fig = app.add_subcommand("reproduce-fig1", "Two-regime change-point run with adaptation checks");
  add_common(fig, fig_opts);

  auto* sweep = app.add_subcommand("sweep", "Independent seeded runs, one directory per seed");
  add_common(sweep, sweep_opts);
  sweep->add_option("--seeds", sweep_seeds, "Number of consecutive seeds")->capture_default_str();
  sweep->add_option("--threads", sweep_threads, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sim) {
      cmd_simulate(resolve(sim_opts, false), {sim_opts.out});
    } else if (*est) {
      cmd_estimate(resolve(est_opts, true), est_input, {est_opts.out});
    } else if (*eval) {
      std::vector<fs::path> inputs(eval_inputs.begin(), eval_inputs.end());
      std::optional<fs::path> ref;
      if (!eval_reference.empty()) ref = eval_reference;
      cmd_evaluate(resolve(eval_opts, true), inputs, ref, {eval_opts.out});
    } else if (*ex1) {
      cmd_reproduce_example1(std::cout, ex1_seed, ex1_n);
    } else if (*fig) {
      cmd_reproduce_fig1(resolve(fig_opts, false), {fig_opts.out}, std::cout);
    } else if (*sweep) {
      cmd_sweep(resolve(sweep_opts, false), sweep_seeds, {sweep_opts.out}, sweep_threads);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kExitCheck;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
