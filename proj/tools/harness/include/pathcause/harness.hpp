#pragma once

// Experiment harness behind the `pathcause` command-line tool: configuration,
// seeded runs, file formats and the reproduction targets.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathcause/estimator.hpp"
#include "pathcause/ground_truth.hpp"
#include "pathcause/regret.hpp"

namespace pathcause::harness {

/// Invalid configuration or command line. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A reproduction or verification check did not pass. Maps to exit code 3.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCheck = 3;

enum class Format { kCsv, kJson };
enum class DirectionSet { kYtoX, kXtoY, kBoth };

struct ExperimentConfig {
  std::optional<ProcessParams> model = ProcessParams{};
  EstimatorConfig estimator{};
  /// Overrides the reference class for both predictors; empty = default
  /// (predictor grid for grid predictors, continuum otherwise).
  std::vector<double> reference_points{};
  std::uint64_t seed = 1;
  DirectionSet directions = DirectionSet::kBoth;
  FilterVariant filter = FilterVariant::kExact;
  Format format = Format::kCsv;

  void validate() const;
  std::vector<Direction> direction_list() const;
  ReferenceClass complete_reference() const;
  ReferenceClass restricted_reference() const;
};

/// Two-regime change-point setup used by reproduce-fig1: n = 2000, change at 1000.
ExperimentConfig default_fig1_config();
/// Example-1 model with grid predictors.
ExperimentConfig example1_config(std::size_t n);

/// Parses the YAML config schema documented in docs/config.md. Unknown keys
/// and out-of-range values raise ConfigError.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Round-trippable YAML rendering of a config.
std::string dump_config(const ExperimentConfig& cfg);

// ------------------------------------------------------------------ data

struct Sequences {
  std::vector<Symbol> x;
  std::vector<Symbol> y;
  std::vector<Symbol> z;  // empty when there is no side stream
};

/// One output row per round.
struct TraceRecord {
  std::size_t i = 0;
  Symbol x = 0;
  Symbol y = 0;
  double c_true = 0.0;
  double c_star = 0.0;
  double c_hat = 0.0;
  double f_c_hat = 0.0;  // predicted P(effect = 1), complete
  double f_r_hat = 0.0;  // predicted P(effect = 1), restricted
  int regime = 1;
};

inline constexpr const char* kTraceHeader = "i,x,y,C_true,C_star,C_hat,f_c_hat,f_r_hat,regime";
inline constexpr const char* kSequenceHeader = "i,x,y,regime";

/// %.12g; non-finite values print as nan / inf.
std::string format_number(double v);

void write_sequences(std::ostream& out, const Sequences& seq, const std::optional<ProcessParams>& model);
Sequences read_sequences(std::istream& in);
Sequences read_sequences(const std::filesystem::path& path);

void write_trace(std::ostream& out, const std::vector<TraceRecord>& rows, Format format);
std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

// ------------------------------------------------------------- experiment

struct DirectionResult {
  Direction direction = Direction::kYtoX;
  CausalTrace estimated;
  std::optional<CausalTrace> truth;
  std::optional<CausalTrace> reference;  // C* from projected oracle pmfs
  std::optional<RegretReport> report;
};

struct ExperimentResult {
  Sequences sequences;
  std::vector<DirectionResult> directions;

  const DirectionResult& get(Direction d) const;
};

/// Estimates every configured direction on the given data. Truth, reference and
/// regret report are filled when the config carries a model.
ExperimentResult run_experiment(const ExperimentConfig& cfg, Sequences seq);
/// Simulates from cfg.model with cfg.seed, then run_experiment.
ExperimentResult simulate_and_run(const ExperimentConfig& cfg);

std::vector<TraceRecord> trace_records(const ExperimentConfig& cfg, const Sequences& seq,
                                       const DirectionResult& dir);

/// (M_complete, M_restricted) for n rounds under the configured predictors.
std::pair<double, double> regret_bounds(const ExperimentConfig& cfg, std::size_t n, bool with_side = false);

// ------------------------------------------------------- change-point stats

/// Smallest w >= 0 such that the mean |C_hat - C*| over rounds
/// [change_point + w, change_point + w + window] is below `tolerance`.
std::optional<std::size_t> adaptation_window(const CausalTrace& estimated, const CausalTrace& reference,
                                             std::size_t change_point, std::size_t window = 200,
                                             double tolerance = 0.05);

/// Mean |C_hat - C*| over rounds [first, last] (1-based, inclusive).
double mean_abs_error(const CausalTrace& estimated, const CausalTrace& reference, std::size_t first,
                      std::size_t last);

struct SpikeStats {
  std::size_t spikes = 0;
  std::size_t matched = 0;
  double fraction() const { return spikes == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(spikes); }
};

/// Rounds where the true measure exceeds 3x its regime median, counted as
/// matched when the estimate exceeds 2x its own regime median at the same
/// round. Regime-1 rounds before settle_regime1 and regime-2 rounds before
/// settle_regime2 are skipped.
SpikeStats spike_localization(const CausalTrace& estimated, const CausalTrace& truth,
                              const ProcessParams& params, std::size_t settle_regime1,
                              std::size_t settle_regime2);

// --------------------------------------------------------------- commands

struct RunPaths {
  std::filesystem::path out_dir = ".";
};

void cmd_simulate(const ExperimentConfig& cfg, const RunPaths& paths);
void cmd_estimate(const ExperimentConfig& cfg, const std::filesystem::path& input, const RunPaths& paths);
/// Writes report.json. With `reference_trace` the C* and reference pmfs come
/// from that file instead of the config model.
void cmd_evaluate(const ExperimentConfig& cfg, const std::vector<std::filesystem::path>& traces,
                  const std::optional<std::filesystem::path>& reference_trace, const RunPaths& paths);
/// Prints the closed-form quartet and a Monte Carlo estimate; throws
/// CheckFailure when either deviates.
void cmd_reproduce_example1(std::ostream& out, std::uint64_t seed = 1, std::size_t n = 10000);
void cmd_reproduce_fig1(const ExperimentConfig& cfg, const RunPaths& paths, std::ostream& log);
void cmd_sweep(const ExperimentConfig& cfg, std::size_t seeds, const RunPaths& paths, unsigned threads);

}  // namespace pathcause::harness
