#include <algorithm>
#include <cmath>
#include <limits>

#include "pathcause/harness.hpp"

namespace pathcause::harness {
namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

double bound_for(const PredictorSettings& s, const ContextSpec& spec, std::size_t n) {
  RegretBoundInputs in;
  in.kind = s.kind;
  in.rounds = n;
  in.num_contexts = spec.num_contexts();
  in.alphabet_size = spec.alphabet_size;
  in.grid_points = s.grid_points;
  in.lambda = s.shrink.lambda;
  return worst_case_regret_bound(in);
}

}  // namespace

const DirectionResult& ExperimentResult::get(Direction d) const {
  for (const auto& r : directions) {
    if (r.direction == d) return r;
  }
  throw std::out_of_range("direction " + std::string(to_string(d)) + " was not run");
}

std::pair<double, double> regret_bounds(const ExperimentConfig& cfg, std::size_t n, bool with_side) {
  const auto& e = cfg.estimator;
  const ContextSpec complete{e.complete.order, e.complete.order, with_side ? e.complete.order : 0,
                             e.alphabet_size};
  const ContextSpec restricted{e.restricted.order, 0, with_side ? e.restricted.order : 0, e.alphabet_size};
  return {bound_for(e.complete, complete, n), bound_for(e.restricted, restricted, n)};
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, Sequences seq) {
  if (seq.x.empty()) throw InputError("no rounds to estimate");
  if (seq.x.size() != seq.y.size()) throw InputError("x and y have different lengths");
  if (!seq.z.empty() && seq.z.size() != seq.x.size()) throw InputError("z has a different length");

  ExperimentResult out;
  const bool with_side = !seq.z.empty();
  const auto [mc, mr] = regret_bounds(cfg, seq.x.size(), with_side);
  for (const Direction d : cfg.direction_list()) {
    const auto& effect = d == Direction::kYtoX ? seq.x : seq.y;
    const auto& cause = d == Direction::kYtoX ? seq.y : seq.x;
    DirectionResult r;
    r.direction = d;
    r.estimated = run_trace(effect, cause, seq.z, cfg.estimator);
    r.estimated.direction = d;
    if (cfg.model) {
      r.truth = true_causal_trace(*cfg.model, seq.x, seq.y, d, cfg.filter);
      r.reference = projected_reference(*r.truth, cfg.complete_reference(), cfg.restricted_reference());
      r.report = evaluate_regret(r.estimated, *r.reference, effect, mc, mr, cfg.estimator.alphabet_size);
    }
    out.directions.push_back(std::move(r));
  }
  out.sequences = std::move(seq);
  return out;
}

ExperimentResult simulate_and_run(const ExperimentConfig& cfg) {
  if (!cfg.model) throw ConfigError("simulation needs a model section");
  auto sample = simulate(*cfg.model, cfg.seed);
  Sequences seq;
  seq.x = std::move(sample.x);
  seq.y = std::move(sample.y);
  return run_experiment(cfg, std::move(seq));
}

std::vector<TraceRecord> trace_records(const ExperimentConfig& cfg, const Sequences& seq,
                                       const DirectionResult& dir) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<TraceRecord> rows;
  rows.reserve(dir.estimated.size());
  for (std::size_t i = 0; i < dir.estimated.size(); ++i) {
    const auto& est = dir.estimated.rounds[i];
    TraceRecord r;
    r.i = i + 1;
    r.x = seq.x[i];
    r.y = seq.y[i];
    r.c_true = dir.truth ? dir.truth->rounds[i].measure : nan;
    r.c_star = dir.reference ? dir.reference->rounds[i].measure : nan;
    r.c_hat = est.measure;
    r.f_c_hat = est.complete(1);
    r.f_r_hat = est.restricted(1);
    r.regime = cfg.model ? cfg.model->regime_at(i + 1) : 1;
    rows.push_back(r);
  }
  return rows;
}

double mean_abs_error(const CausalTrace& estimated, const CausalTrace& reference, std::size_t first,
                      std::size_t last) {
  if (first == 0 || last < first || last > estimated.size() || last > reference.size()) {
    throw std::out_of_range("mean_abs_error: bad round range");
  }
  double sum = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    sum += std::abs(estimated.rounds[i - 1].measure - reference.rounds[i - 1].measure);
  }
  return sum / static_cast<double>(last - first + 1);
}

std::optional<std::size_t> adaptation_window(const CausalTrace& estimated, const CausalTrace& reference,
                                             std::size_t change_point, std::size_t window, double tolerance) {
  const std::size_t n = std::min(estimated.size(), reference.size());
  if (change_point == 0) throw std::invalid_argument("adaptation_window: change point must be >= 1");
  // Running sums make the scan linear in n.
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    prefix[i] = prefix[i - 1] + std::abs(estimated.rounds[i - 1].measure - reference.rounds[i - 1].measure);
  }
  for (std::size_t w = 0; change_point + w + window <= n; ++w) {
    const std::size_t first = change_point + w;
    const std::size_t last = first + window;
    const double mean = (prefix[last] - prefix[first - 1]) / static_cast<double>(window + 1);
    if (mean < tolerance) return w;
  }
  return std::nullopt;
}

SpikeStats spike_localization(const CausalTrace& estimated, const CausalTrace& truth, const ProcessParams& params,
                              std::size_t settle_regime1, std::size_t settle_regime2) {
  const std::size_t n = std::min(estimated.size(), truth.size());
  auto included = [&](std::size_t round) {
    return params.regime_at(round) == 1 ? round >= settle_regime1 : round >= settle_regime2;
  };

  SpikeStats stats;
  for (int regime = 1; regime <= 2; ++regime) {
    std::vector<double> t, e;
    std::vector<std::size_t> rounds;
    for (std::size_t i = 1; i <= n; ++i) {
      if (params.regime_at(i) != regime || !included(i)) continue;
      t.push_back(truth.rounds[i - 1].measure);
      e.push_back(estimated.rounds[i - 1].measure);
      rounds.push_back(i);
    }
    if (rounds.empty()) continue;
    const double t_med = median(t);
    const double e_med = median(e);
    for (std::size_t k = 0; k < rounds.size(); ++k) {
      // A regime with no causal influence has C identically zero; float
      // noise there is not a spike.
      if (t[k] <= 3.0 * t_med || t[k] < 1e-9) continue;
      ++stats.spikes;
      if (e[k] > 2.0 * e_med) ++stats.matched;
    }
  }
  return stats;
}

}  // namespace pathcause::harness
