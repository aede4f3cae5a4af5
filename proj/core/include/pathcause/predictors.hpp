#pragma once

// Sequential probability assignment over per-context Bernoulli families.
//
// A predictor is driven by the prequential protocol: at each round the caller
// asks for predict(context) using only the past, then reveals the symbol via
// update(context, symbol). Contexts are small integer ids produced by
// ContextSpec::encode from the recent past of the own, cause and side streams.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pathcause/pmf.hpp"

namespace pathcause {

using ContextId = std::size_t;

class PredictorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Which streams feed a predictor's context and how far back each one looks.
///
/// The restricted predictor for Y -> X uses own (x) and side (z) pasts; the
/// complete predictor adds the cause (y) past. Rounds that do not yet have
/// max_order() symbols of history share a single boot context.
struct ContextSpec {
  std::size_t own_order = 1;
  std::size_t cause_order = 0;
  std::size_t side_order = 0;
  std::size_t alphabet_size = 2;

  std::size_t max_order() const noexcept;
  std::size_t regular_contexts() const;
  bool has_boot() const noexcept { return max_order() > 0; }
  ContextId boot_context() const { return regular_contexts(); }
  /// Regular contexts plus the boot context when there is one.
  std::size_t num_contexts() const { return regular_contexts() + (has_boot() ? 1 : 0); }

  /// Context id from the full pasts of each stream (oldest first). Streams with
  /// order 0 may be passed empty. Non-empty pasts must have equal length.
  ContextId encode(std::span<const Symbol> own_past, std::span<const Symbol> cause_past,
                   std::span<const Symbol> side_past) const;
};

/// Grid of candidate success probabilities for one context.
struct ParameterGrid {
  std::vector<double> points;

  /// G equally spaced points on [lo, hi].
  static ParameterGrid uniform(std::size_t grid_points, double lo = 0.025, double hi = 0.975);
  void validate() const;
};

/// Shrinking to the prior: after each Bayes step w <- lambda * w + (1 - lambda) * prior.
/// Only the alpha = 0 member of the family is supported.
struct ShrinkConfig {
  double alpha = 0.0;
  double lambda = 0.9999;

  void validate() const;
};

enum class PredictorKind { kAddHalf, kGrid, kFixed };

std::string_view to_string(PredictorKind kind) noexcept;
PredictorKind parse_predictor_kind(std::string_view name);

/// Add-half (Krichevsky-Trofimov) estimator, one count vector per context.
class AddHalfPredictor {
 public:
  explicit AddHalfPredictor(ContextSpec spec);

  FinitePmf predict(ContextId context) const;
  void update(ContextId context, Symbol observed);

  const ContextSpec& spec() const noexcept { return spec_; }
  std::span<const double> counts(ContextId context) const;

 private:
  void check(ContextId context) const;

  ContextSpec spec_;
  std::vector<double> counts_;  // num_contexts x alphabet_size
};

/// Bayes mixture over the product grid of per-context Bernoulli parameters,
/// uniform prior, with shrinking to the prior after every update.
///
/// The boot context is kept as a separate one-dimensional posterior; it is
/// visited at most max_order() times so it never couples with the product.
class GridPredictor {
 public:
  static constexpr std::size_t kMaxCells = std::size_t{1} << 23;

  GridPredictor(ContextSpec spec, ParameterGrid grid, ShrinkConfig shrink);

  FinitePmf predict(ContextId context) const;
  void update(ContextId context, Symbol observed);

  const ContextSpec& spec() const noexcept { return spec_; }
  const ParameterGrid& grid() const noexcept { return grid_; }
  const ShrinkConfig& shrink() const noexcept { return shrink_; }
  std::size_t cells() const noexcept { return weights_.size(); }

  /// Joint posterior over the product grid. Cell index is sum_c g_c * G^c.
  FinitePmf posterior() const { return FinitePmf(weights_); }
  FinitePmf boot_posterior() const { return FinitePmf(boot_weights_); }
  /// Posterior marginal of the parameter for one regular context.
  std::span<const double> marginal(ContextId context) const;

 private:
  // v <- v * scale + floor over the product grid, refreshing the per-context
  // marginals in the same sweep.
  void rescale_and_marginalize(double scale, double floor);

  ContextSpec spec_;
  ParameterGrid grid_;
  ShrinkConfig shrink_;
  std::vector<double> weights_;
  std::vector<double> marginals_;  // regular_contexts x G
  std::vector<double> scratch_;
  std::vector<double> boot_weights_;
};

/// Non-learning predictor with one fixed pmf per context. Used to plug known
/// conditional laws into the estimator.
class FixedPredictor {
 public:
  FixedPredictor(ContextSpec spec, std::vector<FinitePmf> table);

  FinitePmf predict(ContextId context) const;
  void update(ContextId context, Symbol observed);

  const ContextSpec& spec() const noexcept { return spec_; }

 private:
  ContextSpec spec_;
  std::vector<FinitePmf> table_;
};

/// Value-semantic handle over one of the concrete predictors.
class Predictor {
 public:
  explicit Predictor(AddHalfPredictor p) : impl_(std::move(p)) {}
  explicit Predictor(GridPredictor p) : impl_(std::move(p)) {}
  explicit Predictor(FixedPredictor p) : impl_(std::move(p)) {}

  FinitePmf predict(ContextId context) const;
  void update(ContextId context, Symbol observed);

  PredictorKind kind() const noexcept;
  const ContextSpec& spec() const noexcept;

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&impl_);
  }

 private:
  std::variant<AddHalfPredictor, GridPredictor, FixedPredictor> impl_;
};

/// Everything needed to build a predictor once its context is fixed.
struct PredictorSettings {
  PredictorKind kind = PredictorKind::kGrid;
  std::size_t order = 1;
  std::size_t grid_points = 21;
  ShrinkConfig shrink{};

  void validate() const;
};

Predictor make_predictor(const PredictorSettings& settings, const ContextSpec& spec);

struct RegretBoundInputs {
  PredictorKind kind = PredictorKind::kAddHalf;
  std::size_t rounds = 1;
  std::size_t num_contexts = 1;
  std::size_t alphabet_size = 2;
  // Grid predictor only.
  std::size_t grid_points = 21;
  double lambda = 1.0;
};

/// Worst-case log-loss regret bound M(n) in bits, clamped to at least 1.
///
/// Add-half over S binary contexts: S * (log2(n) / 2 + 1).
/// Grid mixture with C cells: log2(C) + n * (1 - lambda) * log2(C); the second
/// term prices shrinking against a fixed best cell (it dominates
/// -n * log2(lambda) for C >= 3).
double worst_case_regret_bound(const RegretBoundInputs& in);
double worst_case_regret_bound(const Predictor& predictor, std::size_t rounds);

}  // namespace pathcause
