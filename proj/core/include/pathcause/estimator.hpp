#pragma once

// Online estimation of the per-round causal measure D(f_complete || f_restricted)
// from a pair of sequential predictors.

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pathcause/pmf.hpp"
#include "pathcause/predictors.hpp"

namespace pathcause {

/// Direction of influence. kYtoX measures how much the past of y improves the
/// prediction of x.
enum class Direction { kYtoX, kXtoY };

std::string_view to_string(Direction d) noexcept;
Direction parse_direction(std::string_view name);

/// One round of a causal trace: the two predictive pmfs for the effect symbol
/// and the divergence between them.
struct CausalRound {
  std::size_t round = 0;  // 1-based
  FinitePmf complete = FinitePmf::uniform(2);
  FinitePmf restricted = FinitePmf::uniform(2);
  double measure = 0.0;  // bits
};

struct CausalTrace {
  Direction direction = Direction::kYtoX;
  std::vector<CausalRound> rounds;

  std::size_t size() const noexcept { return rounds.size(); }
  std::vector<double> measures() const;
  double mean_measure() const;
};

struct EstimatorConfig {
  PredictorSettings complete{};
  PredictorSettings restricted{};
  std::size_t alphabet_size = 2;
};

/// Paired complete/restricted predictors for one direction.
///
/// Both predictors see the same effect history. The restricted context never
/// contains cause symbols.
class CausalEstimator {
 public:
  struct Step {
    double measure = 0.0;
    FinitePmf complete;
    FinitePmf restricted;
  };

  CausalEstimator(const EstimatorConfig& config, bool with_side);
  CausalEstimator(Predictor complete, Predictor restricted);

  /// Predict from the pre-round state, score, then reveal (effect, cause, side).
  Step step(Symbol effect, Symbol cause, Symbol side = 0);

  const Predictor& complete() const noexcept { return complete_; }
  const Predictor& restricted() const noexcept { return restricted_; }
  std::size_t rounds() const noexcept { return round_; }

 private:
  Predictor complete_;
  Predictor restricted_;
  std::size_t history_len_ = 0;
  std::deque<Symbol> effect_past_;
  std::deque<Symbol> cause_past_;
  std::deque<Symbol> side_past_;
  std::size_t round_ = 0;
};

/// Trace of D(f_complete || f_restricted) for predicting x from its own past,
/// the past of y and (optionally) the past of z. `side` may be empty.
CausalTrace run_trace(std::span<const Symbol> x, std::span<const Symbol> y, std::span<const Symbol> side,
                      const EstimatorConfig& config);

/// (Y -> X trace, X -> Y trace). The two directions share no state.
std::pair<CausalTrace, CausalTrace> run_bidirectional(std::span<const Symbol> x,
                                                      std::span<const Symbol> y,
                                                      std::span<const Symbol> side,
                                                      const EstimatorConfig& config);

}  // namespace pathcause
