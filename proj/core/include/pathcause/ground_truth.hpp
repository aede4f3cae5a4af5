#pragma once

// Jointly Markov binary processes driven by a two-regime logistic model, and
// the exact causal measure they induce.
//
// Round i (1-based) draws x_i and y_i from the regime active at i given
// (x_{i-1}, y_{i-1}); regime 1 applies for i < change_point and regime 2 from
// change_point on. x_1 and y_1 are independent fair coins.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pathcause/estimator.hpp"
#include "pathcause/pmf.hpp"

namespace pathcause {

/// Logistic coefficients for one regime.
///   P(X_i = 1) = sigmoid(theta_x + theta_xx * x_{i-1} + theta_yx * y_{i-1})
///   P(Y_i = 1) = sigmoid(theta_y + theta_yy * y_{i-1} + theta_xy * x_{i-1})
struct RegimeCoefficients {
  double theta_x = 0.0;
  double theta_xx = 0.0;
  double theta_yx = 0.0;
  double theta_y = 0.0;
  double theta_yy = 0.0;
  double theta_xy = 0.0;

  /// Roles of x and y exchanged.
  RegimeCoefficients mirrored() const noexcept;
  friend bool operator==(const RegimeCoefficients&, const RegimeCoefficients&) = default;
};

struct ProcessParams {
  RegimeCoefficients regime1{};
  RegimeCoefficients regime2{};
  std::optional<std::size_t> change_point{};
  std::size_t n = 1000;

  void validate() const;
  /// 1 or 2.
  int regime_at(std::size_t round) const noexcept;
  const RegimeCoefficients& coefficients_at(std::size_t round) const noexcept;
  ProcessParams mirrored() const;
};

enum class Target { kX, kY };
enum class FilterVariant { kExact, kPaperLiteral };

std::string_view to_string(FilterVariant v) noexcept;
FilterVariant parse_filter_variant(std::string_view name);

/// Filtered probability that the latest symbol of the unobserved stream is 1.
struct HiddenMarginal {
  double p_hidden = 0.5;
  FilterVariant variant = FilterVariant::kExact;
};

struct JointSample {
  std::vector<Symbol> x;
  std::vector<Symbol> y;
};

double sigmoid(double v) noexcept;

FinitePmf complete_pmf(const RegimeCoefficients& coeffs, Symbol x_prev, Symbol y_prev, Target target);

/// Draws (x^n, y^n). X and Y use separate generator streams derived from seed.
JointSample simulate(const ProcessParams& params, std::uint64_t seed);

struct FilterStep {
  FinitePmf restricted;  // law of X_i given x^{i-1}
  HiddenMarginal next;   // hidden marginal for Y_i
};

/// Given P(Y_{i-1} = 1 | x^{i-1}), returns the restricted law of X_i and, once
/// x_i = x_new is seen, the hidden marginal for Y_i. `coeffs` is the regime
/// active at round i. The exact variant conditions y_{i-1} on x_new before
/// propagating; the paper-literal variant propagates without that correction.
FilterStep restricted_filter_step(const RegimeCoefficients& coeffs, const HiddenMarginal& marginal,
                                  Symbol x_prev, Symbol x_new);

/// Restricted law of X_i given x^{i-1} by summing over every hidden path
/// y^{i-1}. Test oracle; i - 1 is capped at kBruteForceMaxHistory.
inline constexpr std::size_t kBruteForceMaxHistory = 22;
FinitePmf brute_force_restricted(const ProcessParams& params, std::span<const Symbol> x_history);

/// True complete and restricted laws of the effect stream at every round and
/// their divergence. For kXtoY the roles of x and y are swapped.
CausalTrace true_causal_trace(const ProcessParams& params, std::span<const Symbol> x,
                              std::span<const Symbol> y, Direction direction,
                              FilterVariant variant = FilterVariant::kExact);

/// Y i.i.d. Bern(0.2); X ~ Bern(0.9) after y = 1 and Bern(0.5) after y = 0.
ProcessParams example1_params(std::size_t n);

struct Example1Values {
  double restricted_p1;     // P(X_i = 1) with y_{i-1} unseen
  double measure_given_y1;  // bits
  double measure_given_y0;  // bits
  double expected_measure;  // weighted by P(Y = 1) = 0.2
};

Example1Values example1_values();
double example1_closed_form(Symbol y_prev);

}  // namespace pathcause
