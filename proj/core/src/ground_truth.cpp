#include "pathcause/ground_truth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pathcause/rng.hpp"

namespace pathcause {

RegimeCoefficients RegimeCoefficients::mirrored() const noexcept {
  return RegimeCoefficients{theta_y, theta_yy, theta_xy, theta_x, theta_xx, theta_yx};
}

void ProcessParams::validate() const {
  if (n < 1) throw std::invalid_argument("horizon n must be at least 1");
  if (change_point && (*change_point < 1 || *change_point > n)) {
    throw std::invalid_argument("change_point must lie in [1, n]");
  }
  for (const auto* r : {&regime1, &regime2}) {
    for (double v : {r->theta_x, r->theta_xx, r->theta_yx, r->theta_y, r->theta_yy, r->theta_xy}) {
      if (!std::isfinite(v)) throw std::invalid_argument("logistic coefficients must be finite");
    }
  }
}

int ProcessParams::regime_at(std::size_t round) const noexcept {
  return (change_point && round >= *change_point) ? 2 : 1;
}

const RegimeCoefficients& ProcessParams::coefficients_at(std::size_t round) const noexcept {
  return regime_at(round) == 2 ? regime2 : regime1;
}

ProcessParams ProcessParams::mirrored() const {
  ProcessParams m = *this;
  m.regime1 = regime1.mirrored();
  m.regime2 = regime2.mirrored();
  return m;
}

std::string_view to_string(FilterVariant v) noexcept {
  return v == FilterVariant::kExact ? "exact" : "paper-literal";
}

FilterVariant parse_filter_variant(std::string_view name) {
  if (name == "exact") return FilterVariant::kExact;
  if (name == "paper-literal") return FilterVariant::kPaperLiteral;
  throw std::invalid_argument("unknown filter variant '" + std::string(name) + "'");
}

double sigmoid(double v) noexcept {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

namespace {

double p_one(const RegimeCoefficients& c, Symbol x_prev, Symbol y_prev, Target target) noexcept {
  if (target == Target::kX) return sigmoid(c.theta_x + c.theta_xx * x_prev + c.theta_yx * y_prev);
  return sigmoid(c.theta_y + c.theta_yy * y_prev + c.theta_xy * x_prev);
}

double prob_of(double p1, Symbol s) noexcept { return s ? p1 : 1.0 - p1; }

void check_bits(std::span<const Symbol> s, const char* name) {
  for (Symbol v : s) {
    if (v > 1) throw std::invalid_argument(std::string(name) + " must be binary");
  }
}

}  // namespace

FinitePmf complete_pmf(const RegimeCoefficients& coeffs, Symbol x_prev, Symbol y_prev, Target target) {
  if (x_prev > 1 || y_prev > 1) throw std::invalid_argument("complete_pmf: symbols must be bits");
  return FinitePmf::bernoulli(p_one(coeffs, x_prev, y_prev, target));
}

JointSample simulate(const ProcessParams& params, std::uint64_t seed) {
  params.validate();
  StreamRng rx(seed, kStreamX);
  StreamRng ry(seed, kStreamY);
  JointSample out;
  out.x.resize(params.n);
  out.y.resize(params.n);
  out.x[0] = rx.bernoulli(0.5);
  out.y[0] = ry.bernoulli(0.5);
  for (std::size_t i = 1; i < params.n; ++i) {
    const auto& c = params.coefficients_at(i + 1);
    const Symbol xp = out.x[i - 1];
    const Symbol yp = out.y[i - 1];
    out.x[i] = rx.bernoulli(p_one(c, xp, yp, Target::kX));
    out.y[i] = ry.bernoulli(p_one(c, xp, yp, Target::kY));
  }
  return out;
}

FilterStep restricted_filter_step(const RegimeCoefficients& coeffs, const HiddenMarginal& marginal,
                                  Symbol x_prev, Symbol x_new) {
  if (x_prev > 1 || x_new > 1) throw std::invalid_argument("filter: symbols must be bits");
  const double ph = marginal.p_hidden;
  if (!(ph >= 0.0 && ph <= 1.0)) throw std::invalid_argument("hidden marginal outside [0, 1]");

  const double px_given_y1 = p_one(coeffs, x_prev, 1, Target::kX);
  const double px_given_y0 = p_one(coeffs, x_prev, 0, Target::kX);
  const double restricted_p1 = ph * px_given_y1 + (1.0 - ph) * px_given_y0;

  double post = ph;  // P(Y_{i-1} = 1 | x^{i-1}, and x_i for the exact variant)
  if (marginal.variant == FilterVariant::kExact) {
    const double a = ph * prob_of(px_given_y1, x_new);
    const double b = (1.0 - ph) * prob_of(px_given_y0, x_new);
    if (!(a + b > 0.0)) throw std::domain_error("filter: observation has zero likelihood");
    post = a / (a + b);
  }
  const double next = post * p_one(coeffs, x_prev, 1, Target::kY) +
                      (1.0 - post) * p_one(coeffs, x_prev, 0, Target::kY);
  return FilterStep{FinitePmf::bernoulli(restricted_p1), HiddenMarginal{next, marginal.variant}};
}

namespace {

// Depth-first enumeration of y_1..y_{m}, carrying the joint probability of the
// observed x prefix and the hidden path prefix.
struct PathSum {
  const ProcessParams& params;
  std::span<const Symbol> x;
  double numerator = 0.0;    // sum over paths of P(x^m, y^m) * P(X_{m+1} = 1 | x_m, y_m)
  double denominator = 0.0;  // sum over paths of P(x^m, y^m)

  void visit(std::size_t t, Symbol y_prev, double joint) {
    const std::size_t m = x.size();
    if (t == m) {
      const auto& c = params.coefficients_at(m + 1);
      numerator += joint * p_one(c, x[m - 1], y_prev, Target::kX);
      denominator += joint;
      return;
    }
    // Round t + 1 (1-based) draws x[t], y[t] given x[t-1], y_prev.
    const auto& c = params.coefficients_at(t + 1);
    const double px = prob_of(p_one(c, x[t - 1], y_prev, Target::kX), x[t]);
    if (px == 0.0) return;
    const double py1 = p_one(c, x[t - 1], y_prev, Target::kY);
    visit(t + 1, 1, joint * px * py1);
    visit(t + 1, 0, joint * px * (1.0 - py1));
  }
};

}  // namespace

FinitePmf brute_force_restricted(const ProcessParams& params, std::span<const Symbol> x_history) {
  check_bits(x_history, "x history");
  if (x_history.size() > kBruteForceMaxHistory) {
    throw std::invalid_argument("brute_force_restricted: history longer than " +
                                std::to_string(kBruteForceMaxHistory));
  }
  if (x_history.empty()) return FinitePmf::bernoulli(0.5);

  PathSum sum{params, x_history};
  // x_1 and y_1 are independent fair coins.
  sum.visit(1, 1, 0.25);
  sum.visit(1, 0, 0.25);
  if (!(sum.denominator > 0.0)) throw std::domain_error("brute_force_restricted: history has zero probability");
  return FinitePmf::bernoulli(sum.numerator / sum.denominator);
}

CausalTrace true_causal_trace(const ProcessParams& params, std::span<const Symbol> x,
                              std::span<const Symbol> y, Direction direction, FilterVariant variant) {
  if (x.size() != y.size()) throw std::invalid_argument("true_causal_trace: lengths differ");
  if (x.empty()) throw std::invalid_argument("true_causal_trace: empty input");
  check_bits(x, "x");
  check_bits(y, "y");
  params.validate();

  const ProcessParams p = direction == Direction::kYtoX ? params : params.mirrored();
  const auto effect = direction == Direction::kYtoX ? x : y;
  const auto cause = direction == Direction::kYtoX ? y : x;

  CausalTrace trace;
  trace.direction = direction;
  trace.rounds.reserve(effect.size());
  const auto half = FinitePmf::bernoulli(0.5);
  trace.rounds.push_back(CausalRound{1, half, half, 0.0});

  HiddenMarginal hidden{0.5, variant};
  for (std::size_t i = 1; i < effect.size(); ++i) {
    const std::size_t round = i + 1;
    const auto& c = p.coefficients_at(round);
    auto complete = complete_pmf(c, effect[i - 1], cause[i - 1], Target::kX);
    auto step = restricted_filter_step(c, hidden, effect[i - 1], effect[i]);
    const double d = kl_divergence(complete, step.restricted);
    trace.rounds.push_back(CausalRound{round, std::move(complete), std::move(step.restricted), d});
    hidden = step.next;
  }
  return trace;
}

ProcessParams example1_params(std::size_t n) {
  ProcessParams p;
  p.regime1.theta_yx = std::log(9.0);
  p.regime1.theta_y = std::log(0.2 / 0.8);
  p.regime2 = p.regime1;
  p.n = n;
  return p;
}

Example1Values example1_values() {
  const double p_y = 0.2;
  const double p_x_after_1 = 0.9;
  const double p_x_after_0 = 0.5;
  const double restricted = p_y * p_x_after_1 + (1.0 - p_y) * p_x_after_0;
  const auto fr = FinitePmf::bernoulli(restricted);
  const double c1 = kl_divergence(FinitePmf::bernoulli(p_x_after_1), fr);
  const double c0 = kl_divergence(FinitePmf::bernoulli(p_x_after_0), fr);
  return Example1Values{restricted, c1, c0, p_y * c1 + (1.0 - p_y) * c0};
}

double example1_closed_form(Symbol y_prev) {
  if (y_prev > 1) throw std::invalid_argument("example1_closed_form: y_prev must be a bit");
  const auto v = example1_values();
  return y_prev ? v.measure_given_y1 : v.measure_given_y0;
}

}  // namespace pathcause
