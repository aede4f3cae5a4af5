#include "pathcause/estimator.hpp"

#include <algorithm>
#include <string>

namespace pathcause {
namespace {

std::span<const Symbol> as_span(const std::deque<Symbol>& d, std::vector<Symbol>& scratch) {
  scratch.assign(d.begin(), d.end());
  return scratch;
}

void push_bounded(std::deque<Symbol>& d, Symbol s, std::size_t cap) {
  if (cap == 0) return;
  d.push_back(s);
  if (d.size() > cap) d.pop_front();
}

}  // namespace

std::string_view to_string(Direction d) noexcept { return d == Direction::kYtoX ? "yx" : "xy"; }

Direction parse_direction(std::string_view name) {
  if (name == "yx") return Direction::kYtoX;
  if (name == "xy") return Direction::kXtoY;
  throw std::invalid_argument("unknown direction '" + std::string(name) + "'");
}

std::vector<double> CausalTrace::measures() const {
  std::vector<double> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.measure);
  return out;
}

double CausalTrace::mean_measure() const {
  if (rounds.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rounds) s += r.measure;
  return s / static_cast<double>(rounds.size());
}

CausalEstimator::CausalEstimator(Predictor complete, Predictor restricted)
    : complete_(std::move(complete)), restricted_(std::move(restricted)) {
  const auto& c = complete_.spec();
  const auto& r = restricted_.spec();
  if (r.cause_order != 0) {
    throw std::invalid_argument("restricted predictor must not condition on the cause stream");
  }
  if (c.alphabet_size != r.alphabet_size) {
    throw std::invalid_argument("complete and restricted alphabets differ");
  }
  history_len_ = std::max(c.max_order(), r.max_order());
}

CausalEstimator::CausalEstimator(const EstimatorConfig& config, bool with_side)
    : CausalEstimator(
          make_predictor(config.complete,
                         ContextSpec{config.complete.order, config.complete.order,
                                     with_side ? config.complete.order : 0, config.alphabet_size}),
          make_predictor(config.restricted,
                         ContextSpec{config.restricted.order, 0,
                                     with_side ? config.restricted.order : 0, config.alphabet_size})) {}

CausalEstimator::Step CausalEstimator::step(Symbol effect, Symbol cause, Symbol side) {
  // The deques hold at most history_len_ symbols from before this round.
  std::vector<Symbol> e, c, s;
  const auto own = as_span(effect_past_, e);
  const auto cause_span = as_span(cause_past_, c);
  const auto side_span = as_span(side_past_, s);

  auto context_for = [&](const ContextSpec& spec) {
    return spec.encode(own, spec.cause_order ? cause_span : std::span<const Symbol>{},
                       spec.side_order ? side_span : std::span<const Symbol>{});
  };
  const ContextId cc = context_for(complete_.spec());
  const ContextId rc = context_for(restricted_.spec());

  Step out{0.0, complete_.predict(cc), restricted_.predict(rc)};
  out.measure = kl_divergence(out.complete, out.restricted);

  complete_.update(cc, effect);
  restricted_.update(rc, effect);
  push_bounded(effect_past_, effect, history_len_);
  push_bounded(cause_past_, cause, history_len_);
  push_bounded(side_past_, side, history_len_);
  ++round_;
  return out;
}

CausalTrace run_trace(std::span<const Symbol> x, std::span<const Symbol> y, std::span<const Symbol> side,
                      const EstimatorConfig& config) {
  if (x.empty()) throw std::invalid_argument("run_trace: empty input");
  if (y.size() != x.size()) throw std::invalid_argument("run_trace: x and y lengths differ");
  const bool with_side = !side.empty();
  if (with_side && side.size() != x.size()) {
    throw std::invalid_argument("run_trace: side stream length differs");
  }

  CausalEstimator est(config, with_side);
  CausalTrace trace;
  trace.direction = Direction::kYtoX;
  trace.rounds.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto st = est.step(x[i], y[i], with_side ? side[i] : Symbol{0});
    trace.rounds.push_back(CausalRound{i + 1, std::move(st.complete), std::move(st.restricted), st.measure});
  }
  return trace;
}

std::pair<CausalTrace, CausalTrace> run_bidirectional(std::span<const Symbol> x,
                                                      std::span<const Symbol> y,
                                                      std::span<const Symbol> side,
                                                      const EstimatorConfig& config) {
  auto yx = run_trace(x, y, side, config);
  auto xy = run_trace(y, x, side, config);
  xy.direction = Direction::kXtoY;
  return {std::move(yx), std::move(xy)};
}

}  // namespace pathcause
