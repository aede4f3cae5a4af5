#include "pathcause/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pathcause {
namespace {

std::size_t checked_power(std::size_t base, std::size_t exponent, std::size_t limit) {
  std::size_t out = 1;
  for (std::size_t e = 0; e < exponent; ++e) {
    if (out > limit / base) {
      throw PredictorError("context space too large");
    }
    out *= base;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- ContextSpec

std::size_t ContextSpec::max_order() const noexcept {
  return std::max({own_order, cause_order, side_order});
}

std::size_t ContextSpec::regular_contexts() const {
  if (alphabet_size < 2) throw PredictorError("alphabet_size must be at least 2");
  return checked_power(alphabet_size, own_order + cause_order + side_order, std::size_t{1} << 20);
}

ContextId ContextSpec::encode(std::span<const Symbol> own_past, std::span<const Symbol> cause_past,
                              std::span<const Symbol> side_past) const {
  const std::size_t len = own_past.size();
  if (cause_order > 0 && cause_past.size() != len) {
    throw PredictorError("cause past length differs from own past");
  }
  if (side_order > 0 && side_past.size() != len) {
    throw PredictorError("side past length differs from own past");
  }
  if (len < max_order()) return boot_context();

  ContextId id = 0;
  ContextId radix = 1;
  auto push = [&](std::span<const Symbol> past, std::size_t order) {
    for (std::size_t lag = 1; lag <= order; ++lag) {
      const Symbol s = past[past.size() - lag];
      if (s >= alphabet_size) throw PredictorError("context symbol outside alphabet");
      id += radix * s;
      radix *= alphabet_size;
    }
  };
  push(own_past, own_order);
  push(cause_past, cause_order);
  push(side_past, side_order);
  return id;
}

// ---------------------------------------------------------- grid and shrink

ParameterGrid ParameterGrid::uniform(std::size_t grid_points, double lo, double hi) {
  if (grid_points < 1) throw PredictorError("grid needs at least one point");
  ParameterGrid g;
  g.points.resize(grid_points);
  if (grid_points == 1) {
    g.points[0] = 0.5 * (lo + hi);
  } else {
    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    for (std::size_t k = 0; k < grid_points; ++k) g.points[k] = lo + step * static_cast<double>(k);
  }
  g.validate();
  return g;
}

void ParameterGrid::validate() const {
  if (points.empty()) throw PredictorError("empty parameter grid");
  for (double p : points) {
    if (!(p > 0.0 && p < 1.0)) {
      throw PredictorError("grid points must lie strictly inside (0, 1)");
    }
  }
}

void ShrinkConfig::validate() const {
  if (alpha != 0.0) throw PredictorError("only alpha = 0 shrinking is supported");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw PredictorError("lambda must lie in (0, 1]");
}

std::string_view to_string(PredictorKind kind) noexcept {
  switch (kind) {
    case PredictorKind::kAddHalf:
      return "add-half";
    case PredictorKind::kGrid:
      return "grid";
    case PredictorKind::kFixed:
      return "fixed";
  }
  return "unknown";
}

PredictorKind parse_predictor_kind(std::string_view name) {
  if (name == "add-half" || name == "kt") return PredictorKind::kAddHalf;
  if (name == "grid") return PredictorKind::kGrid;
  throw PredictorError("unknown predictor kind '" + std::string(name) + "'");
}

// ------------------------------------------------------------------ add-half

AddHalfPredictor::AddHalfPredictor(ContextSpec spec)
    : spec_(spec), counts_(spec_.num_contexts() * spec_.alphabet_size, 0.0) {}

void AddHalfPredictor::check(ContextId context) const {
  if (context >= spec_.num_contexts()) throw PredictorError("context id out of range");
}

FinitePmf AddHalfPredictor::predict(ContextId context) const {
  check(context);
  const std::size_t a = spec_.alphabet_size;
  const auto c = counts(context);
  const double total = std::accumulate(c.begin(), c.end(), 0.0);
  std::vector<double> mass(a);
  for (std::size_t x = 0; x < a; ++x) mass[x] = (c[x] + 0.5) / (total + 0.5 * static_cast<double>(a));
  return FinitePmf(std::move(mass));
}

void AddHalfPredictor::update(ContextId context, Symbol observed) {
  check(context);
  if (observed >= spec_.alphabet_size) throw PredictorError("observed symbol outside alphabet");
  counts_[context * spec_.alphabet_size + observed] += 1.0;
}

std::span<const double> AddHalfPredictor::counts(ContextId context) const {
  check(context);
  return std::span<const double>(counts_).subspan(context * spec_.alphabet_size, spec_.alphabet_size);
}

// ---------------------------------------------------------------------- grid

GridPredictor::GridPredictor(ContextSpec spec, ParameterGrid grid, ShrinkConfig shrink)
    : spec_(spec), grid_(std::move(grid)), shrink_(shrink) {
  if (spec_.alphabet_size != 2) throw PredictorError("grid predictor is binary only");
  grid_.validate();
  shrink_.validate();
  const std::size_t g = grid_.points.size();
  const std::size_t cells = checked_power(g, spec_.regular_contexts(), kMaxCells);
  weights_.assign(cells, 1.0 / static_cast<double>(cells));
  boot_weights_.assign(g, 1.0 / static_cast<double>(g));
  marginals_.assign(spec_.regular_contexts() * g, 1.0 / static_cast<double>(g));
}

std::span<const double> GridPredictor::marginal(ContextId context) const {
  if (context >= spec_.regular_contexts()) throw PredictorError("context id out of range");
  const std::size_t g = grid_.points.size();
  return std::span<const double>(marginals_).subspan(context * g, g);
}

FinitePmf GridPredictor::predict(ContextId context) const {
  if (context >= spec_.num_contexts()) throw PredictorError("context id out of range");
  const auto w = (spec_.has_boot() && context == spec_.boot_context())
                     ? std::span<const double>(boot_weights_)
                     : marginal(context);
  double p1 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) p1 += w[k] * grid_.points[k];
  return FinitePmf::bernoulli(std::clamp(p1, 0.0, 1.0));
}

void GridPredictor::update(ContextId context, Symbol observed) {
  if (context >= spec_.num_contexts()) throw PredictorError("context id out of range");
  if (observed > 1) throw PredictorError("observed symbol outside alphabet");
  const std::size_t g = grid_.points.size();
  const double lambda = shrink_.lambda;

  std::vector<double> lik(g);
  for (std::size_t k = 0; k < g; ++k) lik[k] = observed ? grid_.points[k] : 1.0 - grid_.points[k];

  if (spec_.has_boot() && context == spec_.boot_context()) {
    double z = 0.0;
    for (std::size_t k = 0; k < g; ++k) z += (boot_weights_[k] *= lik[k]);
    const double prior = 1.0 / static_cast<double>(g);
    for (double& w : boot_weights_) w = lambda * (w / z) + (1.0 - lambda) * prior;
    return;
  }

  // Axis `context` of the product grid has stride G^context.
  std::size_t stride = 1;
  for (std::size_t c = 0; c < context; ++c) stride *= g;
  const std::size_t outer = weights_.size() / (stride * g);

  double z = 0.0;
  double* w = weights_.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t k = 0; k < g; ++k) {
      const double l = lik[k];
      double* block = w + (o * g + k) * stride;
      double partial = 0.0;
      for (std::size_t in = 0; in < stride; ++in) {
        block[in] *= l;
        partial += block[in];
      }
      z += partial;
    }
  }

  rescale_and_marginalize(lambda / z, (1.0 - lambda) / static_cast<double>(weights_.size()));
}

void GridPredictor::rescale_and_marginalize(double scale, double floor) {
  const std::size_t g = grid_.points.size();
  const std::size_t contexts = spec_.regular_contexts();
  std::fill(marginals_.begin(), marginals_.end(), 0.0);

  // Axis 0 is contiguous: rescale, accumulate its marginal and collapse it
  // into scratch_, leaving a grid with one axis fewer.
  std::size_t rows = weights_.size() / g;
  scratch_.resize(rows);
  double* w = weights_.data();
  double* m = marginals_.data();
  for (std::size_t o = 0; o < rows; ++o) {
    double* row = w + o * g;
    double sum = 0.0;
    for (std::size_t k = 0; k < g; ++k) {
      const double v = row[k] * scale + floor;
      row[k] = v;
      m[k] += v;
      sum += v;
    }
    scratch_[o] = sum;
  }
  // The remaining axes, one at a time, on the shrinking scratch grid.
  for (std::size_t c = 1; c < contexts; ++c) {
    rows /= g;
    m = marginals_.data() + c * g;
    for (std::size_t o = 0; o < rows; ++o) {
      const double* row = scratch_.data() + o * g;
      double sum = 0.0;
      for (std::size_t k = 0; k < g; ++k) {
        m[k] += row[k];
        sum += row[k];
      }
      scratch_[o] = sum;
    }
  }
}

// --------------------------------------------------------------------- fixed

FixedPredictor::FixedPredictor(ContextSpec spec, std::vector<FinitePmf> table)
    : spec_(spec), table_(std::move(table)) {
  if (table_.size() != spec_.num_contexts()) {
    throw PredictorError("fixed predictor needs one pmf per context");
  }
  for (const auto& f : table_) {
    if (f.size() != spec_.alphabet_size) throw PredictorError("fixed pmf alphabet mismatch");
  }
}

FinitePmf FixedPredictor::predict(ContextId context) const {
  if (context >= table_.size()) throw PredictorError("context id out of range");
  return table_[context];
}

void FixedPredictor::update(ContextId context, Symbol observed) {
  if (context >= table_.size()) throw PredictorError("context id out of range");
  if (observed >= spec_.alphabet_size) throw PredictorError("observed symbol outside alphabet");
}

// ----------------------------------------------------------------- Predictor

FinitePmf Predictor::predict(ContextId context) const {
  return std::visit([&](const auto& p) { return p.predict(context); }, impl_);
}

void Predictor::update(ContextId context, Symbol observed) {
  std::visit([&](auto& p) { p.update(context, observed); }, impl_);
}

PredictorKind Predictor::kind() const noexcept {
  switch (impl_.index()) {
    case 0:
      return PredictorKind::kAddHalf;
    case 1:
      return PredictorKind::kGrid;
    default:
      return PredictorKind::kFixed;
  }
}

const ContextSpec& Predictor::spec() const noexcept {
  return std::visit([](const auto& p) -> const ContextSpec& { return p.spec(); }, impl_);
}

void PredictorSettings::validate() const {
  if (kind == PredictorKind::kGrid) {
    if (grid_points < 1) throw PredictorError("grid_points must be positive");
    shrink.validate();
  }
}

Predictor make_predictor(const PredictorSettings& settings, const ContextSpec& spec) {
  settings.validate();
  switch (settings.kind) {
    case PredictorKind::kAddHalf:
      return Predictor(AddHalfPredictor(spec));
    case PredictorKind::kGrid:
      return Predictor(GridPredictor(spec, ParameterGrid::uniform(settings.grid_points), settings.shrink));
    case PredictorKind::kFixed:
      break;
  }
  throw PredictorError("unknown predictor kind");
}

// -------------------------------------------------------------- regret bound

double worst_case_regret_bound(const RegretBoundInputs& in) {
  if (in.rounds < 1) throw PredictorError("regret bound needs n >= 1");
  if (in.num_contexts < 1) throw PredictorError("regret bound needs at least one context");
  const double n = static_cast<double>(in.rounds);
  double bound = 0.0;
  switch (in.kind) {
    case PredictorKind::kAddHalf:
      if (in.alphabet_size != 2) throw PredictorError("add-half bound is stated for binary alphabets");
      bound = static_cast<double>(in.num_contexts) * (0.5 * std::log2(n) + 1.0);
      break;
    case PredictorKind::kGrid: {
      if (in.grid_points < 1) throw PredictorError("grid_points must be positive");
      if (!(in.lambda > 0.0 && in.lambda <= 1.0)) throw PredictorError("lambda must lie in (0, 1]");
      const double log_cells =
          static_cast<double>(in.num_contexts) * std::log2(static_cast<double>(in.grid_points));
      // c_shrink = log2(1 / min prior weight) = log_cells under the uniform prior.
      bound = log_cells + n * (1.0 - in.lambda) * log_cells;
      break;
    }
    default:
      throw PredictorError("unknown predictor kind");
  }
  return std::max(bound, 1.0);
}

double worst_case_regret_bound(const Predictor& predictor, std::size_t rounds) {
  RegretBoundInputs in;
  in.kind = predictor.kind();
  in.rounds = rounds;
  in.num_contexts = predictor.spec().num_contexts();
  in.alphabet_size = predictor.spec().alphabet_size;
  if (const auto* grid = predictor.as<GridPredictor>()) {
    in.grid_points = grid->grid().points.size();
    in.lambda = grid->shrink().lambda;
  }
  return worst_case_regret_bound(in);
}

}  // namespace pathcause
