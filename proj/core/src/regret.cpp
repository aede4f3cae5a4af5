#include "pathcause/regret.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace pathcause {
namespace {

constexpr double kTieTolerance = 1e-12;

// Cumulative log-loss (bits) of Bern(p) on n1 ones and n0 zeros.
double bernoulli_loss(double p, double n1, double n0) {
  double loss = 0.0;
  if (n1 > 0.0) loss -= n1 * std::log2(p);
  if (n0 > 0.0) loss -= n0 * std::log2(1.0 - p);
  return loss;
}

std::size_t best_grid_index(const std::vector<double>& points, double n1, double n0) {
  std::size_t best = 0;
  double best_loss = bernoulli_loss(points[0], n1, n0);
  for (std::size_t k = 1; k < points.size(); ++k) {
    const double loss = bernoulli_loss(points[k], n1, n0);
    if (loss < best_loss - kTieTolerance * std::max(1.0, std::abs(best_loss))) {
      best = k;
      best_loss = loss;
    }
  }
  return best;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

double instantaneous_regret(const FinitePmf& learner, const FinitePmf& reference, Symbol x) {
  if (learner.size() != reference.size()) throw PmfError("instantaneous_regret: alphabet mismatch");
  return self_information_loss(learner, x) - self_information_loss(reference, x);
}

void ReferenceClass::validate() const {
  for (double p : points) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("reference points must lie in [0, 1]");
  }
}

FinitePmf project_onto(const ReferenceClass& cls, const FinitePmf& f) {
  if (cls.is_continuum()) return f;
  if (f.size() != 2) throw PmfError("grid reference classes are binary");
  cls.validate();
  // Minimizing D(f || Bern(p)) is minimizing the cross-entropy.
  return FinitePmf::bernoulli(cls.points[best_grid_index(cls.points, f[1], f[0])]);
}

std::vector<FinitePmf> best_reference(std::span<const Symbol> x, std::span<const ContextId> contexts,
                                      const ReferenceClass& cls) {
  if (x.empty()) throw std::invalid_argument("best_reference: empty sequence");
  require_same_size(x.size(), contexts.size(), "best_reference");
  cls.validate();
  for (Symbol s : x) {
    if (s > 1) throw std::invalid_argument("best_reference: per-context Bernoulli classes are binary");
  }

  auto member = [&](double n1, double n0) {
    if (cls.is_continuum()) return FinitePmf::bernoulli(n1 / (n1 + n0));
    return FinitePmf::bernoulli(cls.points[best_grid_index(cls.points, n1, n0)]);
  };

  std::vector<FinitePmf> out;
  out.reserve(x.size());
  if (!cls.stationary) {
    for (Symbol s : x) out.push_back(member(s, 1.0 - s));
    return out;
  }

  const std::size_t num_ctx = *std::max_element(contexts.begin(), contexts.end()) + 1;
  std::vector<double> ones(num_ctx, 0.0), zeros(num_ctx, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) (x[i] ? ones : zeros)[contexts[i]] += 1.0;

  std::vector<std::optional<FinitePmf>> per_ctx(num_ctx);
  for (std::size_t c = 0; c < num_ctx; ++c) {
    if (ones[c] + zeros[c] > 0.0) per_ctx[c] = member(ones[c], zeros[c]);
  }
  for (ContextId c : contexts) out.push_back(*per_ctx[c]);
  return out;
}

double causality_regret(const CausalTrace& estimated, const CausalTrace& reference) {
  require_same_size(estimated.size(), reference.size(), "causality_regret");
  double cr = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const double a = estimated.rounds[i].measure;
    const double b = reference.rounds[i].measure;
    if (is_infinite(a) || is_infinite(b)) return kInfiniteBits;
    cr += std::abs(a - b);
  }
  return cr;
}

double empirical_L(const CausalTrace& trace) {
  double L = 0.0;
  for (const auto& r : trace.rounds) {
    if (r.complete.size() != r.restricted.size()) throw PmfError("empirical_L: alphabet mismatch");
    for (std::size_t x = 0; x < r.complete.size(); ++x) {
      const double c = r.complete[x];
      const double q = r.restricted[x];
      if (c == 0.0 && q == 0.0) continue;
      if (c == 0.0 || q == 0.0) return kInfiniteBits;
      L = std::max(L, std::abs(std::log2(c / q)));
    }
  }
  return L;
}

double theorem1_envelope(double m_complete, double m_restricted, double L, std::size_t alphabet_size,
                         std::size_t n) {
  if (!(m_complete >= 1.0) || !(m_restricted >= 1.0)) {
    throw std::invalid_argument("theorem1_envelope: regret bounds must be >= 1");
  }
  if (!(L >= 0.0)) throw std::invalid_argument("theorem1_envelope: L must be non-negative");
  if (alphabet_size < 2 || n < 1) throw std::invalid_argument("theorem1_envelope: bad alphabet or n");
  const double a = static_cast<double>(alphabet_size);
  return m_complete + m_restricted +
         (a * L / std::sqrt(2.0)) * std::sqrt(static_cast<double>(n) * m_complete);
}

InequalityCheck kl_budget_check(std::span<const FinitePmf> references,
                                std::span<const FinitePmf> predictions, double regret_bound) {
  require_same_size(references.size(), predictions.size(), "kl_budget_check");
  double lhs = 0.0;
  for (std::size_t i = 0; i < references.size(); ++i) lhs += kl_divergence(references[i], predictions[i]);
  return InequalityCheck{lhs, regret_bound, lhs <= regret_bound};
}

namespace {

std::vector<FinitePmf> replay(Predictor& predictor, std::span<const Symbol> x,
                              std::span<const ContextId> contexts) {
  require_same_size(x.size(), contexts.size(), "predictor replay");
  std::vector<FinitePmf> preds;
  preds.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    preds.push_back(predictor.predict(contexts[i]));
    predictor.update(contexts[i], x[i]);
  }
  return preds;
}

}  // namespace

InequalityCheck lemma1_check(Predictor predictor, std::span<const Symbol> x,
                             std::span<const ContextId> contexts, const ReferenceClass& cls) {
  const auto refs = best_reference(x, contexts, cls);
  const double bound = worst_case_regret_bound(predictor, x.size());
  const auto preds = replay(predictor, x, contexts);
  return kl_budget_check(refs, preds, bound);
}

InequalityCheck expectation_gap_check(std::span<const FinitePmf> references,
                                      std::span<const FinitePmf> predictions,
                                      std::span<const std::vector<double>> g, double K, double regret_bound) {
  require_same_size(references.size(), predictions.size(), "expectation_gap_check");
  require_same_size(references.size(), g.size(), "expectation_gap_check");
  if (!(regret_bound >= 1.0)) throw std::invalid_argument("expectation_gap_check: needs M(n) >= 1");
  if (!(K >= 0.0) || !std::isfinite(K)) throw std::invalid_argument("expectation_gap_check: K must be finite");

  double lhs = 0.0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto& f = references[i];
    const auto& q = predictions[i];
    if (g[i].size() != f.size() || q.size() != f.size()) {
      throw std::invalid_argument("expectation_gap_check: alphabet mismatch");
    }
    double gap = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (std::abs(g[i][x]) > K * (1.0 + 1e-12)) {
        throw std::invalid_argument("expectation_gap_check: g exceeds its declared bound K");
      }
      gap += (f[x] - q[x]) * g[i][x];
    }
    lhs += std::abs(gap);
  }
  const double n = static_cast<double>(references.size());
  const double a = references.empty() ? 2.0 : static_cast<double>(references[0].size());
  const double rhs = (a * K / std::sqrt(2.0)) * std::sqrt(n * regret_bound);
  return InequalityCheck{lhs, rhs, lhs <= rhs};
}

InequalityCheck lemma2_check(Predictor predictor, std::span<const Symbol> x,
                             std::span<const ContextId> contexts, const ReferenceClass& cls,
                             std::span<const std::vector<double>> g, double K) {
  const auto refs = best_reference(x, contexts, cls);
  const double bound = worst_case_regret_bound(predictor, x.size());
  const auto preds = replay(predictor, x, contexts);
  return expectation_gap_check(refs, preds, g, K, bound);
}

InequalityCheck assumption2_check(std::span<const FinitePmf> complete_refs,
                                  std::span<const FinitePmf> restricted_predictions,
                                  std::span<const FinitePmf> restricted_refs, double m_restricted) {
  require_same_size(complete_refs.size(), restricted_predictions.size(), "assumption2_check");
  require_same_size(complete_refs.size(), restricted_refs.size(), "assumption2_check");
  double lhs = 0.0;
  for (std::size_t i = 0; i < complete_refs.size(); ++i) {
    const auto& fc = complete_refs[i];
    double expected = 0.0;
    for (std::size_t x = 0; x < fc.size(); ++x) {
      if (fc[x] == 0.0) continue;
      const double r = instantaneous_regret(restricted_predictions[i], restricted_refs[i], static_cast<Symbol>(x));
      if (!std::isfinite(r)) return InequalityCheck{kInfiniteBits, m_restricted, false};
      expected += fc[x] * r;
    }
    lhs += std::abs(expected);
  }
  return InequalityCheck{lhs, m_restricted, lhs <= m_restricted};
}

CausalTrace projected_reference(const CausalTrace& truth, const ReferenceClass& complete_cls,
                                const ReferenceClass& restricted_cls) {
  CausalTrace out;
  out.direction = truth.direction;
  out.rounds.reserve(truth.size());
  for (const auto& r : truth.rounds) {
    auto fc = project_onto(complete_cls, r.complete);
    auto fr = project_onto(restricted_cls, r.restricted);
    const double d = kl_divergence(fc, fr);
    out.rounds.push_back(CausalRound{r.round, std::move(fc), std::move(fr), d});
  }
  return out;
}

RegretReport evaluate_regret(const CausalTrace& estimated, const CausalTrace& reference,
                             std::span<const Symbol> effect, double m_complete, double m_restricted,
                             std::size_t alphabet_size) {
  const std::size_t n = estimated.size();
  if (n == 0) throw std::invalid_argument("evaluate_regret: empty trace");
  require_same_size(n, reference.size(), "evaluate_regret");
  require_same_size(n, effect.size(), "evaluate_regret");

  RegretReport rep;
  rep.n = n;
  rep.m_complete = std::max(m_complete, 1.0);
  rep.m_restricted = std::max(m_restricted, 1.0);

  std::vector<FinitePmf> fc_hat, fr_hat, fc_ref, fr_ref;
  for (const auto& r : estimated.rounds) {
    fc_hat.push_back(r.complete);
    fr_hat.push_back(r.restricted);
    rep.max_measure = std::max(rep.max_measure, r.measure);
  }
  for (const auto& r : reference.rounds) {
    fc_ref.push_back(r.complete);
    fr_ref.push_back(r.restricted);
  }

  rep.learner_loss.resize(n);
  rep.reference_loss.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.learner_loss[i] = self_information_loss(fc_hat[i], effect[i]);
    rep.reference_loss[i] = self_information_loss(fc_ref[i], effect[i]);
    rep.cumulative_regret_complete += rep.learner_loss[i] - rep.reference_loss[i];
    rep.cumulative_regret_restricted += instantaneous_regret(fr_hat[i], fr_ref[i], effect[i]);
  }

  rep.causality_regret = causality_regret(estimated, reference);
  rep.L_empirical = empirical_L(estimated);
  rep.assumption1 = std::isfinite(rep.L_empirical);
  rep.lemma1 = kl_budget_check(fc_ref, fc_hat, rep.m_complete);
  rep.assumption2 = assumption2_check(fc_ref, fr_hat, fr_ref, rep.m_restricted);

  if (rep.assumption1) {
    std::vector<std::vector<double>> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i].resize(fc_hat[i].size());
      for (std::size_t x = 0; x < g[i].size(); ++x) {
        const double c = fc_hat[i][x];
        const double q = fr_hat[i][x];
        g[i][x] = (c == 0.0 && q == 0.0) ? 0.0 : std::log2(c / q);
      }
    }
    rep.lemma2 = expectation_gap_check(fc_ref, fc_hat, g, rep.L_empirical, rep.m_complete);
    rep.theorem_bound =
        theorem1_envelope(rep.m_complete, rep.m_restricted, rep.L_empirical, alphabet_size, n);
  } else {
    rep.lemma2 = InequalityCheck{kInfiniteBits, kInfiniteBits, false};
    rep.theorem_bound = kInfiniteBits;
  }

  rep.theorem_applicable = rep.assumption1 && rep.assumption2.holds;
  rep.satisfied = rep.causality_regret <= rep.theorem_bound;
  return rep;
}

}  // namespace pathcause
