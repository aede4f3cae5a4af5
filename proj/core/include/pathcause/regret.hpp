#pragma once

// Regret accounting for causal-measure estimators: per-round log-loss regret,
// hindsight-optimal references, causality regret and the finite-sample
// envelope that bounds it, plus empirical checks of the inequalities that
// envelope is assembled from.

#include <cstddef>
#include <span>
#include <vector>

#include "pathcause/estimator.hpp"
#include "pathcause/pmf.hpp"
#include "pathcause/predictors.hpp"

namespace pathcause {

/// l(f_hat, x) - l(f_ref, x) in bits. Negative when the learner beats the reference.
double instantaneous_regret(const FinitePmf& learner, const FinitePmf& reference, Symbol x);

/// Per-context Bernoulli family used as the comparison class.
///
/// `points` empty means the continuum [0, 1]; otherwise members are the
/// listed success probabilities. With `stationary` set a single member per
/// context is used for the whole horizon.
struct ReferenceClass {
  std::vector<double> points{};
  bool stationary = true;

  static ReferenceClass continuum() { return {}; }
  static ReferenceClass grid(std::vector<double> pts) { return {std::move(pts), true}; }
  bool is_continuum() const noexcept { return points.empty(); }
  void validate() const;
};

/// Member of `cls` closest to `f` in D(f || member). Lowest index wins ties.
FinitePmf project_onto(const ReferenceClass& cls, const FinitePmf& f);

/// Cumulative-loss minimizing stationary member per context, expanded to one
/// pmf per round. contexts[i] is the context of round i.
std::vector<FinitePmf> best_reference(std::span<const Symbol> x, std::span<const ContextId> contexts,
                                      const ReferenceClass& cls);

/// sum_i |C_hat(i) - C_ref(i)|.
double causality_regret(const CausalTrace& estimated, const CausalTrace& reference);

/// max over rounds and symbols of |log2(f_complete(x) / f_restricted(x))|.
double empirical_L(const CausalTrace& trace);

/// Mc + Mr + (|X| L / sqrt 2) sqrt(n Mc).
double theorem1_envelope(double m_complete, double m_restricted, double L, std::size_t alphabet_size,
                         std::size_t n);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// sum_i D(reference_i || prediction_i) against the regret bound.
InequalityCheck kl_budget_check(std::span<const FinitePmf> references,
                                std::span<const FinitePmf> predictions, double regret_bound);

/// Runs `predictor` over x with the given contexts, picks the hindsight-best
/// member of `cls` and checks sum_i D(f*_i || f_hat_i) <= M(n).
InequalityCheck lemma1_check(Predictor predictor, std::span<const Symbol> x,
                             std::span<const ContextId> contexts, const ReferenceClass& cls);

/// g[i][x] must lie in [-K, K]. Checks
/// sum_i |E_{f*_i} g_i - E_{f_hat_i} g_i| <= (|X| K / sqrt 2) sqrt(n M).
InequalityCheck expectation_gap_check(std::span<const FinitePmf> references,
                                      std::span<const FinitePmf> predictions,
                                      std::span<const std::vector<double>> g, double K, double regret_bound);

InequalityCheck lemma2_check(Predictor predictor, std::span<const Symbol> x,
                             std::span<const ContextId> contexts, const ReferenceClass& cls,
                             std::span<const std::vector<double>> g, double K);

/// sum_i |E_{f*c_i}[ l(f_hat_r_i, X) - l(f*r_i, X) ]| against M_r.
InequalityCheck assumption2_check(std::span<const FinitePmf> complete_refs,
                                  std::span<const FinitePmf> restricted_predictions,
                                  std::span<const FinitePmf> restricted_refs, double m_restricted);

struct RegretReport {
  std::size_t n = 0;
  std::vector<double> learner_loss;    // complete predictor, per round
  std::vector<double> reference_loss;  // complete reference, per round
  double cumulative_regret_complete = 0.0;
  double cumulative_regret_restricted = 0.0;
  double m_complete = 0.0;
  double m_restricted = 0.0;
  double causality_regret = 0.0;
  double L_empirical = 0.0;
  double max_measure = 0.0;
  double theorem_bound = 0.0;
  InequalityCheck lemma1{};
  InequalityCheck lemma2{};
  InequalityCheck assumption2{};
  bool assumption1 = false;
  /// Assumptions 1 and 2 both hold, so the envelope is a guarantee.
  bool theorem_applicable = false;
  /// causality_regret <= theorem_bound.
  bool satisfied = false;
};

/// Assembles a report for one direction. `estimated` carries the learners'
/// pmfs; `reference` carries f*_c and f*_r per round and C* as its measure.
/// `effect` is the realized effect stream. The expectation-gap term uses
/// g_i = log2(f_hat_c / f_hat_r) with K = L_empirical.
RegretReport evaluate_regret(const CausalTrace& estimated, const CausalTrace& reference,
                             std::span<const Symbol> effect, double m_complete, double m_restricted,
                             std::size_t alphabet_size = 2);

/// C* trace built from oracle pmfs projected onto the reference class.
CausalTrace projected_reference(const CausalTrace& truth, const ReferenceClass& complete_cls,
                                const ReferenceClass& restricted_cls);

}  // namespace pathcause
