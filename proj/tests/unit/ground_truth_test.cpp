#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pathcause/ground_truth.hpp"
#include "pathcause/rng.hpp"

using namespace pathcause;

namespace {

RegimeCoefficients random_regime(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  return {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
}

ProcessParams decoupled(std::size_t n) {
  ProcessParams p;
  p.regime1 = {0.3, -0.8, 0.0, -0.2, 1.1, 1.7};
  p.regime2 = p.regime1;
  p.n = n;
  return p;
}

}  // namespace

TEST(CompletePmf, LogisticForm) {
  const RegimeCoefficients zero{};
  EXPECT_EQ(complete_pmf(zero, 1, 1, Target::kX), FinitePmf::bernoulli(0.5));
  RegimeCoefficients c{};
  c.theta_yx = std::log(9.0);
  EXPECT_NEAR(complete_pmf(c, 0, 1, Target::kX)(1), 0.9, 1e-15);
  EXPECT_NEAR(complete_pmf(c, 1, 0, Target::kX)(1), 0.5, 1e-15);
  // Target Y uses theta_y, theta_yy, theta_xy.
  RegimeCoefficients d{};
  d.theta_y = -1.0;
  d.theta_xy = 2.0;
  EXPECT_NEAR(complete_pmf(d, 1, 0, Target::kY)(1), sigmoid(1.0), 1e-15);
  EXPECT_NEAR(complete_pmf(d, 0, 1, Target::kY)(1), sigmoid(-1.0), 1e-15);
}

TEST(ProcessParams, Validation) {
  ProcessParams p;
  p.n = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.n = 10;
  p.change_point = 11;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.change_point = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.change_point = 5;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.regime_at(4), 1);
  EXPECT_EQ(p.regime_at(5), 2);
  p.regime1.theta_x = INFINITY;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Simulate, FairCoin) {
  ProcessParams p;
  p.n = 10000;
  const auto s = simulate(p, 1);
  ASSERT_EQ(s.x.size(), p.n);
  double mean = 0.0;
  for (auto v : s.x) mean += v;
  mean /= static_cast<double>(p.n);
  EXPECT_NEAR(mean, 0.5, 3.0 * 0.5 / std::sqrt(10000.0));
}

TEST(Simulate, Deterministic) {
  const auto p = example1_params(500);
  const auto a = simulate(p, 42);
  const auto b = simulate(p, 42);
  const auto c = simulate(p, 43);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(a.x, c.x);
}

TEST(Simulate, ExampleOneCauseRate) {
  const auto s = simulate(example1_params(10000), 5);
  double mean = 0.0;
  for (auto v : s.y) mean += v;
  mean /= 10000.0;
  EXPECT_NEAR(mean, 0.2, 3.0 * std::sqrt(0.16 / 10000.0));
}

TEST(Rng, StreamsDiffer) {
  StreamRng a(1, kStreamX), b(1, kStreamY);
  EXPECT_NE(a.uniform(), b.uniform());
  StreamRng c(1, kStreamX);
  StreamRng d(1, kStreamX);
  for (int i = 0; i < 100; ++i) {
    const double u = c.uniform();
    ASSERT_EQ(u, d.uniform());
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Filter, NoCouplingMeansNoMixing) {
  RegimeCoefficients c{0.4, -0.7, 0.0, 0.2, 0.9, 1.3};
  for (double ph : {0.0, 0.13, 0.5, 0.99, 1.0}) {
    for (Symbol xp : {0, 1}) {
      const auto step = restricted_filter_step(c, {ph, FilterVariant::kExact}, xp, 1);
      EXPECT_NEAR(step.restricted(1), complete_pmf(c, xp, 0, Target::kX)(1), 1e-15);
      EXPECT_GE(step.next.p_hidden, 0.0);
      EXPECT_LE(step.next.p_hidden, 1.0);
    }
  }
}

TEST(Filter, ExampleOneStationaryMixture) {
  const auto p = example1_params(10);
  for (auto v : {FilterVariant::kExact, FilterVariant::kPaperLiteral}) {
    const auto step = restricted_filter_step(p.regime1, {0.2, v}, 0, 1);
    EXPECT_NEAR(step.restricted(1), 0.58, 1e-12);
    EXPECT_NEAR(step.next.p_hidden, 0.2, 1e-12);
  }
}

TEST(BruteForce, SmallCases) {
  const auto p = example1_params(30);
  EXPECT_EQ(brute_force_restricted(p, {}), FinitePmf::bernoulli(0.5));
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t len = 2 + trial % 12;
    std::vector<Symbol> h(len);
    for (auto& s : h) s = rng() & 1;
    EXPECT_NEAR(brute_force_restricted(p, h)(1), 0.58, 1e-6);
  }
  const auto q = decoupled(30);
  const std::vector<Symbol> h{1, 0, 1, 1};
  EXPECT_NEAR(brute_force_restricted(q, h)(1), complete_pmf(q.regime1, 1, 0, Target::kX)(1), 1e-12);
  EXPECT_THROW(brute_force_restricted(p, std::vector<Symbol>(kBruteForceMaxHistory + 1, 0)),
               std::invalid_argument);
}

TEST(BruteForce, FilterMatchesEnumeration) {
  std::mt19937_64 rng(99);
  for (int draw = 0; draw < 100; ++draw) {
    ProcessParams p;
    p.regime1 = random_regime(rng);
    p.regime2 = draw % 2 ? random_regime(rng) : p.regime1;
    p.n = 20;
    if (draw % 2) p.change_point = 2 + rng() % 18;
    const auto s = simulate(p, 1000 + draw);
    const auto t = true_causal_trace(p, s.x, s.y, Direction::kYtoX, FilterVariant::kExact);
    for (std::size_t i = 1; i <= p.n; ++i) {
      const auto bf = brute_force_restricted(p, std::span(s.x).first(i - 1));
      ASSERT_NEAR(t.rounds[i - 1].restricted(1), bf(1), 1e-10) << "draw " << draw << " round " << i;
    }
    // Reverse direction through the mirrored model.
    const auto r = true_causal_trace(p, s.x, s.y, Direction::kXtoY, FilterVariant::kExact);
    const auto pm = p.mirrored();
    for (std::size_t i = 1; i <= p.n; ++i) {
      const auto bf = brute_force_restricted(pm, std::span(s.y).first(i - 1));
      ASSERT_NEAR(r.rounds[i - 1].restricted(1), bf(1), 1e-10) << "draw " << draw << " round " << i;
    }
  }
}

TEST(BruteForce, JointlyButNotMarginallyMarkov) {
  ProcessParams p;
  p.regime1 = {-0.3, 0.4, 2.0, 0.1, 1.5, -2.0};
  p.regime2 = p.regime1;
  p.n = 10;
  // Same x_{i-1}, different earlier history.
  const std::vector<Symbol> a{0, 0, 0, 1}, b{1, 1, 1, 1};
  EXPECT_GT(std::abs(brute_force_restricted(p, a)(1) - brute_force_restricted(p, b)(1)), 1e-3);
}

TEST(TrueTrace, DecoupledIsZero) {
  const auto p = decoupled(200);
  const auto s = simulate(p, 4);
  for (auto v : {FilterVariant::kExact, FilterVariant::kPaperLiteral}) {
    const auto t = true_causal_trace(p, s.x, s.y, Direction::kYtoX, v);
    for (const auto& r : t.rounds) ASSERT_NEAR(r.measure, 0.0, 1e-15);
  }
}

TEST(TrueTrace, ExampleOneTwoValues) {
  const auto p = example1_params(500);
  const auto s = simulate(p, 8);
  const auto t = true_causal_trace(p, s.x, s.y, Direction::kYtoX);
  for (std::size_t i = 2; i < t.size(); ++i) {
    ASSERT_NEAR(t.rounds[i].measure, s.y[i - 1] ? 0.3635 : 0.0187, 1e-4);
  }
  const auto lit = true_causal_trace(p, s.x, s.y, Direction::kYtoX, FilterVariant::kPaperLiteral);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    worst = std::max(worst, std::abs(t.rounds[i].measure - lit.rounds[i].measure));
    worst = std::max(worst, std::abs(t.rounds[i].restricted(1) - lit.rounds[i].restricted(1)));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(TrueTrace, VariantsDifferUnderFeedback) {
  ProcessParams p;
  p.regime1 = {-0.5, 0.5, 2.5, -0.5, 0.5, 2.0};
  p.regime2 = p.regime1;
  p.n = 300;
  const auto s = simulate(p, 2);
  const auto a = true_causal_trace(p, s.x, s.y, Direction::kYtoX, FilterVariant::kExact);
  const auto b = true_causal_trace(p, s.x, s.y, Direction::kYtoX, FilterVariant::kPaperLiteral);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.rounds[i].measure - b.rounds[i].measure));
    ASSERT_GE(b.rounds[i].measure, 0.0);
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(TrueTrace, EnumerationOracleWholeTrace) {
  ProcessParams p;
  p.regime1 = {-0.5, 0.5, 2.5, -0.5, 0.5, 0.0};
  p.regime2 = {-0.5, 0.5, 0.5, -0.5, 0.5, 2.0};
  p.change_point = 8;
  p.n = 15;
  const auto s = simulate(p, 21);
  const auto t = true_causal_trace(p, s.x, s.y, Direction::kYtoX);
  double worst = 0.0;
  for (std::size_t i = 1; i <= p.n; ++i) {
    const auto bf = brute_force_restricted(p, std::span(s.x).first(i - 1));
    const auto complete = i == 1 ? FinitePmf::bernoulli(0.5)
                                 : complete_pmf(p.coefficients_at(i), s.x[i - 2], s.y[i - 2], Target::kX);
    worst = std::max(worst, std::abs(t.rounds[i - 1].measure - kl_divergence(complete, bf)));
    ASSERT_GE(t.rounds[i - 1].measure, 0.0);
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(ExampleOne, ClosedForms) {
  EXPECT_NEAR(example1_closed_form(1), 0.3635, 1e-4);
  EXPECT_NEAR(example1_closed_form(0), 0.0187, 5e-5);
  const auto v = example1_values();
  EXPECT_NEAR(v.restricted_p1, 0.58, 1e-12);
  EXPECT_NEAR(v.expected_measure, 0.8 * example1_closed_form(0) + 0.2 * example1_closed_form(1), 1e-15);
  EXPECT_NEAR(v.expected_measure, 0.0877, 5e-5);
}

TEST(FilterVariantNames, RoundTrip) {
  EXPECT_EQ(parse_filter_variant("exact"), FilterVariant::kExact);
  EXPECT_EQ(parse_filter_variant("paper-literal"), FilterVariant::kPaperLiteral);
  EXPECT_EQ(to_string(FilterVariant::kPaperLiteral), "paper-literal");
  EXPECT_THROW(parse_filter_variant("bogus"), std::invalid_argument);
}
