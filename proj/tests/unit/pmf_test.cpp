#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pathcause/pmf.hpp"

using namespace pathcause;

namespace {

FinitePmf random_pmf(std::mt19937_64& rng, std::size_t k, bool allow_zero = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> m(k);
  for (auto& v : m) v = (allow_zero && u(rng) < 0.2) ? 0.0 : u(rng);
  if (std::all_of(m.begin(), m.end(), [](double v) { return v == 0.0; })) m[0] = 1.0;
  return FinitePmf(m);
}

}  // namespace

TEST(MakePmf, KeepsNormalizedInput) {
  const auto p = make_pmf({0.5, 0.5});
  EXPECT_EQ(p, FinitePmf::uniform(2));
  const auto q = make_pmf({0.42, 0.58});
  EXPECT_EQ(q(1), 0.58);
  EXPECT_EQ(q(0), 0.42);
}

TEST(MakePmf, Normalizes) {
  const auto p = make_pmf({2.0, 2.0});
  EXPECT_DOUBLE_EQ(p(0), 0.5);
  EXPECT_DOUBLE_EQ(p(1), 0.5);
}

TEST(MakePmf, RejectsBadInput) {
  EXPECT_THROW(make_pmf({}), PmfError);
  EXPECT_THROW(make_pmf({1.0}), PmfError);
  EXPECT_THROW(make_pmf({0.0, 0.0}), PmfError);
  EXPECT_THROW(make_pmf({-0.1, 1.1}), PmfError);
  EXPECT_THROW(make_pmf({NAN, 1.0}), PmfError);
  EXPECT_THROW(FinitePmf::bernoulli(1.5), PmfError);
}

TEST(Pmf, SymbolOutOfRange) {
  const auto p = FinitePmf::uniform(2);
  EXPECT_THROW((void)p(2), std::out_of_range);
}

TEST(KlDivergence, ExampleValues) {
  const auto r = FinitePmf::bernoulli(0.58);
  EXPECT_NEAR(kl_divergence(FinitePmf::bernoulli(0.9), r), 0.3635, 1e-4);
  EXPECT_NEAR(kl_divergence(FinitePmf::bernoulli(0.5), r), 0.0187, 5e-5);
  EXPECT_EQ(kl_divergence(r, r), 0.0);
}

TEST(KlDivergence, ZeroMassConventions) {
  const auto p = make_pmf({1.0, 0.0});
  const auto q = make_pmf({0.5, 0.5});
  EXPECT_DOUBLE_EQ(kl_divergence(p, q), 1.0);
  EXPECT_TRUE(is_infinite(kl_divergence(q, p)));
}

TEST(KlDivergence, AlphabetMismatch) {
  EXPECT_THROW(kl_divergence(FinitePmf::uniform(2), FinitePmf::uniform(3)), PmfError);
}

TEST(SelfInformationLoss, Values) {
  EXPECT_EQ(self_information_loss(make_pmf({0.0, 1.0}), 1), 0.0);
  EXPECT_DOUBLE_EQ(self_information_loss(FinitePmf::uniform(2), 0), 1.0);
  EXPECT_DOUBLE_EQ(self_information_loss(make_pmf({0.75, 0.25}), 1), 2.0);
  EXPECT_TRUE(is_infinite(self_information_loss(make_pmf({1.0, 0.0}), 1)));
  EXPECT_THROW(self_information_loss(FinitePmf::uniform(2), 2), PmfError);
}

TEST(PmfProperties, RandomPairs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 2 + trial % 7;
    const auto p = random_pmf(rng, k, true);
    const auto q = random_pmf(rng, k);
    const double d = kl_divergence(p, q);
    ASSERT_GE(d, 0.0);
    ASSERT_NEAR(kl_divergence(p, p), 0.0, 1e-12);

    // D(p||q) = E_p[l(q, X) - l(p, X)].
    double cross = 0.0;
    for (std::size_t x = 0; x < k; ++x) {
      if (p[x] == 0.0) continue;
      cross += p[x] * (self_information_loss(q, static_cast<Symbol>(x)) -
                       self_information_loss(p, static_cast<Symbol>(x)));
    }
    ASSERT_NEAR(d, cross, 1e-9);

    // Pinsker, with the divergence converted to nats.
    ASSERT_LE(total_variation(p, q), std::sqrt(d * std::log(2.0) / 2.0) + 1e-12);
  }
}
