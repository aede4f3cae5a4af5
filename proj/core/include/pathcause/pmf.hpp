#pragma once

// Finite-alphabet probability primitives. Every information quantity in the
// library is measured in bits.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace pathcause {

using Symbol = std::uint8_t;

inline constexpr double kInfiniteBits = std::numeric_limits<double>::infinity();
inline constexpr double kPmfTolerance = 1e-12;

class PmfError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Probability mass function over {0, ..., size()-1}.
///
/// Construction renormalizes the input; masses are non-negative and sum to one
/// within kPmfTolerance. Values are immutable once built.
class FinitePmf {
 public:
  explicit FinitePmf(std::vector<double> mass);

  /// Bernoulli pmf with P(1) = p.
  static FinitePmf bernoulli(double p);
  static FinitePmf uniform(std::size_t alphabet_size);

  std::size_t size() const noexcept { return mass_.size(); }
  double operator()(Symbol x) const { return mass_.at(x); }
  double operator[](std::size_t x) const { return mass_[x]; }
  std::span<const double> masses() const noexcept { return mass_; }

  friend bool operator==(const FinitePmf&, const FinitePmf&) = default;

 private:
  std::vector<double> mass_;
};

FinitePmf make_pmf(std::vector<double> mass);

/// D(p || q) in bits. Returns kInfiniteBits when p puts mass where q has none.
double kl_divergence(const FinitePmf& p, const FinitePmf& q);

/// -log2 f(x); kInfiniteBits when f(x) == 0.
double self_information_loss(const FinitePmf& f, Symbol x);

/// sup_A |p(A) - q(A)| = half the l1 distance.
double total_variation(const FinitePmf& p, const FinitePmf& q);

inline bool is_infinite(double bits) noexcept { return bits == kInfiniteBits; }

}  // namespace pathcause
