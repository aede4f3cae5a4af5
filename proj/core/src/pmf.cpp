#include "pathcause/pmf.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace pathcause {

FinitePmf::FinitePmf(std::vector<double> mass) : mass_(std::move(mass)) {
  if (mass_.size() < 2) {
    throw PmfError("pmf needs an alphabet of at least two symbols");
  }
  double total = 0.0;
  for (double m : mass_) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw PmfError("pmf mass must be finite and non-negative, got " + std::to_string(m));
    }
    total += m;
  }
  if (!(total > 0.0)) {
    throw PmfError("pmf mass sums to zero");
  }
  if (std::abs(total - 1.0) > kPmfTolerance) {
    for (double& m : mass_) m /= total;
  }
}

FinitePmf FinitePmf::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw PmfError("bernoulli parameter outside [0, 1]: " + std::to_string(p));
  }
  return FinitePmf({1.0 - p, p});
}

FinitePmf FinitePmf::uniform(std::size_t alphabet_size) {
  return FinitePmf(std::vector<double>(alphabet_size, 1.0 / static_cast<double>(alphabet_size)));
}

FinitePmf make_pmf(std::vector<double> mass) { return FinitePmf(std::move(mass)); }

double kl_divergence(const FinitePmf& p, const FinitePmf& q) {
  if (p.size() != q.size()) {
    throw PmfError("kl_divergence: alphabet sizes differ");
  }
  double d = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    if (q[x] == 0.0) return kInfiniteBits;
    d += p[x] * std::log2(p[x] / q[x]);
  }
  // Rounding can leave a tiny negative residue when p == q.
  return d < 0.0 ? 0.0 : d;
}

double self_information_loss(const FinitePmf& f, Symbol x) {
  if (x >= f.size()) {
    throw PmfError("symbol " + std::to_string(x) + " outside alphabet of size " +
                   std::to_string(f.size()));
  }
  const double m = f[x];
  if (m == 0.0) return kInfiniteBits;
  return -std::log2(m);
}

double total_variation(const FinitePmf& p, const FinitePmf& q) {
  if (p.size() != q.size()) {
    throw PmfError("total_variation: alphabet sizes differ");
  }
  double l1 = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) l1 += std::abs(p[x] - q[x]);
  return 0.5 * l1;
}

}  // namespace pathcause
