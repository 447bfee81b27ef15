#include "d2dcoop/lp_oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace d2dcoop {

std::optional<double> lp_oracle(const RateDistribution& dist, double r_th) {
  double budget = -r_th;
  for (Eigen::Index k = 0; k < dist.size(); ++k) {
    budget += dist.prob()[k] * dist.rate_cu()[k];
  }
  if (budget < 0.0) return std::nullopt;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(dist.size()));
  std::iota(order.begin(), order.end(), 0);
  const auto ratio = [&dist](Eigen::Index k) {
    const double rc = dist.rate_cu()[k];
    if (rc > 0.0) return dist.rate_d2d()[k] / rc;
    return std::numeric_limits<double>::infinity();
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ratio(a) > ratio(b); });

  double value = 0.0;
  for (const Eigen::Index k : order) {
    const double cost = dist.prob()[k] * dist.rate_cu()[k];
    const double gain = dist.prob()[k] * dist.rate_d2d()[k];
    if (cost <= budget) {
      value += gain;
      budget -= cost;
    } else {
      if (cost > 0.0) value += gain * (budget / cost);
      break;
    }
  }
  return value;
}

}  // namespace d2dcoop
