#pragma once

#include <vector>

#include <Eigen/Dense>

// Exhaustive reference for the maximum-value assignment on small instances.
// Tries every injective partial pairing; pairs with negative value are never
// forced, so skipping them is always allowed.
inline double brute_force_best_value(const Eigen::MatrixXd& v) {
  const int m = static_cast<int>(v.rows());
  const int n = static_cast<int>(v.cols());
  std::vector<bool> taken(static_cast<std::size_t>(n), false);

  struct Search {
    const Eigen::MatrixXd& v;
    std::vector<bool>& taken;
    int m, n;
    double best = 0.0;

    void visit(int cu, double total) {
      if (cu == m) {
        if (total > best) best = total;
        return;
      }
      visit(cu + 1, total);  // leave this CU unmatched
      for (int d = 0; d < n; ++d) {
        if (taken[static_cast<std::size_t>(d)] || v(cu, d) < 0.0) continue;
        taken[static_cast<std::size_t>(d)] = true;
        visit(cu + 1, total + v(cu, d));
        taken[static_cast<std::size_t>(d)] = false;
      }
    }
  } search{v, taken, m, n};

  search.visit(0, 0.0);
  return search.best;
}
