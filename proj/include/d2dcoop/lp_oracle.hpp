#pragma once

#include <optional>

#include "d2dcoop/policy.hpp"

namespace d2dcoop {

// Reference solution of the per-pair time-sharing problem, used only to
// cross-check the threshold solver. The problem is a fractional knapsack:
// spending p*r_cu of the cellular budget E{r_cu} - r_th on a state buys
// p*r_d2d of payoff, so filling states in decreasing r_d2d/r_cu order with a
// fractional pivot is exact. Deliberately shares no code with
// solve_threshold. Returns nothing when the guarantee is infeasible.
std::optional<double> lp_oracle(const RateDistribution& dist, double r_th);

}  // namespace d2dcoop
