#pragma once

#include <vector>

#include <Eigen/Core>

namespace d2dcoop {

// Minimum-cost perfect assignment on a square cost matrix via the potentials
// form of the Hungarian method, O(n^3). Returns row_of_col: for each column
// the row assigned to it. Deterministic; ties fall to the lowest index.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace d2dcoop
