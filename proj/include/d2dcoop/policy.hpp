#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "d2dcoop/channel.hpp"
#include "d2dcoop/random.hpp"

namespace d2dcoop {

// Joint distribution of the per-subframe rate pair (r_cu, r_d2d) for one
// (CU, D2D) combination. Discrete by construction; the empirical form is the
// equal-weight special case built from Monte Carlo samples.
class RateDistribution {
 public:
  // Explicit probabilities. Rates must be finite and nonnegative, the
  // probabilities nonnegative and summing to 1 within 1e-9.
  RateDistribution(Eigen::ArrayXd rate_cu, Eigen::ArrayXd rate_d2d,
                   Eigen::ArrayXd prob);

  // Equal-weight empirical distribution. Needs at least one sample.
  static RateDistribution from_samples(Eigen::ArrayXd rate_cu,
                                       Eigen::ArrayXd rate_d2d);

  Eigen::Index size() const { return rate_cu_.size(); }
  const Eigen::ArrayXd& rate_cu() const { return rate_cu_; }
  const Eigen::ArrayXd& rate_d2d() const { return rate_d2d_; }
  const Eigen::ArrayXd& prob() const { return prob_; }

  double expected_cu() const { return (prob_ * rate_cu_).sum(); }
  double expected_d2d() const { return (prob_ * rate_d2d_).sum(); }

 private:
  Eigen::ArrayXd rate_cu_;
  Eigen::ArrayXd rate_d2d_;
  Eigen::ArrayXd prob_;
};

// Threshold rule for splitting each subframe between the cellular and the
// D2D transmission. The subframe goes entirely to whichever side wins the
// comparison lambda * r_cu vs r_d2d; on the boundary event the D2D side gets
// the fixed share alpha_boundary. Solved so that the expected cellular rate
// equals exactly the guarantee r_th.
struct CooperationPolicy {
  bool feasible = false;
  double lambda = 0.0;
  double alpha_boundary = 0.0;
  double r_th = 0.0;
};

// Relative tolerance used to detect the boundary event lambda*r_cu == r_d2d
// when the policy is applied to a state.
inline constexpr double kBoundaryTolerance = 1e-12;

// Payoff entry used for pairs that cannot meet the rate guarantee.
inline constexpr double kInfeasiblePayoff = -1.0;

// M x N expected D2D payoffs, kInfeasiblePayoff where the pair is infeasible.
using PayoffMatrix = Eigen::MatrixXd;

// True iff the guarantee is attainable at all: E{r_cu} >= r_th.
bool check_feasibility(const RateDistribution& dist, double r_th);

// Exact solve on the discrete distribution: sorts the candidate thresholds
// r_d2d/r_cu and scans prefix sums of p * r_cu. Returns an infeasible policy
// when the guarantee is out of reach. r_th must be nonnegative.
CooperationPolicy solve_threshold(const RateDistribution& dist, double r_th);

// Alternative solve path that brackets the threshold by bisection on the
// constraint function, then snaps to the nearest candidate ratio. Kept for
// cross-checking the exact scan; tol bounds the bracket width.
CooperationPolicy solve_threshold_bisection(const RateDistribution& dist,
                                            double r_th, double tol = 1e-12);

// D2D time share alpha for one state: 0 / alpha_boundary / 1 depending on the
// threshold comparison. The policy must be feasible.
double apply_policy(const CooperationPolicy& policy, const RatePair& state);

// E{alpha(r) * r_d2d} under the policy, or kInfeasiblePayoff if infeasible.
double expected_payoff(const CooperationPolicy& policy,
                       const RateDistribution& dist);

// E{(1 - alpha(r)) * r_cu}: the cellular rate the policy actually delivers.
double expected_cellular_rate(const CooperationPolicy& policy,
                              const RateDistribution& dist);

// Solve + payoff in one step: the matching value of a pair, or
// kInfeasiblePayoff.
double pair_value(const RateDistribution& dist, double r_th);

// Policies for all M x N pairs, row-major, alongside their payoff entries.
struct PairSolveResult {
  PayoffMatrix values;
  std::vector<CooperationPolicy> policies;
};

// Estimates each pair's rate distribution from samples_per_pair Monte Carlo
// draws and solves the threshold policy. Every pair gets its own substream of
// rng, so entries do not depend on evaluation order.
PairSolveResult solve_all_pairs(const Geometry& geo, const LinkBudget& budget,
                                double r_th, int samples_per_pair,
                                const RandomStream& rng);

PayoffMatrix build_payoff_matrix(const Geometry& geo, const LinkBudget& budget,
                                 double r_th, int samples_per_pair,
                                 const RandomStream& rng);

}  // namespace d2dcoop
