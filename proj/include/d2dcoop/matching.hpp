#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "d2dcoop/random.hpp"

namespace d2dcoop {

inline constexpr int kUnmatched = -1;

// One-to-one assignment of CUs to D2D pairs together with the prices the
// matched CUs charge. Both directions are stored and kept mutually
// consistent; unmatched CUs carry price 0.
struct Matching {
  std::vector<int> cu_partner;   // size M, D2D index or kUnmatched
  std::vector<int> d2d_partner;  // size N, CU index or kUnmatched
  Eigen::VectorXd price;         // size M, nonnegative

  static Matching empty(int m_count, int n_count);
  int matched_count() const;
  // Throws std::logic_error if the two directions disagree, an index is out
  // of range, or a price violates the sign/zero conventions.
  void validate() const;
};

// theta/delta: what each CU earns (its price) and what each matched D2D pair
// keeps (payoff minus price). Unmatched agents sit at 0.
struct Utilities {
  Eigen::VectorXd cu;
  Eigen::VectorXd d2d;
};

Utilities utilities(const Matching& matching, const Eigen::MatrixXd& v);

// D2D pair n's preferred CU at the announced prices: argmax of v(m,n) - beta(m)
// provided the best net value is nonnegative, ties to the lowest CU index.
// kUnmatched when every option is negative.
int demand(const Eigen::MatrixXd& v, const Eigen::VectorXd& beta, int n);

// Diagnostic snapshot attached to the divergence error and optionally
// recorded per round.
struct AuctionState {
  int round = 0;
  Eigen::VectorXd beta;
  Eigen::ArrayXXi proposals;
  Eigen::ArrayXXi prev_proposals;
  Matching current;
};

struct AuctionTrace {
  std::vector<Eigen::VectorXd> beta_per_round;  // prices announced each round
  int rounds = 0;
};

class AuctionDivergenceError : public std::runtime_error {
 public:
  AuctionDivergenceError(std::string message, AuctionState state)
      : std::runtime_error(std::move(message)), state(std::move(state)) {}
  AuctionState state;
};

// Ascending-price auction in which unmatched D2D pairs repeatedly propose to
// the CU they demand and CUs raise their price by epsilon whenever proposals
// collide. Deterministic given the stream; epsilon must be positive. Entries
// of v below 0 mark unacceptable pairs. Throws AuctionDivergenceError if the
// round count exceeds 10 * (M * ceil(max_v / epsilon) + M + N).
Matching auction_match(const Eigen::MatrixXd& v, double epsilon, RandomStream& rng,
                       AuctionTrace* trace = nullptr);

struct StabilityWitness {
  enum class Kind { none, negative_cu_utility, negative_d2d_utility, blocking_pair };
  Kind kind = Kind::none;
  int m = kUnmatched;
  int n = kUnmatched;
  double deficit = 0.0;
};

// Checks individual rationality plus the epsilon-blocking condition
// theta_m + delta_n >= v(m,n) - epsilon over every acceptable pair. On
// failure the witness identifies the violated condition.
bool is_epsilon_stable(const Matching& matching, const Eigen::MatrixXd& v,
                       double epsilon, StabilityWitness* witness = nullptr);

struct AssignmentResult {
  Matching matching;  // prices all zero
  double total_value = 0.0;
};

// Exact maximum of the total payoff over one-to-one assignments, computed by
// the Hungarian method on a padded square matrix. Pairs with v < 0 are never
// matched. Ties resolve deterministically toward lower indices.
AssignmentResult optimal_assignment(const Eigen::MatrixXd& v);

// Deferred acceptance without prices: D2D pairs propose in random order down
// their payoff-sorted preference lists and each CU keeps the first acceptable
// proposer it receives.
Matching match_without_transfer(const Eigen::MatrixXd& v, RandomStream& rng);

// Uniformly random maximum-cardinality pairing that ignores payoffs entirely,
// including the acceptability of the pairs it creates.
Matching random_match(int m_count, int n_count, RandomStream& rng);

// Total payoff collected by the matched pairs of a matching.
double total_matched_value(const Matching& matching, const Eigen::MatrixXd& v);

}  // namespace d2dcoop
