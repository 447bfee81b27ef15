#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "d2dcoop/channel.hpp"
#include "d2dcoop/matching.hpp"
#include "d2dcoop/policy.hpp"
#include "d2dcoop/random.hpp"

namespace d2dcoop {

// Everything one experiment point (a single D2D population size) needs.
struct SimConfig {
  int n_cu = 15;
  int n_d2d = 10;
  double cell_radius = 500.0;   // CUs sit on this circle, meters
  double ring_min = 200.0;      // D2D transmitter annulus, meters
  double ring_max = 400.0;
  double d2d_min = 10.0;        // transmitter-receiver separation band, meters
  double d2d_max = 30.0;
  LinkBudget budget;
  // Cellular rate guarantee in nats/s/Hz (1.8 bit/s/Hz). Rates here and in
  // the policy layer are natural-log spectral efficiencies.
  double r_th = 1.8 * std::numbers::ln2;
  double epsilon = 1.0;         // auction price step
  int t_s = 1000;               // subframes per frame
  int samples_per_pair = 10000; // Monte Carlo draws for payoff estimation
  int n_scenarios = 200;
  std::uint64_t seed = 1;
  int threads = 0;              // 0 = hardware concurrency
};

// Cell-edge CUs at uniform angles, D2D transmitters area-uniform in the
// annulus, receivers at a uniform angle and distance band from their
// transmitter.
Geometry generate_scenario(const SimConfig& config, RandomStream& rng);

// Per-pair policies, row-major m * N + n. A pair may be absent (no entry was
// ever solved for it), which run_frame treats as a usage error if the pair is
// matched.
using PolicyTable = std::vector<std::optional<CooperationPolicy>>;

// Realized frame-average rates.
struct FrameResult {
  Eigen::VectorXd cu_rate;   // length M
  Eigen::VectorXd d2d_rate;  // length N
};

struct SubframeRecord {
  int t = 0;
  int m = 0;
  int n = kUnmatched;
  double alpha = 0.0;
  RatePair rates;
};

// Simulates one frame of t_s subframes under the given matching. Matched
// pairs draw fresh fading and split each subframe by the pair policy; a
// matched pair whose policy is infeasible keeps the whole subframe on the
// cellular side. Unmatched CUs transmit on their direct link; unmatched D2D
// pairs stay silent. Fading substreams are keyed by (subframe, CU index)
// from frame_rng's key, so a CU sees the same channel realizations no matter
// which matching is being evaluated.
FrameResult run_frame(const Geometry& geo, const SimConfig& config,
                      const Matching& matching, const PolicyTable& policies,
                      const RandomStream& frame_rng,
                      std::vector<SubframeRecord>* log = nullptr);

enum class Scheme { auction, optimal, no_transfer, random };

std::string scheme_name(Scheme scheme);
Scheme scheme_from_name(const std::string& name);

// Per-scenario outcome of one scheme.
struct SchemeScenario {
  double eau_cu = 0.0;
  double eau_d2d = 0.0;
  double d2d_sum_rate = 0.0;    // realized, summed over D2D pairs
  double d2d_sum_payoff = 0.0;  // expected, summed over matched pairs
  double outage_fraction = 0.0; // CUs without a guarantee that realized below r_th
  double outage_realized = 0.0; // CUs that realized below r_th, regardless
  double matched_cu_rate_sum = 0.0;    // realized rates of matched CUs
  double matched_cu_rate_sumsq = 0.0;
  int matched = 0;
};

// Scenario means. matched_cus and matched_d2d are means of the same count,
// kept separate to mirror the output schema.
struct Metrics {
  double eau_cu = 0.0;
  double eau_d2d = 0.0;
  double d2d_sum_rate = 0.0;
  double d2d_sum_payoff = 0.0;
  double outage_fraction = 0.0;
  double outage_realized = 0.0;
  double matched_cus = 0.0;
  double matched_d2d = 0.0;
  int n_scenarios = 0;
};

// Runs n_scenarios independent scenarios and evaluates every requested scheme
// on each: draw geometry, estimate the payoff matrix on training samples,
// match, then simulate one frame on fresh fading. Results are reproducible
// bit for bit for a given seed regardless of the thread count, and each
// scheme's result does not depend on which other schemes run alongside it.
std::map<Scheme, Metrics> run_experiment_multi(
    const SimConfig& config, const std::vector<Scheme>& schemes,
    std::map<Scheme, std::vector<SchemeScenario>>* detail = nullptr);

Metrics run_experiment(const SimConfig& config, Scheme scheme,
                       std::vector<SchemeScenario>* detail = nullptr);

// Mean utility per matched agent, (cu, d2d); zeros when nothing is matched.
std::pair<double, double> compute_eau(const Utilities& utilities,
                                      const Matching& matching);

// Fraction of CU slots across the given frames whose realized frame-average
// rate fell below r_th.
double outage_percentage(const std::vector<FrameResult>& frames, double r_th);

}  // namespace d2dcoop
