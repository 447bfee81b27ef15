#include "d2dcoop/sim.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace d2dcoop {

namespace {

// Derivation tags for the per-scenario substreams.
constexpr std::uint64_t kTagGeometry = 1;
constexpr std::uint64_t kTagPayoff = 2;
constexpr std::uint64_t kTagMatching = 3;
constexpr std::uint64_t kTagFrame = 4;

void check_config(const SimConfig& c) {
  if (c.n_cu < 0 || c.n_d2d < 0) throw std::invalid_argument("sim: negative side size");
  if (!(c.cell_radius > 0.0)) throw std::invalid_argument("sim: cell_radius");
  if (!(c.ring_min > 0.0) || !(c.ring_max >= c.ring_min)) {
    throw std::invalid_argument("sim: transmitter annulus bounds");
  }
  if (!(c.d2d_min > 0.0) || !(c.d2d_max >= c.d2d_min)) {
    throw std::invalid_argument("sim: d2d distance band");
  }
  if (c.t_s < 1) throw std::invalid_argument("sim: t_s must be >= 1");
  if (c.samples_per_pair < 1) throw std::invalid_argument("sim: samples_per_pair");
  if (c.n_scenarios < 0) throw std::invalid_argument("sim: n_scenarios");
  if (!(c.epsilon > 0.0)) throw std::invalid_argument("sim: epsilon");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(s) for s in [0, count) on the requested number of workers. Any
// exception is rethrown on the calling thread.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  const int workers = std::min(std::max(threads, 1), std::max(count, 1));
  if (workers <= 1) {
    for (int s = 0; s < count; ++s) fn(s);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int s = next.fetch_add(1);
        if (s >= count) return;
        try {
          fn(s);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

Geometry generate_scenario(const SimConfig& config, RandomStream& rng) {
  check_config(config);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Geometry geo;
  geo.base_station.setZero();
  geo.cu.reserve(static_cast<std::size_t>(config.n_cu));
  for (int m = 0; m < config.n_cu; ++m) {
    const double angle = rng.uniform(0.0, two_pi);
    geo.cu.emplace_back(config.cell_radius * std::cos(angle),
                        config.cell_radius * std::sin(angle));
  }
  geo.dt.reserve(static_cast<std::size_t>(config.n_d2d));
  geo.dr.reserve(static_cast<std::size_t>(config.n_d2d));
  const double r0sq = config.ring_min * config.ring_min;
  const double r1sq = config.ring_max * config.ring_max;
  for (int n = 0; n < config.n_d2d; ++n) {
    const double angle = rng.uniform(0.0, two_pi);
    // Area-uniform radius in the annulus.
    const double radius = std::sqrt(r0sq + rng.uniform01() * (r1sq - r0sq));
    geo.dt.emplace_back(radius * std::cos(angle), radius * std::sin(angle));
    const double link_angle = rng.uniform(0.0, two_pi);
    const double link_dist = rng.uniform(config.d2d_min, config.d2d_max);
    geo.dr.emplace_back(geo.dt.back().x() + link_dist * std::cos(link_angle),
                        geo.dt.back().y() + link_dist * std::sin(link_angle));
  }
  return geo;
}

FrameResult run_frame(const Geometry& geo, const SimConfig& config,
                      const Matching& matching, const PolicyTable& policies,
                      const RandomStream& frame_rng,
                      std::vector<SubframeRecord>* log) {
  check_config(config);
  matching.validate();
  const int m_count = static_cast<int>(geo.cu.size());
  const int n_count = static_cast<int>(geo.dt.size());
  if (static_cast<int>(matching.cu_partner.size()) != m_count ||
      static_cast<int>(matching.d2d_partner.size()) != n_count) {
    throw std::invalid_argument("run_frame: matching does not fit the geometry");
  }

  // Pre-resolve distances and policies per CU.
  std::vector<PairLinks> links(static_cast<std::size_t>(m_count));
  std::vector<const CooperationPolicy*> policy(static_cast<std::size_t>(m_count),
                                               nullptr);
  for (int m = 0; m < m_count; ++m) {
    const int n = matching.cu_partner[m];
    if (n != kUnmatched) {
      links[m] = pair_links(geo, m, n);
      const std::size_t idx =
          static_cast<std::size_t>(m) * static_cast<std::size_t>(n_count) + n;
      if (idx >= policies.size() || !policies[idx].has_value()) {
        throw std::invalid_argument("run_frame: matched pair has no policy");
      }
      policy[m] = &*policies[idx];
    } else {
      links[m].d_mb = (geo.cu[m] - geo.base_station).norm();
    }
  }

  FrameResult result;
  result.cu_rate = Eigen::VectorXd::Zero(m_count);
  result.d2d_rate = Eigen::VectorXd::Zero(n_count);

  for (int t = 0; t < config.t_s; ++t) {
    for (int m = 0; m < m_count; ++m) {
      RandomStream rng = frame_rng.child(static_cast<std::uint64_t>(t),
                                         static_cast<std::uint64_t>(m));
      const int n = matching.cu_partner[m];
      if (n == kUnmatched) {
        const double h_mb =
            path_gain(links[m].d_mb, config.budget.exponent, rng.exponential());
        const double direct = cellular_rate(h_mb, config.budget);
        result.cu_rate[m] += direct;
        if (log) log->push_back({t, m, kUnmatched, 0.0, {direct, 0.0}});
        continue;
      }
      const RatePair rates = sample_rate_pair(links[m], config.budget, rng);
      // A pair that cannot meet the guarantee leaves the whole subframe to
      // the cellular side.
      const double alpha =
          policy[m]->feasible ? apply_policy(*policy[m], rates) : 0.0;
      result.cu_rate[m] += (1.0 - alpha) * rates.cu;
      result.d2d_rate[n] += alpha * rates.d2d;
      if (log) log->push_back({t, m, n, alpha, rates});
    }
  }
  result.cu_rate /= static_cast<double>(config.t_s);
  result.d2d_rate /= static_cast<double>(config.t_s);
  return result;
}

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::auction: return "auction";
    case Scheme::optimal: return "optimal";
    case Scheme::no_transfer: return "no-transfer";
    case Scheme::random: return "random";
  }
  throw std::logic_error("scheme_name: unknown scheme");
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "auction") return Scheme::auction;
  if (name == "optimal") return Scheme::optimal;
  if (name == "no-transfer") return Scheme::no_transfer;
  if (name == "random") return Scheme::random;
  throw std::invalid_argument("unknown scheme: " + name);
}

std::pair<double, double> compute_eau(const Utilities& utilities,
                                      const Matching& matching) {
  double cu_sum = 0.0;
  double d2d_sum = 0.0;
  int matched = 0;
  for (int m = 0; m < static_cast<int>(matching.cu_partner.size()); ++m) {
    if (matching.cu_partner[m] != kUnmatched) {
      cu_sum += utilities.cu[m];
      ++matched;
    }
  }
  for (int n = 0; n < static_cast<int>(matching.d2d_partner.size()); ++n) {
    if (matching.d2d_partner[n] != kUnmatched) d2d_sum += utilities.d2d[n];
  }
  if (matched == 0) return {0.0, 0.0};
  return {cu_sum / matched, d2d_sum / matched};
}

double outage_percentage(const std::vector<FrameResult>& frames, double r_th) {
  long total = 0;
  long below = 0;
  for (const FrameResult& frame : frames) {
    total += frame.cu_rate.size();
    below += (frame.cu_rate.array() < r_th).count();
  }
  if (total == 0) return 0.0;
  return static_cast<double>(below) / static_cast<double>(total);
}

namespace {

SchemeScenario evaluate_scheme(const SimConfig& config, const Geometry& geo,
                               const PairSolveResult& pairs, Scheme scheme,
                               std::uint64_t scenario,
                               const RandomStream& master) {
  RandomStream scheme_rng =
      master.child(kTagMatching, scenario)
          .child(static_cast<std::uint64_t>(scheme));
  Matching matching;
  switch (scheme) {
    case Scheme::auction:
      matching = auction_match(pairs.values, config.epsilon, scheme_rng);
      break;
    case Scheme::optimal:
      matching = optimal_assignment(pairs.values).matching;
      break;
    case Scheme::no_transfer:
      matching = match_without_transfer(pairs.values, scheme_rng);
      break;
    case Scheme::random:
      matching = random_match(config.n_cu, config.n_d2d, scheme_rng);
      break;
  }

  PolicyTable policies(pairs.policies.size());
  for (std::size_t i = 0; i < pairs.policies.size(); ++i) {
    policies[i] = pairs.policies[i];
  }
  const RandomStream frame_rng = master.child(kTagFrame, scenario);
  const FrameResult frame = run_frame(geo, config, matching, policies, frame_rng);

  SchemeScenario row;
  row.matched = matching.matched_count();
  // A matched pair that cannot meet the guarantee transmits nothing, so its
  // payoff is zero in the accounting, not the bookkeeping sentinel. Only the
  // random baseline can create such pairs.
  const Eigen::MatrixXd realized_values = pairs.values.cwiseMax(0.0);
  const Utilities u = utilities(matching, realized_values);
  std::tie(row.eau_cu, row.eau_d2d) = compute_eau(u, matching);
  row.d2d_sum_rate = frame.d2d_rate.sum();
  row.d2d_sum_payoff = total_matched_value(matching, realized_values);

  int without_guarantee_below = 0;
  int below = 0;
  for (int m = 0; m < config.n_cu; ++m) {
    const int n = matching.cu_partner[m];
    const bool guaranteed =
        n != kUnmatched &&
        pairs.policies[static_cast<std::size_t>(m) * config.n_d2d + n].feasible;
    const bool realized_below = frame.cu_rate[m] < config.r_th;
    if (realized_below) ++below;
    if (realized_below && !guaranteed) ++without_guarantee_below;
    if (n != kUnmatched) {
      row.matched_cu_rate_sum += frame.cu_rate[m];
      row.matched_cu_rate_sumsq += frame.cu_rate[m] * frame.cu_rate[m];
    }
  }
  row.outage_fraction =
      config.n_cu == 0 ? 0.0
                       : static_cast<double>(without_guarantee_below) / config.n_cu;
  row.outage_realized =
      config.n_cu == 0 ? 0.0 : static_cast<double>(below) / config.n_cu;
  return row;
}

}  // namespace

std::map<Scheme, Metrics> run_experiment_multi(
    const SimConfig& config, const std::vector<Scheme>& schemes,
    std::map<Scheme, std::vector<SchemeScenario>>* detail) {
  check_config(config);
  const RandomStream master(config.seed);

  std::map<Scheme, std::vector<SchemeScenario>> rows;
  for (const Scheme scheme : schemes) {
    rows[scheme].resize(static_cast<std::size_t>(config.n_scenarios));
  }

  parallel_for(config.n_scenarios, resolve_threads(config.threads), [&](int s) {
    const auto scenario = static_cast<std::uint64_t>(s);
    RandomStream geo_rng = master.child(kTagGeometry, scenario);
    const Geometry geo = generate_scenario(config, geo_rng);
    const PairSolveResult pairs =
        solve_all_pairs(geo, config.budget, config.r_th, config.samples_per_pair,
                        master.child(kTagPayoff, scenario));
    for (const Scheme scheme : schemes) {
      rows.at(scheme)[static_cast<std::size_t>(s)] =
          evaluate_scheme(config, geo, pairs, scheme, scenario, master);
    }
  });

  std::map<Scheme, Metrics> metrics;
  for (const Scheme scheme : schemes) {
    Metrics agg;
    agg.n_scenarios = config.n_scenarios;
    for (const SchemeScenario& row : rows[scheme]) {
      agg.eau_cu += row.eau_cu;
      agg.eau_d2d += row.eau_d2d;
      agg.d2d_sum_rate += row.d2d_sum_rate;
      agg.d2d_sum_payoff += row.d2d_sum_payoff;
      agg.outage_fraction += row.outage_fraction;
      agg.outage_realized += row.outage_realized;
      agg.matched_cus += row.matched;
      agg.matched_d2d += row.matched;
    }
    if (config.n_scenarios > 0) {
      const double inv = 1.0 / config.n_scenarios;
      agg.eau_cu *= inv;
      agg.eau_d2d *= inv;
      agg.d2d_sum_rate *= inv;
      agg.d2d_sum_payoff *= inv;
      agg.outage_fraction *= inv;
      agg.outage_realized *= inv;
      agg.matched_cus *= inv;
      agg.matched_d2d *= inv;
    }
    metrics[scheme] = agg;
    if (detail) (*detail)[scheme] = std::move(rows[scheme]);
  }
  return metrics;
}

Metrics run_experiment(const SimConfig& config, Scheme scheme,
                       std::vector<SchemeScenario>* detail) {
  std::map<Scheme, std::vector<SchemeScenario>> detail_map;
  auto metrics = run_experiment_multi(config, {scheme},
                                      detail ? &detail_map : nullptr);
  if (detail) *detail = std::move(detail_map[scheme]);
  return metrics.at(scheme);
}

}  // namespace d2dcoop
