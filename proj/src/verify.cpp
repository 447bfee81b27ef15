#include "d2dcoop/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "d2dcoop/lp_oracle.hpp"
#include "d2dcoop/matching.hpp"
#include "d2dcoop/policy.hpp"
#include "d2dcoop/runner.hpp"
#include "d2dcoop/sim.hpp"

namespace d2dcoop {

namespace {

// Fixed seeds so every criterion is reproducible on its own.
constexpr std::uint64_t kPolicyInstanceSeed = 9001;
constexpr std::uint64_t kMatchingInstanceSeed = 9002;
constexpr std::uint64_t kExperimentSeed = 9003;

std::string fmt(const char* pattern, ...) {
  char buffer[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buffer, sizeof buffer, pattern, args);
  va_end(args);
  return buffer;
}

// Instance family shared by the two policy criteria: small discrete
// distributions with rates in [0,5] and a guarantee drawn below the mean
// cellular rate, so every instance is feasible.
struct PolicyInstance {
  RateDistribution dist;
  double r_th;
};

PolicyInstance random_policy_instance(RandomStream& rng) {
  const int n = 1 + static_cast<int>(rng.uniform_index(10));
  Eigen::ArrayXd cu(n), d2d(n), p(n);
  for (int i = 0; i < n; ++i) {
    cu[i] = rng.uniform(0.0, 5.0);
    d2d[i] = rng.uniform(0.0, 5.0);
    p[i] = rng.uniform(0.05, 1.0);
  }
  p /= p.sum();
  RateDistribution dist(cu, d2d, p);
  const double r_th = rng.uniform01() * dist.expected_cu();
  return {std::move(dist), r_th};
}

// Instance family shared by the two auction criteria: payoff matrices with
// both sides up to 10 agents and a fifth of the pairs unacceptable.
Eigen::MatrixXd random_payoff_instance(RandomStream& rng) {
  const int m = 1 + static_cast<int>(rng.uniform_index(10));
  const int n = 1 + static_cast<int>(rng.uniform_index(10));
  Eigen::MatrixXd v(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      v(i, j) = rng.uniform01() < 0.2 ? -1.0 : rng.uniform(0.0, 10.0);
    }
  }
  return v;
}

// Stock radio parameters and full-scale population defaults.
ExperimentSpec default_experiment(int threads) {
  ExperimentSpec spec;
  spec.seed = kExperimentSeed;
  spec.threads = threads;
  return spec;
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments out;
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return out;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  out.mean = sum / n;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (const double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

CriterionResult payoff_equals_oracle() {
  CriterionResult result{1, "payoff equals reference optimum", false, "", 0.0};
  RandomStream rng(kPolicyInstanceSeed);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const PolicyInstance inst = random_policy_instance(rng);
    const CooperationPolicy policy = solve_threshold(inst.dist, inst.r_th);
    const auto bound = lp_oracle(inst.dist, inst.r_th);
    if (!policy.feasible || !bound.has_value()) {
      result.measured = fmt("instance %d unexpectedly infeasible", trial);
      return result;
    }
    worst = std::max(worst,
                     std::abs(expected_payoff(policy, inst.dist) - *bound));
  }
  result.pass = worst <= 1e-9;
  result.measured = fmt("max |payoff - oracle| = %.3g over 100 instances", worst);
  return result;
}

CriterionResult guarantee_binds() {
  CriterionResult result{2, "guarantee binds with equality", false, "", 0.0};
  RandomStream rng(kPolicyInstanceSeed + 1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const PolicyInstance inst = random_policy_instance(rng);
    const CooperationPolicy policy = solve_threshold(inst.dist, inst.r_th);
    if (!policy.feasible) {
      result.measured = fmt("instance %d unexpectedly infeasible", trial);
      return result;
    }
    worst = std::max(
        worst, std::abs(expected_cellular_rate(policy, inst.dist) - inst.r_th));
  }
  result.pass = worst <= 1e-9;
  result.measured = fmt("max |delivered - r_th| = %.3g over 100 instances", worst);
  return result;
}

CriterionResult auction_is_stable() {
  CriterionResult result{3, "auction outcomes are epsilon-stable", false, "", 0.0};
  RandomStream rng(kMatchingInstanceSeed);
  int stable = 0;
  std::string first_failure;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd v = random_payoff_instance(rng);
    const double epsilon = trial % 2 == 0 ? 1.0 : 0.1;
    RandomStream auction_rng = rng.child(static_cast<std::uint64_t>(trial));
    const Matching mu = auction_match(v, epsilon, auction_rng);
    StabilityWitness witness;
    if (is_epsilon_stable(mu, v, epsilon, &witness)) {
      ++stable;
    } else if (first_failure.empty()) {
      first_failure = fmt("; first witness kind=%d m=%d n=%d deficit=%.3g",
                          static_cast<int>(witness.kind), witness.m, witness.n,
                          witness.deficit);
    }
  }
  result.pass = stable == 100;
  result.measured = fmt("%d/100 stable%s", stable, first_failure.c_str());
  return result;
}

CriterionResult auction_near_optimal() {
  CriterionResult result{4, "auction payoff near the exact optimum", false, "", 0.0};
  RandomStream rng(kMatchingInstanceSeed);
  int within = 0;
  double worst_shortfall = 0.0;
  double worst_bound = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd v = random_payoff_instance(rng);
    const double epsilon = trial % 2 == 0 ? 1.0 : 0.1;
    RandomStream auction_rng = rng.child(static_cast<std::uint64_t>(trial));
    const Matching mu = auction_match(v, epsilon, auction_rng);
    const AssignmentResult best = optimal_assignment(v);
    const double bound =
        epsilon * static_cast<double>(std::min(v.rows(), v.cols()));
    const double shortfall = best.total_value - total_matched_value(mu, v);
    if (shortfall <= bound + 1e-9) ++within;
    if (shortfall > worst_shortfall) {
      worst_shortfall = shortfall;
      worst_bound = bound;
    }
  }
  result.pass = within == 100;
  result.measured = fmt("%d/100 within bound; worst shortfall %.3g vs bound %.3g",
                        within, worst_shortfall, worst_bound);
  return result;
}

CriterionResult utilities_trend(int threads) {
  CriterionResult result{5, "utilities trend with population size", false, "", 0.0};
  const ExperimentSpec spec = default_experiment(threads);

  auto point = [&](int n, Moments& cu, Moments& d2d) {
    std::vector<SchemeScenario> detail;
    run_experiment(spec.sim_config(n), Scheme::auction, &detail);
    std::vector<double> eau_cu, eau_d2d;
    for (const SchemeScenario& row : detail) {
      eau_cu.push_back(row.eau_cu);
      eau_d2d.push_back(row.eau_d2d);
    }
    cu = moments(eau_cu);
    d2d = moments(eau_d2d);
  };

  Moments cu10, d2d10, cu30, d2d30;
  point(10, cu10, d2d10);
  point(30, cu30, d2d30);

  const double cu_gain = cu30.mean - cu10.mean;
  const double cu_se = std::hypot(cu30.se, cu10.se);
  const double d2d_drop = d2d10.mean - d2d30.mean;
  const double d2d_se = std::hypot(d2d30.se, d2d10.se);
  result.pass = cu_gain >= 2.0 * cu_se && d2d_drop >= 2.0 * d2d_se;
  result.measured =
      fmt("eau_cu %.4g -> %.4g (z=%.1f); eau_d2d %.4g -> %.4g (z=%.1f)",
          cu10.mean, cu30.mean, cu_se > 0.0 ? cu_gain / cu_se : 0.0, d2d10.mean,
          d2d30.mean, d2d_se > 0.0 ? d2d_drop / d2d_se : 0.0);
  return result;
}

CriterionResult sum_rate_ordering(int threads) {
  CriterionResult result{6, "sum-rate ordering across schemes", false, "", 0.0};
  const ExperimentSpec spec = default_experiment(threads);
  const std::vector<Scheme> all = {Scheme::auction, Scheme::optimal,
                                   Scheme::no_transfer, Scheme::random};
  bool ordered = true;
  bool near = true;
  std::string detail;
  for (const int n : {10, 20, 30}) {
    const auto metrics = run_experiment_multi(spec.sim_config(n), all);
    const double opt = metrics.at(Scheme::optimal).d2d_sum_rate;
    const double auc = metrics.at(Scheme::auction).d2d_sum_rate;
    const double greedy = metrics.at(Scheme::no_transfer).d2d_sum_rate;
    const double rnd = metrics.at(Scheme::random).d2d_sum_rate;
    ordered = ordered && opt >= auc && auc >= greedy && greedy >= rnd;
    near = near && auc >= 0.95 * opt;
    detail += fmt("%sN=%d opt=%.3g auc=%.3g(%.1f%%) greedy=%.3g rand=%.3g",
                  detail.empty() ? "" : "; ", n, opt, auc,
                  opt > 0.0 ? 100.0 * auc / opt : 100.0, greedy, rnd);
  }
  result.pass = ordered && near;
  result.measured = detail;
  return result;
}

CriterionResult outage_separation(int threads) {
  CriterionResult result{7, "outage separation between auction and random",
                         false, "", 0.0};
  const ExperimentSpec spec = default_experiment(threads);
  const auto metrics = run_experiment_multi(
      spec.sim_config(20), {Scheme::auction, Scheme::random});
  const double auction = metrics.at(Scheme::auction).outage_fraction;
  const double random = metrics.at(Scheme::random).outage_fraction;
  result.pass = auction < 0.05 && random > 0.40;
  result.measured = fmt("auction outage %.4g; random outage %.4g", auction, random);
  return result;
}

CriterionResult deterministic_outputs() {
  CriterionResult result{8, "byte-identical outputs across reruns and threads",
                         false, "", 0.0};
  ExperimentSpec spec;
  spec.m = 6;
  spec.n_sweep = {5};
  spec.t_s = 50;
  spec.samples_per_pair = 300;
  spec.n_scenarios = 6;
  spec.seed = 31;

  const std::filesystem::path base =
      std::filesystem::temp_directory_path() / "d2dcoop_determinism";
  std::filesystem::remove_all(base);

  auto read_file = [](const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };

  std::vector<std::string> aggregates, details;
  for (const int threads : {1, 1, 3}) {
    const std::filesystem::path dir =
        base / fmt("threads_%d_run_%zu", threads, aggregates.size());
    spec.threads = threads;
    run_sweep(spec, dir.string());
    aggregates.push_back(read_file(dir / "aggregate.csv"));
    details.push_back(read_file(dir / "scenarios.csv"));
  }
  std::filesystem::remove_all(base);

  const bool same = aggregates[0] == aggregates[1] && aggregates[0] == aggregates[2] &&
                    details[0] == details[1] && details[0] == details[2] &&
                    !aggregates[0].empty() && !details[0].empty();
  result.pass = same;
  result.measured = same ? "aggregate.csv and scenarios.csv identical across "
                           "rerun and 1 vs 3 threads"
                         : "output files differ between runs";
  return result;
}

CriterionResult realized_rate_consistency(int threads) {
  CriterionResult result{9, "realized matched rate equals the guarantee", false,
                         "", 0.0};
  ExperimentSpec spec = default_experiment(threads);
  spec.t_s = 10000;
  spec.n_scenarios = 40;

  const SimConfig config = spec.sim_config(20);
  std::vector<SchemeScenario> detail;
  run_experiment(config, Scheme::auction, &detail);

  double sum = 0.0, sumsq = 0.0;
  long count = 0;
  for (const SchemeScenario& row : detail) {
    sum += row.matched_cu_rate_sum;
    sumsq += row.matched_cu_rate_sumsq;
    count += row.matched;
  }
  if (count < 2) {
    result.measured = "fewer than two matched CUs across all scenarios";
    return result;
  }
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
  const double se = std::sqrt(var / n);
  const double z = se > 0.0 ? std::abs(mean - config.r_th) / se : 0.0;
  result.pass = std::abs(mean - config.r_th) <= 3.0 * se;
  result.measured = fmt("mean %.5g vs r_th %.5g; se %.2g; |z| %.2f; n=%ld",
                        mean, config.r_th, se, z, count);
  return result;
}

}  // namespace

std::vector<int> all_criterion_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9}; }

CriterionResult run_criterion(int id, int threads) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult result;
  switch (id) {
    case 1: result = payoff_equals_oracle(); break;
    case 2: result = guarantee_binds(); break;
    case 3: result = auction_is_stable(); break;
    case 4: result = auction_near_optimal(); break;
    case 5: result = utilities_trend(threads); break;
    case 6: result = sum_rate_ordering(threads); break;
    case 7: result = outage_separation(threads); break;
    case 8: result = deterministic_outputs(); break;
    case 9: result = realized_rate_consistency(threads); break;
    default: throw std::invalid_argument("unknown criterion id: " + std::to_string(id));
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

std::vector<CriterionResult> run_criteria(const std::vector<int>& ids,
                                          int threads) {
  std::vector<CriterionResult> results;
  results.reserve(ids.size());
  for (const int id : ids) results.push_back(run_criterion(id, threads));
  return results;
}

void write_report_csv(std::ostream& out,
                      const std::vector<CriterionResult>& results) {
  out << "id,name,pass,measured,seconds\n";
  for (const CriterionResult& r : results) {
    out << r.id << ",\"" << r.name << "\"," << (r.pass ? 1 : 0) << ",\""
        << r.measured << "\"," << fmt("%.2f", r.seconds) << '\n';
  }
}

}  // namespace d2dcoop
