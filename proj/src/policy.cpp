#include "d2dcoop/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace d2dcoop {

namespace {

void check_r_th(double r_th) {
  if (!(r_th >= 0.0) || !std::isfinite(r_th)) {
    throw std::invalid_argument("r_th must be finite and nonnegative");
  }
}

// Candidate threshold with the constraint mass it carries.
struct Candidate {
  double ratio;
  double mass;  // p * r_cu
};

std::vector<Candidate> sorted_candidates(const RateDistribution& dist) {
  std::vector<Candidate> cands;
  cands.reserve(static_cast<std::size_t>(dist.size()));
  for (Eigen::Index k = 0; k < dist.size(); ++k) {
    const double rc = dist.rate_cu()[k];
    if (rc > 0.0) {
      cands.push_back({dist.rate_d2d()[k] / rc, dist.prob()[k] * rc});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.ratio < b.ratio; });
  return cands;
}

// Builds the policy once the threshold group is known. below is the
// constraint mass strictly under the threshold, boundary the mass exactly on
// it.
CooperationPolicy finish_policy(double r_th, double lambda, double below,
                                double boundary) {
  CooperationPolicy policy;
  policy.feasible = true;
  policy.r_th = r_th;
  policy.lambda = lambda;
  if (boundary > 0.0) {
    const double cu_share = std::clamp((r_th - below) / boundary, 0.0, 1.0);
    policy.alpha_boundary = 1.0 - cu_share;
  } else {
    policy.alpha_boundary = 0.0;
  }
  return policy;
}

}  // namespace

RateDistribution::RateDistribution(Eigen::ArrayXd rate_cu, Eigen::ArrayXd rate_d2d,
                                   Eigen::ArrayXd prob)
    : rate_cu_(std::move(rate_cu)),
      rate_d2d_(std::move(rate_d2d)),
      prob_(std::move(prob)) {
  const Eigen::Index n = rate_cu_.size();
  if (n == 0) throw std::invalid_argument("rate distribution: empty support");
  if (rate_d2d_.size() != n || prob_.size() != n) {
    throw std::invalid_argument("rate distribution: mismatched array lengths");
  }
  if (!rate_cu_.isFinite().all() || !rate_d2d_.isFinite().all()) {
    throw std::invalid_argument("rate distribution: rates must be finite");
  }
  if ((rate_cu_ < 0.0).any() || (rate_d2d_ < 0.0).any()) {
    throw std::invalid_argument("rate distribution: rates must be nonnegative");
  }
  if ((prob_ < 0.0).any()) {
    throw std::invalid_argument("rate distribution: negative probability");
  }
  if (std::abs(prob_.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("rate distribution: probabilities must sum to 1");
  }
}

RateDistribution RateDistribution::from_samples(Eigen::ArrayXd rate_cu,
                                                Eigen::ArrayXd rate_d2d) {
  const Eigen::Index n = rate_cu.size();
  if (n == 0) throw std::invalid_argument("rate distribution: no samples");
  Eigen::ArrayXd prob = Eigen::ArrayXd::Constant(n, 1.0 / static_cast<double>(n));
  return RateDistribution(std::move(rate_cu), std::move(rate_d2d), std::move(prob));
}

bool check_feasibility(const RateDistribution& dist, double r_th) {
  check_r_th(r_th);
  return dist.expected_cu() >= r_th;
}

CooperationPolicy solve_threshold(const RateDistribution& dist, double r_th) {
  check_r_th(r_th);
  CooperationPolicy infeasible;
  infeasible.r_th = r_th;
  if (!check_feasibility(dist, r_th)) return infeasible;

  const std::vector<Candidate> cands = sorted_candidates(dist);

  if (r_th <= 0.0) {
    // Any threshold works; the smallest is 0. Mass sitting exactly on 0
    // (states with r_d2d == 0) forms the boundary group.
    double boundary = 0.0;
    for (const Candidate& c : cands) {
      if (c.ratio > 0.0) break;
      boundary += c.mass;
    }
    return finish_policy(r_th, 0.0, 0.0, boundary);
  }

  double below = 0.0;
  std::size_t i = 0;
  while (i < cands.size()) {
    const double ratio = cands[i].ratio;
    double group = 0.0;
    while (i < cands.size() && cands[i].ratio == ratio) {
      group += cands[i].mass;
      ++i;
    }
    if (below + group >= r_th) return finish_policy(r_th, ratio, below, group);
    below += group;
  }

  // Feasibility said the total mass reaches r_th; if rounding in the prefix
  // sums left us just short, the last group is the threshold group.
  if (!cands.empty()) {
    double group = 0.0;
    const double last = cands.back().ratio;
    std::size_t j = cands.size();
    while (j > 0 && cands[j - 1].ratio == last) {
      group += cands[j - 1].mass;
      --j;
    }
    return finish_policy(r_th, last, below - group, group);
  }
  // No state carries cellular rate; feasible only when r_th == 0, handled
  // above. Keep the guard for completeness.
  return finish_policy(r_th, 0.0, 0.0, 0.0);
}

CooperationPolicy solve_threshold_bisection(const RateDistribution& dist,
                                            double r_th, double tol) {
  check_r_th(r_th);
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be positive");
  CooperationPolicy infeasible;
  infeasible.r_th = r_th;
  if (!check_feasibility(dist, r_th)) return infeasible;

  const std::vector<Candidate> cands = sorted_candidates(dist);

  // Constraint mass delivered to the cellular side if the threshold is
  // lambda: sum of masses with ratio <= lambda.
  const auto constraint = [&cands](double lambda) {
    double total = 0.0;
    for (const Candidate& c : cands) {
      if (c.ratio <= lambda) total += c.mass;
    }
    return total;
  };

  double lo = 0.0;
  double hi = cands.empty() ? 0.0 : cands.back().ratio;
  if (constraint(lo) >= r_th) {
    hi = lo;
  } else {
    while (hi - lo > tol * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (constraint(mid) >= r_th) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }

  // Snap to the candidate the bracket converged on, then finish exactly as
  // the scan does.
  double lambda = hi;
  for (const Candidate& c : cands) {
    if (c.ratio >= lo && c.ratio <= hi + tol * std::max(1.0, hi)) {
      lambda = c.ratio;
      break;
    }
    if (c.ratio > hi) break;
  }
  if (constraint(lambda) < r_th && !cands.empty()) {
    // The snap can land one candidate short when lo == hi from the start.
    for (const Candidate& c : cands) {
      if (c.ratio >= lambda && constraint(c.ratio) >= r_th) {
        lambda = c.ratio;
        break;
      }
    }
  }

  double below = 0.0;
  double boundary = 0.0;
  for (const Candidate& c : cands) {
    if (c.ratio < lambda) {
      below += c.mass;
    } else if (c.ratio == lambda) {
      boundary += c.mass;
    }
  }
  return finish_policy(r_th, lambda, below, boundary);
}

double apply_policy(const CooperationPolicy& policy, const RatePair& state) {
  if (!policy.feasible) {
    throw std::invalid_argument("apply_policy: policy is infeasible");
  }
  const double lhs = policy.lambda * state.cu;
  const double rhs = state.d2d;
  const double tol = kBoundaryTolerance * std::max(std::abs(lhs), std::abs(rhs));
  if (std::abs(lhs - rhs) <= tol) return policy.alpha_boundary;
  return lhs < rhs ? 1.0 : 0.0;
}

namespace {

// Vectorized alpha per state, same classification as apply_policy.
Eigen::ArrayXd policy_alpha(const CooperationPolicy& policy,
                            const RateDistribution& dist) {
  const Eigen::ArrayXd lhs = policy.lambda * dist.rate_cu();
  const Eigen::ArrayXd& rhs = dist.rate_d2d();
  const Eigen::ArrayXd tol = kBoundaryTolerance * lhs.abs().max(rhs.abs());
  const Eigen::ArrayXd strict = (lhs < rhs).cast<double>();
  return ((lhs - rhs).abs() <= tol)
      .select(Eigen::ArrayXd::Constant(dist.size(), policy.alpha_boundary), strict);
}

}  // namespace

double expected_payoff(const CooperationPolicy& policy,
                       const RateDistribution& dist) {
  if (!policy.feasible) return kInfeasiblePayoff;
  const Eigen::ArrayXd alpha = policy_alpha(policy, dist);
  return (dist.prob() * alpha * dist.rate_d2d()).sum();
}

double expected_cellular_rate(const CooperationPolicy& policy,
                              const RateDistribution& dist) {
  if (!policy.feasible) {
    throw std::invalid_argument("expected_cellular_rate: policy is infeasible");
  }
  const Eigen::ArrayXd alpha = policy_alpha(policy, dist);
  return (dist.prob() * (1.0 - alpha) * dist.rate_cu()).sum();
}

double pair_value(const RateDistribution& dist, double r_th) {
  return expected_payoff(solve_threshold(dist, r_th), dist);
}

PairSolveResult solve_all_pairs(const Geometry& geo, const LinkBudget& budget,
                                double r_th, int samples_per_pair,
                                const RandomStream& rng) {
  check_r_th(r_th);
  if (samples_per_pair < 1) {
    throw std::invalid_argument("solve_all_pairs: samples_per_pair must be >= 1");
  }
  const int m_count = static_cast<int>(geo.cu.size());
  const int n_count = static_cast<int>(geo.dt.size());
  PairSolveResult result;
  result.values = PayoffMatrix::Constant(m_count, n_count, kInfeasiblePayoff);
  result.policies.resize(static_cast<std::size_t>(m_count) * n_count);

  Eigen::ArrayXd cu_rates, d2d_rates;
  for (int m = 0; m < m_count; ++m) {
    for (int n = 0; n < n_count; ++n) {
      const std::uint64_t pair_id =
          static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n_count) + n;
      RandomStream pair_rng = rng.child(pair_id);
      const PairLinks links = pair_links(geo, m, n);
      sample_rate_pairs(links, budget, samples_per_pair, pair_rng, cu_rates,
                        d2d_rates);
      const RateDistribution dist =
          RateDistribution::from_samples(cu_rates, d2d_rates);
      const CooperationPolicy policy = solve_threshold(dist, r_th);
      result.policies[pair_id] = policy;
      result.values(m, n) = expected_payoff(policy, dist);
    }
  }
  return result;
}

PayoffMatrix build_payoff_matrix(const Geometry& geo, const LinkBudget& budget,
                                 double r_th, int samples_per_pair,
                                 const RandomStream& rng) {
  return solve_all_pairs(geo, budget, r_th, samples_per_pair, rng).values;
}

}  // namespace d2dcoop
