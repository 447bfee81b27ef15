#include "d2dcoop/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "d2dcoop/hungarian.hpp"

namespace d2dcoop {

namespace {

// Absolute slack for the stability comparisons, far below any meaningful
// epsilon but wide enough to absorb accumulated rounding in the prices.
constexpr double kStabilitySlack = 1e-9;

void check_dims(const Matching& matching, const Eigen::MatrixXd& v) {
  if (static_cast<int>(matching.cu_partner.size()) != v.rows() ||
      static_cast<int>(matching.d2d_partner.size()) != v.cols()) {
    throw std::invalid_argument("matching does not fit the payoff matrix");
  }
}

}  // namespace

Matching Matching::empty(int m_count, int n_count) {
  if (m_count < 0 || n_count < 0) {
    throw std::invalid_argument("matching: negative side size");
  }
  Matching matching;
  matching.cu_partner.assign(m_count, kUnmatched);
  matching.d2d_partner.assign(n_count, kUnmatched);
  matching.price = Eigen::VectorXd::Zero(m_count);
  return matching;
}

int Matching::matched_count() const {
  return static_cast<int>(std::count_if(cu_partner.begin(), cu_partner.end(),
                                        [](int n) { return n != kUnmatched; }));
}

void Matching::validate() const {
  const int m_count = static_cast<int>(cu_partner.size());
  const int n_count = static_cast<int>(d2d_partner.size());
  if (price.size() != m_count) {
    throw std::logic_error("matching: price vector length mismatch");
  }
  for (int m = 0; m < m_count; ++m) {
    const int n = cu_partner[m];
    if (n != kUnmatched) {
      if (n < 0 || n >= n_count || d2d_partner[n] != m) {
        throw std::logic_error("matching: cu_partner inconsistent");
      }
    } else if (price[m] != 0.0) {
      throw std::logic_error("matching: unmatched CU with nonzero price");
    }
    if (price[m] < 0.0) throw std::logic_error("matching: negative price");
  }
  for (int n = 0; n < n_count; ++n) {
    const int m = d2d_partner[n];
    if (m != kUnmatched && (m < 0 || m >= m_count || cu_partner[m] != n)) {
      throw std::logic_error("matching: d2d_partner inconsistent");
    }
  }
}

Utilities utilities(const Matching& matching, const Eigen::MatrixXd& v) {
  check_dims(matching, v);
  Utilities u;
  u.cu = matching.price;
  u.d2d = Eigen::VectorXd::Zero(v.cols());
  for (int n = 0; n < v.cols(); ++n) {
    const int m = matching.d2d_partner[n];
    if (m != kUnmatched) u.d2d[n] = v(m, n) - matching.price[m];
  }
  return u;
}

int demand(const Eigen::MatrixXd& v, const Eigen::VectorXd& beta, int n) {
  if (n < 0 || n >= v.cols()) throw std::out_of_range("demand: d2d index");
  if (beta.size() != v.rows()) throw std::invalid_argument("demand: beta length");
  int best = kUnmatched;
  double best_net = 0.0;
  for (int m = 0; m < v.rows(); ++m) {
    const double net = v(m, n) - beta[m];
    if (best == kUnmatched ? net >= 0.0 : net > best_net) {
      best = m;
      best_net = net;
    }
  }
  return best;
}

Matching auction_match(const Eigen::MatrixXd& v, double epsilon, RandomStream& rng,
                       AuctionTrace* trace) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("auction_match: epsilon must be positive");
  }
  const int m_count = static_cast<int>(v.rows());
  const int n_count = static_cast<int>(v.cols());

  Matching mu = Matching::empty(m_count, n_count);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m_count);       // announced this round
  Eigen::VectorXd beta_prev = beta;                            // announced last round
  Eigen::VectorXd beta_next = beta;                            // for the next round
  Eigen::ArrayXXi g = Eigen::ArrayXXi::Zero(m_count, n_count);       // proposals
  Eigen::ArrayXXi g_prev = Eigen::ArrayXXi::Zero(m_count, n_count);  // last round's

  const double max_v = (m_count > 0 && n_count > 0)
                           ? std::max(0.0, v.maxCoeff())
                           : 0.0;
  const long round_cap =
      10L * (static_cast<long>(m_count) *
                 static_cast<long>(std::ceil(max_v / epsilon)) +
             m_count + n_count);

  for (long round = 1;; ++round) {
    if (round > round_cap) {
      AuctionState state;
      state.round = static_cast<int>(round);
      state.beta = beta;
      state.proposals = g;
      state.prev_proposals = g_prev;
      state.current = mu;
      std::ostringstream msg;
      msg << "auction failed to settle within " << round_cap << " rounds";
      throw AuctionDivergenceError(msg.str(), std::move(state));
    }
    if (trace) {
      trace->beta_per_round.push_back(beta);
      trace->rounds = static_cast<int>(round);
    }

    // Proposal phase: every unmatched D2D pair proposes to the CU it demands
    // at the announced prices, or drops out for this round.
    g.setZero();
    int proposals_made = 0;
    for (int n = 0; n < n_count; ++n) {
      if (mu.d2d_partner[n] != kUnmatched) continue;
      const int m = demand(v, beta, n);
      if (m != kUnmatched) {
        g(m, n) = 1;
        ++proposals_made;
      }
    }

    // Recall phase: a CU that raised its price out of everyone's reach goes
    // back to last round's proposers, picks one at random, and matches at the
    // price it announced back then. The picked pair abandons whatever
    // proposal it made this round.
    for (int m = 0; m < m_count; ++m) {
      if (mu.cu_partner[m] != kUnmatched) continue;
      if (g.row(m).sum() != 0 || g_prev.row(m).sum() == 0) continue;
      std::vector<int> previous;
      for (int n = 0; n < n_count; ++n) {
        if (g_prev(m, n) == 1 && mu.d2d_partner[n] == kUnmatched) previous.push_back(n);
      }
      if (previous.empty()) continue;
      const int n_star =
          previous[static_cast<std::size_t>(rng.uniform_index(previous.size()))];
      mu.cu_partner[m] = n_star;
      mu.d2d_partner[n_star] = m;
      mu.price[m] = beta_prev[m];
      beta_next[m] = beta[m];
      for (int m2 = 0; m2 < m_count; ++m2) {
        if (g(m2, n_star) == 1) g(m2, n_star) = 0;
      }
    }

    // Decision phase: a lone proposal is accepted when the CU is unmatched or
    // the offer beats its current price; colliding proposals push the price
    // up by epsilon and put the current partner, if it pays full price, back
    // into the pool of proposers.
    for (int m = 0; m < m_count; ++m) {
      const int cnt = g.row(m).sum();
      if (cnt == 1 &&
          (mu.cu_partner[m] == kUnmatched || mu.price[m] < beta[m])) {
        int n_star = kUnmatched;
        for (int n = 0; n < n_count; ++n) {
          if (g(m, n) == 1) {
            n_star = n;
            break;
          }
        }
        const int old = mu.cu_partner[m];
        if (old != kUnmatched) mu.d2d_partner[old] = kUnmatched;
        mu.cu_partner[m] = n_star;
        mu.d2d_partner[n_star] = m;
        mu.price[m] = beta[m];
        beta_next[m] = beta[m];
      } else if (cnt >= 1) {
        const int old = mu.cu_partner[m];
        if (old != kUnmatched) {
          mu.cu_partner[m] = kUnmatched;
          mu.d2d_partner[old] = kUnmatched;
          if (mu.price[m] == beta[m]) g(m, old) = 1;
          mu.price[m] = 0.0;
        }
        beta_next[m] = beta[m] + epsilon;
      } else {
        beta_next[m] = beta[m];
      }
    }

    beta_prev = beta;
    beta = beta_next;
    g_prev = g;

    if (proposals_made == 0) break;
  }

  mu.validate();
  return mu;
}

bool is_epsilon_stable(const Matching& matching, const Eigen::MatrixXd& v,
                       double epsilon, StabilityWitness* witness) {
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("is_epsilon_stable: epsilon must be nonnegative");
  }
  check_dims(matching, v);
  matching.validate();
  const Utilities u = utilities(matching, v);

  const auto fail = [&](StabilityWitness w) {
    if (witness) *witness = w;
    return false;
  };
  for (int m = 0; m < v.rows(); ++m) {
    if (u.cu[m] < -kStabilitySlack) {
      return fail({StabilityWitness::Kind::negative_cu_utility, m, kUnmatched,
                   -u.cu[m]});
    }
  }
  for (int n = 0; n < v.cols(); ++n) {
    if (u.d2d[n] < -kStabilitySlack) {
      return fail({StabilityWitness::Kind::negative_d2d_utility, kUnmatched, n,
                   -u.d2d[n]});
    }
  }
  for (int m = 0; m < v.rows(); ++m) {
    for (int n = 0; n < v.cols(); ++n) {
      if (v(m, n) < 0.0) continue;
      const double deficit = (v(m, n) - epsilon) - (u.cu[m] + u.d2d[n]);
      if (deficit > kStabilitySlack) {
        return fail({StabilityWitness::Kind::blocking_pair, m, n, deficit});
      }
    }
  }
  if (witness) *witness = StabilityWitness{};
  return true;
}

AssignmentResult optimal_assignment(const Eigen::MatrixXd& v) {
  const int m_count = static_cast<int>(v.rows());
  const int n_count = static_cast<int>(v.cols());
  AssignmentResult result;
  result.matching = Matching::empty(m_count, n_count);
  if (m_count == 0 || n_count == 0) return result;

  // Square maximization problem: unacceptable pairs and padding both cost the
  // same as leaving the slot empty.
  const int k = std::max(m_count, n_count);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(k, k);
  for (int m = 0; m < m_count; ++m) {
    for (int n = 0; n < n_count; ++n) {
      cost(m, n) = -std::max(v(m, n), 0.0);
    }
  }

  const std::vector<int> row_of_col = min_cost_assignment(cost);
  for (int j = 0; j < n_count; ++j) {
    const int i = row_of_col[j];
    if (i < m_count && v(i, j) >= 0.0) {
      result.matching.cu_partner[i] = j;
      result.matching.d2d_partner[j] = i;
      result.total_value += v(i, j);
    }
  }
  result.matching.validate();
  return result;
}

Matching match_without_transfer(const Eigen::MatrixXd& v, RandomStream& rng) {
  const int m_count = static_cast<int>(v.rows());
  const int n_count = static_cast<int>(v.cols());
  Matching matching = Matching::empty(m_count, n_count);

  std::vector<int> order(n_count);
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);

  std::vector<int> prefs;
  for (const int n : order) {
    prefs.clear();
    for (int m = 0; m < m_count; ++m) {
      if (v(m, n) >= 0.0) prefs.push_back(m);
    }
    std::stable_sort(prefs.begin(), prefs.end(),
                     [&](int a, int b) { return v(a, n) > v(b, n); });
    for (const int m : prefs) {
      if (matching.cu_partner[m] == kUnmatched) {
        matching.cu_partner[m] = n;
        matching.d2d_partner[n] = m;
        break;
      }
    }
  }
  matching.validate();
  return matching;
}

Matching random_match(int m_count, int n_count, RandomStream& rng) {
  Matching matching = Matching::empty(m_count, n_count);
  if (m_count == 0 || n_count == 0) return matching;
  if (m_count <= n_count) {
    std::vector<int> pool(n_count);
    std::iota(pool.begin(), pool.end(), 0);
    shuffle(pool, rng);
    for (int m = 0; m < m_count; ++m) {
      matching.cu_partner[m] = pool[m];
      matching.d2d_partner[pool[m]] = m;
    }
  } else {
    std::vector<int> pool(m_count);
    std::iota(pool.begin(), pool.end(), 0);
    shuffle(pool, rng);
    for (int n = 0; n < n_count; ++n) {
      matching.d2d_partner[n] = pool[n];
      matching.cu_partner[pool[n]] = n;
    }
  }
  matching.validate();
  return matching;
}

double total_matched_value(const Matching& matching, const Eigen::MatrixXd& v) {
  check_dims(matching, v);
  double total = 0.0;
  for (int m = 0; m < v.rows(); ++m) {
    if (matching.cu_partner[m] != kUnmatched) total += v(m, matching.cu_partner[m]);
  }
  return total;
}

}  // namespace d2dcoop
