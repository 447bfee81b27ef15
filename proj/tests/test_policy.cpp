#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "d2dcoop/lp_oracle.hpp"
#include "d2dcoop/policy.hpp"
#include "d2dcoop/random.hpp"

using namespace d2dcoop;

namespace {

RateDistribution two_state() {
  Eigen::ArrayXd cu(2), d2d(2), p(2);
  cu << 2.0, 1.0;
  d2d << 1.0, 3.0;
  p << 0.5, 0.5;
  return RateDistribution(cu, d2d, p);
}

RateDistribution random_distribution(RandomStream& rng, int max_states = 10) {
  const int n = 1 + static_cast<int>(rng.uniform_index(
                        static_cast<std::uint64_t>(max_states)));
  Eigen::ArrayXd cu(n), d2d(n), p(n);
  for (int i = 0; i < n; ++i) {
    cu[i] = rng.uniform(0.0, 5.0);
    d2d[i] = rng.uniform(0.0, 5.0);
    p[i] = rng.uniform(0.05, 1.0);
  }
  p /= p.sum();
  return RateDistribution(cu, d2d, p);
}

// Cellular throughput delivered when every state whose d2d/cu rate ratio is
// at most lambda stays on the cellular side. Written from scratch so the
// tests do not trust the library's own accounting; compares ratios in the
// same divided form the solver uses so boundary states land on the same side.
double kept_cellular(const RateDistribution& dist, double lambda) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < dist.size(); ++i) {
    if (dist.rate_cu()[i] <= 0.0) continue;
    if (dist.rate_d2d()[i] / dist.rate_cu()[i] <= lambda) {
      total += dist.prob()[i] * dist.rate_cu()[i];
    }
  }
  return total;
}

}  // namespace

TEST_CASE("feasibility is the mean cellular rate test") {
  const RateDistribution dist = two_state();  // mean cellular rate 1.5
  CHECK(check_feasibility(dist, 1.4));
  CHECK(check_feasibility(dist, 1.5));
  CHECK_FALSE(check_feasibility(dist, 1.6));
  CHECK(dist.expected_cu() == doctest::Approx(1.5));
  CHECK(dist.expected_d2d() == doctest::Approx(2.0));
}

TEST_CASE("two-state distribution, binding guarantee") {
  const RateDistribution dist = two_state();
  const CooperationPolicy pol = solve_threshold(dist, 1.0);
  CHECK(pol.feasible);
  CHECK(pol.lambda == doctest::Approx(0.5));
  // The boundary state carries exactly the required mass, so it stays
  // entirely cellular.
  CHECK(pol.alpha_boundary == doctest::Approx(0.0));
  CHECK(expected_payoff(pol, dist) == doctest::Approx(1.5));
  CHECK(expected_cellular_rate(pol, dist) == doctest::Approx(1.0));
  CHECK(pair_value(dist, 1.0) == doctest::Approx(1.5));
}

TEST_CASE("two-state distribution, slack splits the boundary state") {
  const RateDistribution dist = two_state();
  const CooperationPolicy pol = solve_threshold(dist, 0.5);
  CHECK(pol.feasible);
  CHECK(pol.lambda == doctest::Approx(0.5));
  CHECK(pol.alpha_boundary == doctest::Approx(0.5));
  CHECK(expected_payoff(pol, dist) == doctest::Approx(1.75));
  CHECK(expected_cellular_rate(pol, dist) == doctest::Approx(0.5));
}

TEST_CASE("two-state distribution, unattainable guarantee") {
  const RateDistribution dist = two_state();
  const CooperationPolicy pol = solve_threshold(dist, 2.0);
  CHECK_FALSE(pol.feasible);
  CHECK(expected_payoff(pol, dist) == doctest::Approx(kInfeasiblePayoff));
  CHECK(pair_value(dist, 2.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(expected_cellular_rate(pol, dist), std::invalid_argument);
  CHECK_THROWS_AS(apply_policy(pol, RatePair{2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("zero guarantee gives the whole subframe away") {
  const RateDistribution dist = two_state();
  const CooperationPolicy pol = solve_threshold(dist, 0.0);
  CHECK(pol.feasible);
  CHECK(pol.lambda == doctest::Approx(0.0));
  CHECK(expected_payoff(pol, dist) == doctest::Approx(2.0));
  CHECK(apply_policy(pol, RatePair{2.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("threshold rule picks the correct side of the boundary") {
  CooperationPolicy pol;
  pol.feasible = true;
  pol.lambda = 0.5;
  pol.alpha_boundary = 0.25;
  pol.r_th = 1.0;

  CHECK(apply_policy(pol, RatePair{2.0, 0.9}) == 0.0);   // cellular wins
  CHECK(apply_policy(pol, RatePair{2.0, 1.001}) == 1.0); // d2d wins
  CHECK(apply_policy(pol, RatePair{2.0, 1.0}) == doctest::Approx(0.25));
  // Ties are detected with a relative tolerance, not exact equality.
  CHECK(apply_policy(pol, RatePair{2.0, 1.0 + 1e-13}) == doctest::Approx(0.25));
  CHECK(apply_policy(pol, RatePair{2.0, 1.0 + 1e-9}) == 1.0);
  // A state that is useless to the cellular side always goes to d2d.
  CHECK(apply_policy(pol, RatePair{0.0, 0.5}) == 1.0);
  CHECK(apply_policy(pol, RatePair{0.0, 0.0}) == doctest::Approx(0.25));
}

TEST_CASE("zero-cellular states are donated before anything else") {
  Eigen::ArrayXd cu(2), d2d(2), p(2);
  cu << 0.0, 2.0;
  d2d << 5.0, 1.0;
  p << 0.5, 0.5;
  const RateDistribution dist(cu, d2d, p);

  const CooperationPolicy pol = solve_threshold(dist, 0.9);
  CHECK(pol.feasible);
  CHECK(pol.lambda == doctest::Approx(0.5));
  CHECK(pol.alpha_boundary == doctest::Approx(0.1));
  CHECK(apply_policy(pol, RatePair{0.0, 5.0}) == 1.0);
  CHECK(expected_payoff(pol, dist) == doctest::Approx(2.55));
  CHECK(expected_cellular_rate(pol, dist) == doctest::Approx(0.9));
}

TEST_CASE("single-state distribution") {
  Eigen::ArrayXd cu(1), d2d(1), p(1);
  cu << 1.0;
  d2d << 4.0;
  p << 1.0;
  const RateDistribution dist(cu, d2d, p);

  const CooperationPolicy tight = solve_threshold(dist, 1.0);
  CHECK(tight.feasible);
  CHECK(tight.alpha_boundary == doctest::Approx(0.0));
  CHECK(expected_payoff(tight, dist) == doctest::Approx(0.0));

  const CooperationPolicy half = solve_threshold(dist, 0.5);
  CHECK(half.alpha_boundary == doctest::Approx(0.5));
  CHECK(expected_payoff(half, dist) == doctest::Approx(2.0));
  CHECK(expected_cellular_rate(half, dist) == doctest::Approx(0.5));
}

TEST_CASE("threshold solver agrees with the linear-programming oracle") {
  RandomStream rng(314159);
  int feasible_count = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RateDistribution dist = random_distribution(rng);
    const double r_th = rng.uniform01() * dist.expected_cu();
    const CooperationPolicy pol = solve_threshold(dist, r_th);
    const auto bound = lp_oracle(dist, r_th);
    REQUIRE(bound.has_value());
    REQUIRE(pol.feasible);
    ++feasible_count;
    CHECK(expected_payoff(pol, dist) == doctest::Approx(*bound).epsilon(1e-9));
  }
  CHECK(feasible_count == 100);

  // And the oracle agrees that over-tight guarantees are impossible.
  const RateDistribution dist = two_state();
  CHECK_FALSE(lp_oracle(dist, 2.0).has_value());
}

TEST_CASE("guarantee binds with equality on feasible instances") {
  RandomStream rng(271828);
  for (int trial = 0; trial < 100; ++trial) {
    const RateDistribution dist = random_distribution(rng);
    const double r_th = rng.uniform01() * dist.expected_cu();
    const CooperationPolicy pol = solve_threshold(dist, r_th);
    REQUIRE(pol.feasible);
    CHECK(std::abs(expected_cellular_rate(pol, dist) - r_th) <= 1e-9);
  }
}

TEST_CASE("no smaller threshold satisfies the guarantee") {
  RandomStream rng(161803);
  for (int trial = 0; trial < 100; ++trial) {
    const RateDistribution dist = random_distribution(rng);
    const double r_th = rng.uniform(0.1, 0.9) * dist.expected_cu();
    const CooperationPolicy pol = solve_threshold(dist, r_th);
    REQUIRE(pol.feasible);
    if (pol.lambda == 0.0) continue;

    // Probe just below lambda*: the kept cellular mass must fall short.
    double prev = 0.0;
    for (Eigen::Index i = 0; i < dist.size(); ++i) {
      if (dist.rate_cu()[i] <= 0.0) continue;
      const double ratio = dist.rate_d2d()[i] / dist.rate_cu()[i];
      if (ratio < pol.lambda && ratio > prev) prev = ratio;
    }
    const double probe = 0.5 * (prev + pol.lambda);
    CHECK(kept_cellular(dist, probe) < r_th - 1e-12);
    CHECK(kept_cellular(dist, pol.lambda) >= r_th - 1e-12);
  }
}

TEST_CASE("kept cellular mass is nondecreasing in the threshold") {
  RandomStream rng(577215);
  const RateDistribution dist = random_distribution(rng);
  double last = kept_cellular(dist, 0.0);
  for (double lambda = 0.1; lambda <= 5.0; lambda += 0.1) {
    const double now = kept_cellular(dist, lambda);
    CHECK(now >= last - 1e-15);
    last = now;
  }
}

TEST_CASE("payoff never improves when the guarantee tightens") {
  RandomStream rng(141421);
  for (int trial = 0; trial < 20; ++trial) {
    const RateDistribution dist = random_distribution(rng);
    const double cap = dist.expected_cu();
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 10; ++k) {
      const double r_th = cap * k / 10.0;
      const double value = pair_value(dist, r_th);
      CHECK(value <= last + 1e-12);
      last = value;
    }
  }
}

TEST_CASE("bisection solver lands on the same policy") {
  RandomStream rng(173205);
  for (int trial = 0; trial < 100; ++trial) {
    const RateDistribution dist = random_distribution(rng);
    const double r_th = rng.uniform01() * dist.expected_cu();
    const CooperationPolicy scan = solve_threshold(dist, r_th);
    const CooperationPolicy bisect = solve_threshold_bisection(dist, r_th);
    REQUIRE(scan.feasible == bisect.feasible);
    if (!scan.feasible) continue;
    CHECK(bisect.lambda == doctest::Approx(scan.lambda).epsilon(1e-9));
    CHECK(expected_payoff(bisect, dist) ==
          doctest::Approx(expected_payoff(scan, dist)).epsilon(1e-9));
  }
}

TEST_CASE("empirical distributions reproduce the explicit form") {
  Eigen::ArrayXd cu(4), d2d(4);
  cu << 2.0, 1.0, 2.0, 3.0;
  d2d << 1.0, 3.0, 1.0, 0.5;
  const RateDistribution emp = RateDistribution::from_samples(cu, d2d);
  CHECK(emp.size() == 4);
  CHECK(emp.prob()[0] == doctest::Approx(0.25));
  CHECK(emp.expected_cu() == doctest::Approx(2.0));

  Eigen::ArrayXd p(4);
  p << 0.25, 0.25, 0.25, 0.25;
  const RateDistribution exp(cu, d2d, p);
  const CooperationPolicy a = solve_threshold(emp, 1.2);
  const CooperationPolicy b = solve_threshold(exp, 1.2);
  CHECK(a.lambda == doctest::Approx(b.lambda));
  CHECK(expected_payoff(a, emp) == doctest::Approx(expected_payoff(b, exp)));
}

TEST_CASE("distribution validation rejects malformed inputs") {
  Eigen::ArrayXd ok(1), bad(1), p(1), short_p(0);
  ok << 1.0;
  bad << -1.0;
  p << 1.0;
  CHECK_THROWS_AS(RateDistribution(bad, ok, p), std::invalid_argument);
  CHECK_THROWS_AS(RateDistribution(ok, bad, p), std::invalid_argument);
  CHECK_THROWS_AS(RateDistribution(ok, ok, short_p), std::invalid_argument);

  Eigen::ArrayXd p_bad(1);
  p_bad << 0.9;
  CHECK_THROWS_AS(RateDistribution(ok, ok, p_bad), std::invalid_argument);

  const RateDistribution dist = two_state();
  CHECK_THROWS_AS(solve_threshold(dist, -0.5), std::invalid_argument);
}
