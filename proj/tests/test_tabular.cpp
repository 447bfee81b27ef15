#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "d2dcoop/tabular.hpp"

using namespace d2dcoop;

TEST_CASE("distribution round-trips exactly") {
  Eigen::ArrayXd cu(3), d2d(3), p(3);
  cu << 2.0, 1.0 / 3.0, 0.1234567890123456;
  d2d << 1.0, 3.0, 5e-20;
  p << 0.25, 0.25, 0.5;
  const RateDistribution dist(cu, d2d, p);

  std::stringstream io;
  write_distribution(io, dist);
  const RateDistribution back = read_distribution(io);
  REQUIRE(back.size() == 3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(back.rate_cu()[i] == dist.rate_cu()[i]);
    CHECK(back.rate_d2d()[i] == dist.rate_d2d()[i]);
    CHECK(back.prob()[i] == dist.prob()[i]);
  }
}

TEST_CASE("distribution reader tolerates comments and blanks") {
  std::istringstream in(
      "# fixture\n"
      "\n"
      "2 1 0.5   # boundary state\n"
      "1 3 0.5\n");
  const RateDistribution dist = read_distribution(in);
  CHECK(dist.size() == 2);
  CHECK(dist.rate_cu()[0] == 2.0);
  CHECK(dist.prob()[1] == 0.5);
}

TEST_CASE("distribution reader rejects malformed lines") {
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_distribution(empty), std::runtime_error);

  std::istringstream short_line("2 1\n");
  CHECK_THROWS_AS(read_distribution(short_line), std::runtime_error);

  std::istringstream long_line("2 1 0.5 9\n");
  CHECK_THROWS_AS(read_distribution(long_line), std::runtime_error);

  std::istringstream bad_prob("2 1 0.9\n");  // does not sum to 1
  CHECK_THROWS_AS(read_distribution(bad_prob), std::invalid_argument);
}

TEST_CASE("payoff matrix round-trips with sentinels") {
  PayoffMatrix v(2, 3);
  v << 0.5, -1.0, 2.25, 1.0 / 7.0, 0.0, -1.0;
  std::stringstream io;
  write_payoffs(io, v);
  const PayoffMatrix back = read_payoffs(io);
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 3);
  CHECK((back - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("payoff reader enforces completeness") {
  std::istringstream missing("2 2\n0 0 1\n0 1 1\n1 0 1\n");
  CHECK_THROWS_AS(read_payoffs(missing), std::runtime_error);

  std::istringstream duplicate("1 1\n0 0 1\n0 0 2\n");
  CHECK_THROWS_AS(read_payoffs(duplicate), std::runtime_error);

  std::istringstream out_of_range("1 1\n0 1 1\n");
  CHECK_THROWS_AS(read_payoffs(out_of_range), std::runtime_error);

  std::istringstream no_header("");
  CHECK_THROWS_AS(read_payoffs(no_header), std::runtime_error);
}

TEST_CASE("matching round-trips including prices") {
  Matching mu = Matching::empty(3, 4);
  mu.cu_partner[0] = 2;
  mu.d2d_partner[2] = 0;
  mu.price[0] = 5.125;
  mu.cu_partner[2] = 1;
  mu.d2d_partner[1] = 2;
  mu.price[2] = 1.0 / 3.0;

  std::stringstream io;
  write_matching(io, mu);
  const Matching back = read_matching(io);
  CHECK(back.cu_partner == mu.cu_partner);
  CHECK(back.d2d_partner == mu.d2d_partner);
  CHECK(back.price == mu.price);

  std::stringstream empty_io;
  write_matching(empty_io, Matching::empty(2, 2));
  const Matching none = read_matching(empty_io);
  CHECK(none.matched_count() == 0);
}

TEST_CASE("matching reader rejects conflicting pairs") {
  std::istringstream twice("2 2\n0 0 0\n1 0 0\n");
  CHECK_THROWS_AS(read_matching(twice), std::runtime_error);

  std::istringstream out_of_range("1 1\n0 3 0\n");
  CHECK_THROWS_AS(read_matching(out_of_range), std::runtime_error);
}
