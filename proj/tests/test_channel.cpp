#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "d2dcoop/channel.hpp"
#include "d2dcoop/random.hpp"

using namespace d2dcoop;

namespace {

LinkBudget table_budget() {
  LinkBudget b;
  b.p_cu = 0.02;     // 20 mW
  b.p_d2d = 0.02;    // 20 mW
  b.noise = 1e-13;   // -100 dBm
  b.exponent = 4.0;
  return b;
}

}  // namespace

TEST_CASE("stream reproducibility and key-based derivation") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // Children depend on the key only, not on how much the parent consumed.
  RandomStream fresh(42);
  RandomStream child_before = fresh.child(7);
  for (int i = 0; i < 10; ++i) fresh.uniform01();
  RandomStream child_after = fresh.child(7);
  for (int i = 0; i < 20; ++i) CHECK(child_before.next_u64() == child_after.next_u64());

  RandomStream c1 = RandomStream(42).child(1);
  RandomStream c2 = RandomStream(42).child(2);
  CHECK(c1.next_u64() != c2.next_u64());
}

TEST_CASE("uniform01 range and uniform_index bounds") {
  RandomStream rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  long counts[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < 100000; ++i) ++counts[rng.uniform_index(5)];
  for (const long c : counts) {
    CHECK(c > 19000);
    CHECK(c < 21000);
  }
}

TEST_CASE("exponential fading has unit mean and the right tail") {
  RandomStream rng(123);
  const int n = 1000000;
  double sum = 0.0;
  long above_one = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_fading(rng);
    CHECK(x >= 0.0);
    sum += x;
    if (x > 1.0) ++above_one;
  }
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.005));
  CHECK(static_cast<double>(above_one) / n ==
        doctest::Approx(std::exp(-1.0)).epsilon(0.01));
}

TEST_CASE("path gain matches the power law") {
  CHECK(path_gain(250.0, 4.0, 0.7) ==
        doctest::Approx(0.7 / 3906250000.0).epsilon(1e-12));
  CHECK(path_gain(10.0, 4.0, 1.0) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(path_gain(500.0, 4.0, 0.0) == 0.0);

  // Log-domain evaluation agrees with direct powers over a wide range.
  RandomStream rng(5);
  for (int i = 0; i < 200; ++i) {
    const double d = rng.uniform(1.0, 2000.0);
    const double eta = rng.exponential();
    CHECK(path_gain(d, 4.0, eta) ==
          doctest::Approx(eta * std::pow(d, -4.0)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(path_gain(0.0, 4.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(path_gain(-1.0, 4.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(path_gain(1.0, 4.0, -0.1), std::domain_error);
}

TEST_CASE("rate formulas against spreadsheet arithmetic") {
  const LinkBudget b = table_budget();

  // CU at (500,0), transmitter at (300,0), receiver 10 m further out, unit
  // fading on every link.
  Geometry geo;
  geo.cu.push_back({500.0, 0.0});
  geo.dt.push_back({300.0, 0.0});
  geo.dr.push_back({300.0, 10.0});
  const PairLinks links = pair_links(geo, 0, 0);
  CHECK(links.d_mb == doctest::Approx(500.0));
  CHECK(links.d_mn == doctest::Approx(200.0));
  CHECK(links.d_nb == doctest::Approx(300.0));
  CHECK(links.d_nn == doctest::Approx(10.0));

  ChannelDraw unit;
  unit.h_mb = std::pow(500.0, -4.0);
  unit.h_mn = std::pow(200.0, -4.0);
  unit.h_nb = std::pow(300.0, -4.0);
  unit.h_nn = std::pow(10.0, -4.0);

  const double snr_mb = 0.02 * unit.h_mb / 1e-13;
  const double snr_mn = 0.02 * unit.h_mn / 1e-13;
  const double snr_nb = 0.02 * unit.h_nb / 1e-13;
  const double snr_nn = 0.02 * unit.h_nn / 1e-13;
  const double direct = std::log(1.0 + snr_mb);
  const double relay = 0.5 * std::min(std::log(1.0 + snr_mn),
                                      std::log(1.0 + snr_mb + snr_nb));

  CHECK(cellular_rate(unit.h_mb, b) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(relay_rate(unit.h_mn, unit.h_mb, unit.h_nb, b) ==
        doctest::Approx(relay).epsilon(1e-12));
  CHECK(effective_cu_rate(direct, relay) == doctest::Approx(std::max(direct, relay)));
  CHECK(d2d_rate(unit.h_nn, b) ==
        doctest::Approx(std::log(1.0 + snr_nn)).epsilon(1e-12));

  const RatePair rates = rate_pair_from_draw(unit, b);
  CHECK(rates.cu == doctest::Approx(std::max(direct, relay)).epsilon(1e-12));
  CHECK(rates.d2d == doctest::Approx(std::log(1.0 + snr_nn)).epsilon(1e-12));

  // With this placement the relay path beats the direct link.
  CHECK(relay > direct);

  ChannelDraw faded;  // all-zero gains
  const RatePair silent = rate_pair_from_draw(faded, b);
  CHECK(silent.cu == 0.0);
  CHECK(silent.d2d == 0.0);
}

TEST_CASE("relay rate never exceeds half the decoding leg") {
  const LinkBudget b = table_budget();
  RandomStream rng(9);
  for (int i = 0; i < 500; ++i) {
    const double h_mn = rng.exponential() * 1e-10;
    const double h_mb = rng.exponential() * 1e-11;
    const double h_nb = rng.exponential() * 1e-10;
    const double r = relay_rate(h_mn, h_mb, h_nb, b);
    CHECK(r <= 0.5 * std::log1p(b.p_cu * h_mn / b.noise) + 1e-12);
    CHECK(r >= 0.0);
  }
}

TEST_CASE("rate monotonicity in each channel gain") {
  const LinkBudget b = table_budget();
  RandomStream rng(11);
  for (int i = 0; i < 200; ++i) {
    const double h = rng.exponential() * 1e-10;
    CHECK(cellular_rate(2.0 * h, b) >= cellular_rate(h, b));
    CHECK(d2d_rate(2.0 * h, b) >= d2d_rate(h, b));
    const double h2 = rng.exponential() * 1e-10;
    const double h3 = rng.exponential() * 1e-11;
    CHECK(relay_rate(2.0 * h, h3, h2, b) >= relay_rate(h, h3, h2, b));
    CHECK(relay_rate(h, 2.0 * h3, h2, b) >= relay_rate(h, h3, h2, b));
    CHECK(relay_rate(h, h3, 2.0 * h2, b) >= relay_rate(h, h3, h2, b));
  }
}

TEST_CASE("batch sampling matches repeated single draws") {
  const LinkBudget b = table_budget();
  PairLinks links;
  links.d_mb = 480.0;
  links.d_mn = 210.0;
  links.d_nb = 330.0;
  links.d_nn = 17.0;

  const int count = 64;
  Eigen::ArrayXd cu_batch, d2d_batch;
  RandomStream batch_rng(2024);
  sample_rate_pairs(links, b, count, batch_rng, cu_batch, d2d_batch);

  RandomStream single_rng(2024);
  for (int i = 0; i < count; ++i) {
    const RatePair one = sample_rate_pair(links, b, single_rng);
    CHECK(cu_batch[i] == doctest::Approx(one.cu).epsilon(1e-12));
    CHECK(d2d_batch[i] == doctest::Approx(one.d2d).epsilon(1e-12));
  }
}
