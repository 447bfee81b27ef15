#include "d2dcoop/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace d2dcoop {

namespace {

void check_budget(const LinkBudget& b) {
  if (!(b.p_cu > 0.0) || !(b.p_d2d > 0.0) || !(b.noise > 0.0)) {
    throw std::domain_error("link budget: powers and noise must be positive");
  }
}

}  // namespace

PairLinks pair_links(const Geometry& geo, int m, int n) {
  if (m < 0 || m >= static_cast<int>(geo.cu.size())) {
    throw std::out_of_range("pair_links: cu index out of range");
  }
  if (n < 0 || n >= static_cast<int>(geo.dt.size()) ||
      n >= static_cast<int>(geo.dr.size())) {
    throw std::out_of_range("pair_links: d2d index out of range");
  }
  PairLinks links;
  links.d_mb = (geo.cu[m] - geo.base_station).norm();
  links.d_mn = (geo.cu[m] - geo.dt[n]).norm();
  links.d_nb = (geo.dt[n] - geo.base_station).norm();
  links.d_nn = (geo.dt[n] - geo.dr[n]).norm();
  return links;
}

double path_gain(double distance, double exponent, double fading) {
  if (!(distance > 0.0)) {
    throw std::domain_error("path_gain: distance must be positive");
  }
  if (fading < 0.0) {
    throw std::domain_error("path_gain: fading must be nonnegative");
  }
  return fading * std::exp(-exponent * std::log(distance));
}

double sample_fading(RandomStream& rng) { return rng.exponential(); }

double cellular_rate(double h_mb, const LinkBudget& budget) {
  check_budget(budget);
  return std::log1p(budget.p_cu * h_mb / budget.noise);
}

double relay_rate(double h_mn, double h_mb, double h_nb, const LinkBudget& budget) {
  check_budget(budget);
  const double decode = std::log1p(budget.p_cu * h_mn / budget.noise);
  const double forward =
      std::log1p((budget.p_cu * h_mb + budget.p_d2d * h_nb) / budget.noise);
  return 0.5 * std::min(decode, forward);
}

double effective_cu_rate(double direct, double relay) {
  return std::max(direct, relay);
}

double d2d_rate(double h_nn, const LinkBudget& budget) {
  check_budget(budget);
  return std::log1p(budget.p_d2d * h_nn / budget.noise);
}

ChannelDraw draw_channel(const PairLinks& links, double exponent, RandomStream& rng) {
  // Draw order is part of the reproducibility contract.
  ChannelDraw draw;
  draw.h_mb = path_gain(links.d_mb, exponent, rng.exponential());
  draw.h_mn = path_gain(links.d_mn, exponent, rng.exponential());
  draw.h_nb = path_gain(links.d_nb, exponent, rng.exponential());
  draw.h_nn = path_gain(links.d_nn, exponent, rng.exponential());
  return draw;
}

RatePair rate_pair_from_draw(const ChannelDraw& draw, const LinkBudget& budget) {
  const double direct = cellular_rate(draw.h_mb, budget);
  const double relay = relay_rate(draw.h_mn, draw.h_mb, draw.h_nb, budget);
  RatePair rates;
  rates.cu = effective_cu_rate(direct, relay);
  rates.d2d = d2d_rate(draw.h_nn, budget);
  return rates;
}

RatePair sample_rate_pair(const PairLinks& links, const LinkBudget& budget,
                          RandomStream& rng) {
  const ChannelDraw draw = draw_channel(links, budget.exponent, rng);
  return rate_pair_from_draw(draw, budget);
}

void sample_rate_pairs(const PairLinks& links, const LinkBudget& budget, int count,
                       RandomStream& rng, Eigen::ArrayXd& cu_out,
                       Eigen::ArrayXd& d2d_out) {
  check_budget(budget);
  if (count < 0) throw std::invalid_argument("sample_rate_pairs: negative count");
  const double g_mb = path_gain(links.d_mb, budget.exponent, 1.0);
  const double g_mn = path_gain(links.d_mn, budget.exponent, 1.0);
  const double g_nb = path_gain(links.d_nb, budget.exponent, 1.0);
  const double g_nn = path_gain(links.d_nn, budget.exponent, 1.0);
  const double c_mb = budget.p_cu * g_mb / budget.noise;
  const double c_mn = budget.p_cu * g_mn / budget.noise;
  const double c_nb = budget.p_d2d * g_nb / budget.noise;
  const double c_nn = budget.p_d2d * g_nn / budget.noise;

  Eigen::ArrayXd e_mb(count), e_mn(count), e_nb(count), e_nn(count);
  for (int i = 0; i < count; ++i) {
    // Same interleaved order as repeated sample_rate_pair calls.
    e_mb[i] = -std::log1p(-rng.uniform01());
    e_mn[i] = -std::log1p(-rng.uniform01());
    e_nb[i] = -std::log1p(-rng.uniform01());
    e_nn[i] = -std::log1p(-rng.uniform01());
  }

  cu_out.resize(count);
  d2d_out.resize(count);
  const Eigen::ArrayXd direct = (c_mb * e_mb).log1p();
  const Eigen::ArrayXd decode = (c_mn * e_mn).log1p();
  const Eigen::ArrayXd forward = (c_mb * e_mb + c_nb * e_nb).log1p();
  cu_out = direct.max(0.5 * decode.min(forward));
  d2d_out = (c_nn * e_nn).log1p();
}

}  // namespace d2dcoop
