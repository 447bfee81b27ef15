#pragma once

#include <vector>

#include <Eigen/Core>

#include "d2dcoop/random.hpp"

namespace d2dcoop {

// Transmit powers and receiver noise in linear watts, plus the path-loss
// exponent. One instance describes the radio configuration of the whole cell.
struct LinkBudget {
  double p_cu = 0.0;    // cellular user transmit power
  double p_d2d = 0.0;   // D2D transmitter power
  double noise = 0.0;   // receiver noise power
  double exponent = 4.0;
};

// Spectral efficiencies in nats/s/Hz for one channel state: what the cellular
// link carries if it owns the subframe, and what the D2D link carries if it
// does.
struct RatePair {
  double cu = 0.0;
  double d2d = 0.0;
};

// One fading realization of the four links that matter to a (CU m, D2D n)
// pair: CU to base station, CU to D2D transmitter, D2D transmitter to base
// station, D2D transmitter to D2D receiver.
struct ChannelDraw {
  double h_mb = 0.0;
  double h_mn = 0.0;
  double h_nb = 0.0;
  double h_nn = 0.0;
};

// Node positions for one scenario. The base station sits at the origin; dt
// and dr are the transmitter and receiver of each D2D pair.
struct Geometry {
  Eigen::Vector2d base_station = Eigen::Vector2d::Zero();
  std::vector<Eigen::Vector2d> cu;
  std::vector<Eigen::Vector2d> dt;
  std::vector<Eigen::Vector2d> dr;
};

// Link distances for one (CU, D2D) pair, in meters.
struct PairLinks {
  double d_mb = 0.0;
  double d_mn = 0.0;
  double d_nb = 0.0;
  double d_nn = 0.0;
};

PairLinks pair_links(const Geometry& geo, int m, int n);

// Channel gain eta * d^-exponent. Throws std::domain_error for d <= 0 or
// negative fading. Large distances are handled in the log domain so the
// deterministic part cannot underflow before the fading factor is applied.
double path_gain(double distance, double exponent, double fading);

// Unit-mean exponential fading draw (Rayleigh envelope power).
double sample_fading(RandomStream& rng);

// Direct cellular rate ln(1 + p_cu h_mb / noise).
double cellular_rate(double h_mb, const LinkBudget& budget);

// Decode-and-forward relay rate through the D2D transmitter. Half the
// minimum of the decoding-leg rate and the combined forward rate, because the
// two hops split the subframe.
double relay_rate(double h_mn, double h_mb, double h_nb, const LinkBudget& budget);

// The CU transmits directly or through the relay, whichever is faster.
double effective_cu_rate(double direct, double relay);

// D2D link rate ln(1 + p_d2d h_nn / noise).
double d2d_rate(double h_nn, const LinkBudget& budget);

ChannelDraw draw_channel(const PairLinks& links, double exponent, RandomStream& rng);

RatePair rate_pair_from_draw(const ChannelDraw& draw, const LinkBudget& budget);

// Draws one fading state and evaluates both rates for the pair.
RatePair sample_rate_pair(const PairLinks& links, const LinkBudget& budget,
                          RandomStream& rng);

// Batch variant: fills cu_out/d2d_out with `count` independent draws, using
// exactly the same per-sample draw order as sample_rate_pair so the two paths
// produce identical sequences from the same stream.
void sample_rate_pairs(const PairLinks& links, const LinkBudget& budget, int count,
                       RandomStream& rng, Eigen::ArrayXd& cu_out,
                       Eigen::ArrayXd& d2d_out);

}  // namespace d2dcoop
