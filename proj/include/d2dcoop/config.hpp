#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "d2dcoop/sim.hpp"

namespace d2dcoop {

// A full experiment: one population sweep evaluated under a set of matching
// schemes. Radio quantities carry the config-file units (powers in mW, noise
// in dBm, distances in meters, the rate floor in bit/s/Hz) and are converted
// to the solver units (watts, nats/s/Hz) on demand.
struct ExperimentSpec {
  int m = 15;
  std::vector<int> n_sweep = {10, 15, 20, 25, 30};
  std::vector<Scheme> schemes = {Scheme::auction, Scheme::optimal,
                                 Scheme::no_transfer, Scheme::random};
  double cell_radius = 500.0;
  double ring_min = 200.0;
  double ring_max = 400.0;
  double d2d_min = 10.0;
  double d2d_max = 30.0;
  double pathloss_exponent = 4.0;
  double p_cu_mw = 20.0;
  double p_d2d_mw = 20.0;
  double noise_dbm = -100.0;
  double r_th = 1.8;  // bit/s/Hz; solvers run in nats, see nats_from_bits
  double epsilon = 1.0;
  int t_s = 1000;
  int samples_per_pair = 10000;
  int n_scenarios = 200;
  std::uint64_t seed = 1;
  int threads = 0;

  LinkBudget budget() const;
  SimConfig sim_config(int n_d2d) const;
};

double watts_from_mw(double mw);
double watts_from_dbm(double dbm);
double nats_from_bits(double bits);

// Line-oriented `key = value` text with '#' comments; keys match the
// ExperimentSpec field names, list values are comma-separated. Unspecified
// keys keep their defaults. Unknown keys, unparsable values, and invariant
// violations all raise std::runtime_error naming the offending key.
ExperimentSpec parse_config(std::istream& in);
ExperimentSpec load_config(const std::string& path);

// The resolved spec in config syntax, one key per line, for provenance.
std::string format_config(const ExperimentSpec& spec);

// Master-seed override for CI, read from D2DCOOP_SEED when set.
std::optional<std::uint64_t> seed_from_env();

}  // namespace d2dcoop
