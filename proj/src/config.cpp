#include "d2dcoop/config.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace d2dcoop {

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
  throw std::runtime_error("config key '" + key + "': " + what);
}

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_key(key, "expected a number, got '" + value + "'");
  }
  if (used != value.size()) bad_key(key, "trailing characters in '" + value + "'");
  if (!std::isfinite(out)) bad_key(key, "value must be finite");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  const double d = parse_double(key, value);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) bad_key(key, "expected an integer");
  return i;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(value, &used);
  } catch (const std::exception&) {
    bad_key(key, "expected an unsigned integer, got '" + value + "'");
  }
  if (used != value.size()) bad_key(key, "trailing characters in '" + value + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

void apply_key(ExperimentSpec& spec, const std::string& key,
               const std::string& value) {
  if (key == "m") spec.m = parse_int(key, value);
  else if (key == "n_sweep") {
    spec.n_sweep.clear();
    for (const std::string& item : split_list(value)) {
      spec.n_sweep.push_back(parse_int(key, item));
    }
  } else if (key == "schemes") {
    spec.schemes.clear();
    for (const std::string& item : split_list(value)) {
      try {
        spec.schemes.push_back(scheme_from_name(item));
      } catch (const std::exception&) {
        bad_key(key, "unknown scheme '" + item + "'");
      }
    }
  }
  else if (key == "cell_radius") spec.cell_radius = parse_double(key, value);
  else if (key == "ring_min") spec.ring_min = parse_double(key, value);
  else if (key == "ring_max") spec.ring_max = parse_double(key, value);
  else if (key == "d2d_min") spec.d2d_min = parse_double(key, value);
  else if (key == "d2d_max") spec.d2d_max = parse_double(key, value);
  else if (key == "pathloss_exponent") spec.pathloss_exponent = parse_double(key, value);
  else if (key == "p_cu_mw") spec.p_cu_mw = parse_double(key, value);
  else if (key == "p_d2d_mw") spec.p_d2d_mw = parse_double(key, value);
  else if (key == "noise_dbm") spec.noise_dbm = parse_double(key, value);
  else if (key == "r_th") spec.r_th = parse_double(key, value);
  else if (key == "epsilon") spec.epsilon = parse_double(key, value);
  else if (key == "t_s") spec.t_s = parse_int(key, value);
  else if (key == "samples_per_pair") spec.samples_per_pair = parse_int(key, value);
  else if (key == "n_scenarios") spec.n_scenarios = parse_int(key, value);
  else if (key == "seed") spec.seed = parse_seed(key, value);
  else if (key == "threads") spec.threads = parse_int(key, value);
  else bad_key(key, "unknown key");
}

void validate(const ExperimentSpec& spec) {
  if (spec.m < 0) bad_key("m", "must be >= 0");
  if (spec.n_sweep.empty()) bad_key("n_sweep", "sweep list must not be empty");
  for (const int n : spec.n_sweep) {
    if (n < 0) bad_key("n_sweep", "entries must be >= 0");
  }
  if (spec.schemes.empty()) bad_key("schemes", "scheme list must not be empty");
  if (!(spec.cell_radius > 0.0)) bad_key("cell_radius", "must be > 0");
  if (!(spec.ring_min > 0.0)) bad_key("ring_min", "must be > 0");
  if (!(spec.ring_max >= spec.ring_min)) bad_key("ring_max", "must be >= ring_min");
  if (!(spec.d2d_min > 0.0)) bad_key("d2d_min", "must be > 0");
  if (!(spec.d2d_max >= spec.d2d_min)) bad_key("d2d_max", "must be >= d2d_min");
  if (!(spec.pathloss_exponent > 0.0)) bad_key("pathloss_exponent", "must be > 0");
  if (!(spec.p_cu_mw > 0.0)) bad_key("p_cu_mw", "must be > 0");
  if (!(spec.p_d2d_mw > 0.0)) bad_key("p_d2d_mw", "must be > 0");
  if (!(spec.r_th >= 0.0)) bad_key("r_th", "must be >= 0");
  if (!(spec.epsilon > 0.0)) bad_key("epsilon", "must be > 0");
  if (spec.t_s < 1) bad_key("t_s", "must be >= 1");
  if (spec.samples_per_pair < 1) bad_key("samples_per_pair", "must be >= 1");
  if (spec.n_scenarios < 0) bad_key("n_scenarios", "must be >= 0");
  if (spec.threads < 0) bad_key("threads", "must be >= 0");
}

std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

}  // namespace

double watts_from_mw(double mw) { return mw / 1000.0; }

double watts_from_dbm(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double nats_from_bits(double bits) { return bits * std::numbers::ln2; }

LinkBudget ExperimentSpec::budget() const {
  LinkBudget b;
  b.p_cu = watts_from_mw(p_cu_mw);
  b.p_d2d = watts_from_mw(p_d2d_mw);
  b.noise = watts_from_dbm(noise_dbm);
  b.exponent = pathloss_exponent;
  return b;
}

SimConfig ExperimentSpec::sim_config(int n_d2d) const {
  SimConfig c;
  c.n_cu = m;
  c.n_d2d = n_d2d;
  c.cell_radius = cell_radius;
  c.ring_min = ring_min;
  c.ring_max = ring_max;
  c.d2d_min = d2d_min;
  c.d2d_max = d2d_max;
  c.budget = budget();
  c.r_th = nats_from_bits(r_th);
  c.epsilon = epsilon;
  c.t_s = t_s;
  c.samples_per_pair = samples_per_pair;
  c.n_scenarios = n_scenarios;
  c.seed = seed;
  c.threads = threads;
  return c;
}

ExperimentSpec parse_config(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(number) +
                               ": expected 'key = value'");
    }
    apply_key(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate(spec);
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

std::string format_config(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "m = " << spec.m << '\n';
  out << "n_sweep = ";
  for (std::size_t i = 0; i < spec.n_sweep.size(); ++i) {
    out << (i ? "," : "") << spec.n_sweep[i];
  }
  out << '\n';
  out << "schemes = ";
  for (std::size_t i = 0; i < spec.schemes.size(); ++i) {
    out << (i ? "," : "") << scheme_name(spec.schemes[i]);
  }
  out << '\n';
  out << "cell_radius = " << format_double(spec.cell_radius) << '\n';
  out << "ring_min = " << format_double(spec.ring_min) << '\n';
  out << "ring_max = " << format_double(spec.ring_max) << '\n';
  out << "d2d_min = " << format_double(spec.d2d_min) << '\n';
  out << "d2d_max = " << format_double(spec.d2d_max) << '\n';
  out << "pathloss_exponent = " << format_double(spec.pathloss_exponent) << '\n';
  out << "p_cu_mw = " << format_double(spec.p_cu_mw) << '\n';
  out << "p_d2d_mw = " << format_double(spec.p_d2d_mw) << '\n';
  out << "noise_dbm = " << format_double(spec.noise_dbm) << '\n';
  out << "r_th = " << format_double(spec.r_th) << '\n';
  out << "epsilon = " << format_double(spec.epsilon) << '\n';
  out << "t_s = " << spec.t_s << '\n';
  out << "samples_per_pair = " << spec.samples_per_pair << '\n';
  out << "n_scenarios = " << spec.n_scenarios << '\n';
  out << "seed = " << spec.seed << '\n';
  // threads is omitted: it cannot affect results, and including it would
  // break byte-identical outputs across worker counts.
  return out.str();
}

std::optional<std::uint64_t> seed_from_env() {
  const char* value = std::getenv("D2DCOOP_SEED");
  if (value == nullptr || *value == '\0') return std::nullopt;
  return parse_seed("D2DCOOP_SEED", value);
}

}  // namespace d2dcoop
