#include "d2dcoop/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace d2dcoop {

namespace {

std::string csv_number(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", x);
  return buffer;
}

void write_provenance(std::ostream& out, const ExperimentSpec& spec) {
  std::istringstream config(format_config(spec));
  std::string line;
  while (std::getline(config, line)) out << "# " << line << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}

}  // namespace

void run_sweep(const ExperimentSpec& spec, const std::string& out_dir,
               std::ostream* summary) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  std::ofstream aggregate = open_output(dir / "aggregate.csv");
  std::ofstream scenarios = open_output(dir / "scenarios.csv");
  write_provenance(aggregate, spec);
  write_provenance(scenarios, spec);
  aggregate << "N,scheme,eau_cu,eau_d2d,d2d_sum_rate,outage_fraction,"
               "matched_cus,matched_d2d\n";
  scenarios << "N,scheme,scenario,eau_cu,eau_d2d,d2d_sum_rate,d2d_sum_payoff,"
               "outage_fraction,outage_realized,matched\n";

  for (const int n : spec.n_sweep) {
    std::map<Scheme, std::vector<SchemeScenario>> detail;
    const std::map<Scheme, Metrics> results =
        run_experiment_multi(spec.sim_config(n), spec.schemes, &detail);

    for (const Scheme scheme : spec.schemes) {
      const Metrics& metrics = results.at(scheme);
      aggregate << n << ',' << scheme_name(scheme) << ','
                << csv_number(metrics.eau_cu) << ',' << csv_number(metrics.eau_d2d)
                << ',' << csv_number(metrics.d2d_sum_rate) << ','
                << csv_number(metrics.outage_fraction) << ','
                << csv_number(metrics.matched_cus) << ','
                << csv_number(metrics.matched_d2d) << '\n';

      const std::vector<SchemeScenario>& rows = detail.at(scheme);
      for (std::size_t s = 0; s < rows.size(); ++s) {
        const SchemeScenario& row = rows[s];
        scenarios << n << ',' << scheme_name(scheme) << ',' << s << ','
                  << csv_number(row.eau_cu) << ',' << csv_number(row.eau_d2d)
                  << ',' << csv_number(row.d2d_sum_rate) << ','
                  << csv_number(row.d2d_sum_payoff) << ','
                  << csv_number(row.outage_fraction) << ','
                  << csv_number(row.outage_realized) << ',' << row.matched
                  << '\n';
      }

      if (summary) {
        *summary << "N=" << n << ' ' << scheme_name(scheme)
                 << ": eau_cu=" << csv_number(metrics.eau_cu)
                 << " eau_d2d=" << csv_number(metrics.eau_d2d)
                 << " d2d_sum_rate=" << csv_number(metrics.d2d_sum_rate)
                 << " outage=" << csv_number(metrics.outage_fraction) << '\n';
      }
    }
  }

  aggregate.flush();
  scenarios.flush();
  if (!aggregate || !scenarios) {
    throw std::runtime_error("failed writing results to " + dir.string());
  }
}

}  // namespace d2dcoop
