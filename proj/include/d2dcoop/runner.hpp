#pragma once

#include <iosfwd>
#include <string>

#include "d2dcoop/config.hpp"

namespace d2dcoop {

// Runs the full sweep and writes two CSV files into out_dir (created if
// missing): aggregate.csv with one row per (N, scheme) and scenarios.csv
// with one row per (N, scheme, scenario). Both start with the resolved
// config as '#' comment lines so any result file identifies its run. Rows
// appear in sweep order, then scheme order, then scenario order, making the
// files byte-identical across repeat runs with the same spec. An optional
// stream receives a short human-readable summary.
void run_sweep(const ExperimentSpec& spec, const std::string& out_dir,
               std::ostream* summary = nullptr);

}  // namespace d2dcoop
