#pragma once

#include <iosfwd>
#include <string>

#include "d2dcoop/matching.hpp"
#include "d2dcoop/policy.hpp"

namespace d2dcoop {

// Plain-text fixtures: whitespace-separated fields, one record per line,
// full-line or trailing '#' comments, doubles printed with enough digits to
// round-trip exactly.

// One "r_cu r_d2d prob" line per state.
void write_distribution(std::ostream& out, const RateDistribution& dist);
RateDistribution read_distribution(std::istream& in);

// "rows cols" header, then one "m n value" line per entry.
void write_payoffs(std::ostream& out, const PayoffMatrix& v);
PayoffMatrix read_payoffs(std::istream& in);

// "m_count n_count" header, then one "m n price" line per matched pair.
void write_matching(std::ostream& out, const Matching& matching);
Matching read_matching(std::istream& in);

}  // namespace d2dcoop
