#include "d2dcoop/tabular.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace d2dcoop {

namespace {

std::string round_trip(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

// Yields the payload of each line with comments and blanks stripped, keeping
// a running line number for error messages.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& payload) {
    std::string line;
    while (std::getline(in_, line)) {
      ++number_;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      payload = line;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("line " + std::to_string(number_) + ": " + what);
  }

 private:
  std::istream& in_;
  int number_ = 0;
};

}  // namespace

void write_distribution(std::ostream& out, const RateDistribution& dist) {
  out << "# r_cu r_d2d prob\n";
  for (Eigen::Index i = 0; i < dist.size(); ++i) {
    out << round_trip(dist.rate_cu()[i]) << ' ' << round_trip(dist.rate_d2d()[i])
        << ' ' << round_trip(dist.prob()[i]) << '\n';
  }
}

RateDistribution read_distribution(std::istream& in) {
  LineReader reader(in);
  std::vector<double> cu, d2d, p;
  std::string payload;
  while (reader.next(payload)) {
    std::istringstream fields(payload);
    double a = 0.0, b = 0.0, c = 0.0;
    if (!(fields >> a >> b >> c)) reader.fail("expected 'r_cu r_d2d prob'");
    std::string extra;
    if (fields >> extra) reader.fail("trailing field '" + extra + "'");
    cu.push_back(a);
    d2d.push_back(b);
    p.push_back(c);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(cu.size());
  if (n == 0) throw std::runtime_error("distribution file has no states");
  Eigen::ArrayXd cu_arr(n), d2d_arr(n), p_arr(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cu_arr[i] = cu[static_cast<std::size_t>(i)];
    d2d_arr[i] = d2d[static_cast<std::size_t>(i)];
    p_arr[i] = p[static_cast<std::size_t>(i)];
  }
  return RateDistribution(cu_arr, d2d_arr, p_arr);
}

void write_payoffs(std::ostream& out, const PayoffMatrix& v) {
  out << v.rows() << ' ' << v.cols() << '\n';
  for (Eigen::Index m = 0; m < v.rows(); ++m) {
    for (Eigen::Index n = 0; n < v.cols(); ++n) {
      out << m << ' ' << n << ' ' << round_trip(v(m, n)) << '\n';
    }
  }
}

PayoffMatrix read_payoffs(std::istream& in) {
  LineReader reader(in);
  std::string payload;
  if (!reader.next(payload)) throw std::runtime_error("payoff file is empty");
  std::istringstream header(payload);
  Eigen::Index rows = 0, cols = 0;
  if (!(header >> rows >> cols) || rows < 0 || cols < 0) {
    reader.fail("expected 'rows cols' header");
  }
  PayoffMatrix v(rows, cols);
  std::vector<bool> seen(static_cast<std::size_t>(rows * cols), false);
  while (reader.next(payload)) {
    std::istringstream fields(payload);
    Eigen::Index m = 0, n = 0;
    double value = 0.0;
    if (!(fields >> m >> n >> value)) reader.fail("expected 'm n value'");
    if (m < 0 || m >= rows || n < 0 || n >= cols) reader.fail("index out of range");
    const std::size_t idx = static_cast<std::size_t>(m * cols + n);
    if (seen[idx]) reader.fail("duplicate entry");
    seen[idx] = true;
    v(m, n) = value;
  }
  for (const bool s : seen) {
    if (!s) throw std::runtime_error("payoff file is missing entries");
  }
  return v;
}

void write_matching(std::ostream& out, const Matching& matching) {
  out << matching.cu_partner.size() << ' ' << matching.d2d_partner.size() << '\n';
  for (std::size_t m = 0; m < matching.cu_partner.size(); ++m) {
    if (matching.cu_partner[m] == kUnmatched) continue;
    out << m << ' ' << matching.cu_partner[m] << ' '
        << round_trip(matching.price[static_cast<Eigen::Index>(m)]) << '\n';
  }
}

Matching read_matching(std::istream& in) {
  LineReader reader(in);
  std::string payload;
  if (!reader.next(payload)) throw std::runtime_error("matching file is empty");
  std::istringstream header(payload);
  int m_count = 0, n_count = 0;
  if (!(header >> m_count >> n_count) || m_count < 0 || n_count < 0) {
    reader.fail("expected 'm_count n_count' header");
  }
  Matching matching = Matching::empty(m_count, n_count);
  while (reader.next(payload)) {
    std::istringstream fields(payload);
    int m = 0, n = 0;
    double price = 0.0;
    if (!(fields >> m >> n >> price)) reader.fail("expected 'm n price'");
    if (m < 0 || m >= m_count || n < 0 || n >= n_count) {
      reader.fail("index out of range");
    }
    if (matching.cu_partner[static_cast<std::size_t>(m)] != kUnmatched ||
        matching.d2d_partner[static_cast<std::size_t>(n)] != kUnmatched) {
      reader.fail("agent matched twice");
    }
    matching.cu_partner[static_cast<std::size_t>(m)] = n;
    matching.d2d_partner[static_cast<std::size_t>(n)] = m;
    matching.price[m] = price;
  }
  matching.validate();
  return matching;
}

}  // namespace d2dcoop
