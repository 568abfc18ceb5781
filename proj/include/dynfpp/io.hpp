#ifndef DYNFPP_IO_HPP
#define DYNFPP_IO_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "stats.hpp"

namespace dynfpp {

// Plain decimal notation, 12 significant digits, trailing zeros trimmed.
inline std::string fmt12(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) return "0";
  int mag = int(std::floor(std::log10(std::fabs(x))));
  int decimals = std::max(0, 11 - mag);
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

using Cell = std::variant<std::string, double, long>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }

  static std::string render(const Cell& c) {
    if (auto* s = std::get_if<std::string>(&c)) {
      if (s->find_first_of(",\"\n") == std::string::npos) return *s;
      std::string q = "\"";
      for (char ch : *s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + '"';
    }
    if (auto* d = std::get_if<double>(&c)) return fmt12(*d);
    return std::to_string(std::get<long>(c));
  }

  void write(std::ostream& os) const {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << render(r[i]);
      os << '\n';
    }
  }
};

inline std::vector<Cell> estimator_cells(const EstimatorResult& e) {
  return {e.estimate, e.std_error, e.n_samples, e.ci_lo, e.ci_hi};
}

inline std::vector<std::string> estimator_header(const std::string& prefix = "") {
  return {prefix + "estimate", prefix + "stderr", prefix + "n_samples", prefix + "ci_lo", prefix + "ci_hi"};
}

}  // namespace dynfpp

#endif
