#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "regtv/error.hpp"
#include "regtv/path.hpp"

namespace regtv {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

inline std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace detail

// Reads the `time,value` CSV format. Line numbers in diagnostics are 1-based and
// count the header.
inline SampledPath read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "time,value") {
    throw Error(ErrorCode::ParseError, "row 1: expected header 'time,value'");
  }
  std::vector<double> times;
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto comma = line.find(',');
    double t = 0.0;
    double v = 0.0;
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos ||
        !detail::parse_double(std::string_view(line).substr(0, comma), t) ||
        !detail::parse_double(std::string_view(line).substr(comma + 1), v)) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": malformed '" + line + "'");
    }
    if (!std::isfinite(t) || !std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(row) + ": non-finite entry");
    }
    if (!times.empty() && !(t > times.back())) {
      throw Error(ErrorCode::NonMonotoneTimes,
                  "row " + std::to_string(row) + ": time does not exceed previous row");
    }
    times.push_back(t);
    values.push_back(v);
  }
  return SampledPath::validate(std::move(times), std::move(values));
}

inline void write_csv(std::ostream& out, const SampledPath& path) {
  out << "time,value\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << detail::format_double(path.times()[i]) << ',' << detail::format_double(path.values()[i])
        << '\n';
  }
}

}  // namespace regtv
