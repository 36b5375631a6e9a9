#pragma once

#include <cmath>
#include <charconv>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace pinncert::csv {

/// Shortest round-trip text for a double; "nan"/"inf"/"-inf" for non-finite values.
inline std::string real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string real(std::optional<double> v) { return v ? real(*v) : std::string(); }

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

inline void write_header(std::ostream& out, std::string_view header) { out << header << '\n'; }

}  // namespace pinncert::csv
