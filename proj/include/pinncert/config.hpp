#pragma once

// Flat "key = value" run configuration. '#' starts a comment, lists are comma-separated.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pinncert/error.hpp"

namespace pinncert::config {

namespace detail {
inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool valid_key(std::string_view k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

inline std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  for (std::size_t start = 0;;) {
    const std::size_t comma = v.find(',', start);
    out.push_back(trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}
}  // namespace detail

class Config {
 public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };

  static Config parse(std::istream& in, const std::string& source = "<config>") {
    Config c;
    c.source_ = source;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
      std::string_view s = line;
      if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
      s = detail::trim(s);
      if (s.empty()) continue;
      const auto at = [&](const std::string& msg) { return Error(Errc::Parse, source + ":" + std::to_string(no) + ": " + msg); };
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) throw at("expected 'key = value'");
      const auto key = detail::trim(s.substr(0, eq));
      const auto value = detail::trim(s.substr(eq + 1));
      if (!detail::valid_key(key)) throw at("invalid key '" + std::string(key) + "'");
      if (value.empty()) throw at("empty value for '" + std::string(key) + "'");
      const auto [it, fresh] = c.entries_.emplace(std::string(key), Entry{std::string(value), no});
      if (!fresh) throw at("duplicate key '" + it->first + "' (first set on line " + std::to_string(it->second.line) + ")");
    }
    return c;
  }

  static Config parse_string(const std::string& text, const std::string& source = "<config>") {
    std::istringstream in(text);
    return parse(in, source);
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open " + path);
    return parse(in, path);
  }

  const std::string& source() const noexcept { return source_; }
  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const Entry& entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw Error(Errc::InvalidConfig, source_ + ": missing key '" + key + "'");
    return it->second;
  }

  const std::string& text(const std::string& key) const { return entry(key).value; }
  std::string text(const std::string& key, const std::string& fallback) const { return has(key) ? text(key) : fallback; }

  double real(const std::string& key) const {
    const auto& e = entry(key);
    return to_real(key, e, e.value);
  }
  double real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

  std::uint64_t count(const std::string& key) const {
    const auto& e = entry(key);
    return to_count(key, e, e.value);
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const { return has(key) ? count(key) : fallback; }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& e = entry(key);
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw bad(key, e, "expected true or false, got '" + e.value + "'");
  }

  std::vector<double> reals(const std::string& key) const {
    const auto& e = entry(key);
    std::vector<double> out;
    for (auto item : detail::split_list(e.value)) out.push_back(to_real(key, e, item));
    return out;
  }

  std::vector<std::uint64_t> counts(const std::string& key) const {
    const auto& e = entry(key);
    std::vector<std::uint64_t> out;
    for (auto item : detail::split_list(e.value)) out.push_back(to_count(key, e, item));
    return out;
  }

 private:
  Error bad(const std::string& key, const Entry& e, const std::string& msg) const {
    return Error(Errc::InvalidConfig, source_ + ":" + std::to_string(e.line) + ": key '" + key + "': " + msg);
  }

  double to_real(const std::string& key, const Entry& e, std::string_view s) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
      throw bad(key, e, "expected a number, got '" + std::string(s) + "'");
    return v;
  }

  std::uint64_t to_count(const std::string& key, const Entry& e, std::string_view s) const {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
      throw bad(key, e, "expected a non-negative integer, got '" + std::string(s) + "'");
    return v;
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
};

}  // namespace pinncert::config
